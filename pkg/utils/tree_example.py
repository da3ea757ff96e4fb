"""
Дерево как данные: последовательности node, father, leaf (N -> N) и
номер последнего построенного узла n. Операции add и del собраны из
if_then_else с условиями S11, S12, S21, S22 и сравниваются с обычным
изменяемым деревом.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from utils.construction_graph import ConstructionGraph, GraphBuilder, curry_transform, partial_apply
from utils.evaluator import apply_value, evaluate
from utils.primitive_ops import (
    Apply, Change, Copy, Merge, Succ, TypeConstructor, change_graph, const, discard, id_graph, if_then_else,
)
from utils.relations import Negation, RelationAtom, Window
from utils.type_system import Arrow, NAT, RelKind
from utils.values import NatValue, OpValue

logger = logging.getLogger(__name__)

SEQ = Arrow((NAT,), (NAT,))
STATE = (NAT, NAT, SEQ, SEQ, SEQ)

# Значения node/leaf: 1 - построен (лист), 2 - удален (не лист), 3 - вне области
BUILT, REMOVED, UNSPECIFIED = 1, 2, 3


@dataclass(frozen=True)
class TreeState:
    n: NatValue
    o: NatValue
    node: OpValue
    father: OpValue
    leaf: OpValue

    def values(self) -> list:
        return [self.n, self.o, self.node, self.father, self.leaf]

    def with_operand(self, o: int) -> "TreeState":
        return TreeState(self.n, NatValue(o), self.node, self.father, self.leaf)

    def tables(self) -> dict:
        """Значения node, father, leaf для индексов 1..n"""
        indices = range(1, self.n.count + 1)
        return {
            name: [apply_value(getattr(self, name), NatValue(i)).count for i in indices]
            for name in ("node", "father", "leaf")
        }


def initial_state(o: int = 1) -> TreeState:
    """n = 1, node = leaf = Change(1; 1; const(3)), father = const(1)"""
    marked = OpValue(change_graph(1, NatValue(BUILT), OpValue(const(NatValue(UNSPECIFIED), NAT))))
    return TreeState(
        n=NatValue(1),
        o=NatValue(o),
        node=marked,
        father=OpValue(const(NatValue(1), NAT)),
        leaf=marked,
    )


# --- Отношения и условия ---

def _sum(b: GraphBuilder, *terms):
    result = terms[0]
    for term in terms[1:]:
        (result,) = b.add(TypeConstructor("+"), result, term)
    return result


def relation_r11() -> ConstructionGraph:
    """R11(n; o; node; c) = Greater(o; n) + Equal(node(o); c)"""
    b = GraphBuilder("R11")
    n, o, node, c = b.input(NAT), b.input(NAT), b.input(SEQ), b.input(NAT)
    o, o_copy = b.add(Copy(NAT), o)
    (outside,) = b.add(RelationAtom(RelKind.GREATER), o, n)
    (status,) = b.add(Apply(SEQ), node, o_copy)
    (removed,) = b.add(RelationAtom(RelKind.EQUAL), status, c)
    b.output(_sum(b, outside, removed))
    return b.build()


def relation_r12() -> ConstructionGraph:
    """R12(o; leaf; c) = Equal(leaf(o); c)"""
    b = GraphBuilder("R12")
    o, leaf, c = b.input(NAT), b.input(SEQ), b.input(NAT)
    (status,) = b.add(Apply(SEQ), leaf, o)
    (out,) = b.add(RelationAtom(RelKind.EQUAL), status, c)
    b.output(out)
    return b.build()


def relation_r21() -> ConstructionGraph:
    """R21(n; o; node; leaf; c2; c1; c1') = Greater(o; n) + Equal(node(o); c2) + not Equal(leaf(o); c1) + Equal(o; c1')"""
    b = GraphBuilder("R21")
    n, o, node, leaf = b.input(NAT), b.input(NAT), b.input(SEQ), b.input(SEQ)
    c2, c1, c1_root = b.input(NAT), b.input(NAT), b.input(NAT)
    o1, rest = b.add(Copy(NAT), o)
    o2, rest = b.add(Copy(NAT), rest)
    o3, o4 = b.add(Copy(NAT), rest)
    (outside,) = b.add(RelationAtom(RelKind.GREATER), o1, n)
    (node_status,) = b.add(Apply(SEQ), node, o2)
    (removed,) = b.add(RelationAtom(RelKind.EQUAL), node_status, c2)
    (leaf_status,) = b.add(Apply(SEQ), leaf, o3)
    (is_leaf,) = b.add(RelationAtom(RelKind.EQUAL), leaf_status, c1)
    (not_leaf,) = b.add(Negation(), is_leaf)
    (root,) = b.add(RelationAtom(RelKind.EQUAL), o4, c1_root)
    b.output(_sum(b, outside, removed, not_leaf, root))
    return b.build()


def relation_r22() -> ConstructionGraph:
    """R22(father; o; i) = Equal(o; i) + not Equal(father(i); father(o))"""
    b = GraphBuilder("R22")
    father, o, i = b.input(SEQ), b.input(NAT), b.input(NAT)
    father, father_copy = b.add(Copy(SEQ), father)
    o, o_copy = b.add(Copy(NAT), o)
    i, i_copy = b.add(Copy(NAT), i)
    (same,) = b.add(RelationAtom(RelKind.EQUAL), o, i)
    (father_i,) = b.add(Apply(SEQ), father, i_copy)
    (father_o,) = b.add(Apply(SEQ), father_copy, o_copy)
    (same_father,) = b.add(RelationAtom(RelKind.EQUAL), father_i, father_o)
    (other_father,) = b.add(Negation(), same_father)
    b.output(_sum(b, same, other_father))
    return b.build()


def _over_state(name: str, relation: ConstructionGraph, used: tuple) -> OpValue:
    """Условие B -> Types1: relation на выбранных компонентах B, остальные отбрасываются"""
    b = GraphBuilder(name)
    handles = [b.input(t) for t in STATE]
    (out,) = b.subgraph(relation, *[handles[i] for i in used])
    b.output(discard(b, out, [h for i, h in enumerate(handles) if i not in used]))
    return OpValue(b.build())


def condition_s11() -> OpValue:
    return _over_state("S11", partial_apply(relation_r11(), {3: NatValue(REMOVED)}), (0, 1, 2))


def condition_s12() -> OpValue:
    return _over_state("S12", partial_apply(relation_r12(), {2: NatValue(BUILT)}), (1, 4))


def condition_s21() -> OpValue:
    bindings = {4: NatValue(REMOVED), 5: NatValue(BUILT), 6: NatValue(1)}
    return _over_state("S21", partial_apply(relation_r21(), bindings), (0, 1, 2, 4))


def condition_s22() -> OpValue:
    """
    S22(father; o; n) = R22(father; o; 1) x ... x R22(father; o; n):
    каррирование R22, композиция с Lx(*; 1) и обратное каррирование.
    """
    rows = curry_transform(relation_r22(), 2)
    b = GraphBuilder("S22")
    n, o, node, father, leaf = (b.input(t) for t in STATE)
    (row,) = b.subgraph(rows, father, o)
    (out,) = b.add(Window("l_times"), row, b.constant(NatValue(1)), n)
    b.output(discard(b, out, (node, leaf)))
    return OpValue(b.build())


# --- Ветви ---

def branch_f11() -> OpValue:
    """Новый узел Succ(n) - ребенок o; n увеличивается"""
    b = GraphBuilder("f11")
    n, o, node, father, leaf = (b.input(t) for t in STATE)
    (new,) = b.add(Succ(), n)
    new, rest = b.add(Copy(NAT), new)
    new_node, rest = b.add(Copy(NAT), rest)
    new_father, new_leaf = b.add(Copy(NAT), rest)
    o, o_value = b.add(Copy(NAT), o)
    (node,) = b.add(Change(NAT), new_node, b.constant(NatValue(BUILT)), node)
    (father,) = b.add(Change(NAT), new_father, o_value, father)
    (leaf,) = b.add(Change(NAT), new_leaf, b.constant(NatValue(BUILT)), leaf)
    for handle in (new, o, node, father, leaf):
        b.output(handle)
    return OpValue(b.build())


def _mark(name: str, targets: tuple, value: int) -> OpValue:
    """Change(o; value; seq) для каждой последовательности из targets"""
    b = GraphBuilder(name)
    handles = list(b.input(t) for t in STATE)
    for position in targets:
        o, index = b.add(Copy(NAT), handles[1])
        handles[1] = o
        (handles[position],) = b.add(Change(NAT), index, b.constant(NatValue(value)), handles[position])
    for handle in handles:
        b.output(handle)
    return OpValue(b.build())


def branch_t12() -> OpValue:
    """leaf(o) становится 2"""
    return _mark("t12", (4,), REMOVED)


def branch_f21() -> OpValue:
    """node(o) и leaf(o) становятся 2"""
    return _mark("f21", (2, 4), REMOVED)


def branch_t22() -> OpValue:
    """leaf(father(o)) становится 1"""
    b = GraphBuilder("t22")
    n, o, node, father, leaf = (b.input(t) for t in STATE)
    o, o_index = b.add(Copy(NAT), o)
    father, father_copy = b.add(Copy(SEQ), father)
    (parent,) = b.add(Apply(SEQ), father_copy, o_index)
    (leaf,) = b.add(Change(NAT), parent, b.constant(NatValue(BUILT)), leaf)
    for handle in (n, o, node, father, leaf):
        b.output(handle)
    return OpValue(b.build())


def _two_stages(name: str, first: tuple, second: tuple) -> ConstructionGraph:
    """ite(first) -> merge -> ite(second) -> merge"""
    b = GraphBuilder(name)
    state = [b.input(t) for t in STATE]
    for condition, then_op, else_op in (first, second):
        branches = b.subgraph(if_then_else(condition, then_op, else_op), *state)
        state = list(b.add(Merge(STATE), *branches))
    for handle in state:
        b.output(handle)
    return b.build()


@lru_cache(maxsize=None)
def add_graph() -> ConstructionGraph:
    identity = OpValue(id_graph(STATE))
    return _two_stages(
        "add",
        (condition_s11(), identity, branch_f11()),
        (condition_s12(), branch_t12(), identity),
    )


@lru_cache(maxsize=None)
def del_graph() -> ConstructionGraph:
    identity = OpValue(id_graph(STATE))
    return _two_stages(
        "del",
        (condition_s21(), identity, branch_f21()),
        (condition_s22(), branch_t22(), identity),
    )


def _run(graph: ConstructionGraph, s: TreeState) -> TreeState:
    return TreeState(*evaluate(graph, s.values()).outputs)


def tree_add(s: TreeState) -> TreeState:
    return _run(add_graph(), s)


def tree_del(s: TreeState) -> TreeState:
    return _run(del_graph(), s)


# --- Изменяемое дерево для сравнения ---

@dataclass
class MutableTree:
    """Те же шаги add/del на словарях"""
    n: int = 1
    node: dict = field(default_factory=lambda: {1: BUILT})
    father: dict = field(default_factory=dict)
    leaf: dict = field(default_factory=lambda: {1: BUILT})

    def get(self, table: str, i: int) -> int:
        if table == "father":
            return self.father.get(i, 1)
        return getattr(self, table).get(i, UNSPECIFIED)

    def add(self, o: int) -> None:
        if not (o > self.n or self.get("node", o) == REMOVED):
            new = self.n + 1
            self.node[new] = BUILT
            self.father[new] = o
            self.leaf[new] = BUILT
            self.n = new
        if self.get("leaf", o) == BUILT:
            self.leaf[o] = REMOVED

    def delete(self, o: int) -> None:
        skip = o > self.n or self.get("node", o) == REMOVED or self.get("leaf", o) != BUILT or o == 1
        if not skip:
            self.node[o] = REMOVED
            self.leaf[o] = REMOVED
        parent = self.get("father", o)
        if all(i == o or self.get("father", i) != parent for i in range(1, self.n + 1)):
            self.leaf[parent] = BUILT

    def tables(self) -> dict:
        indices = range(1, self.n + 1)
        return {name: [self.get(name, i) for i in indices] for name in ("node", "father", "leaf")}


def replay(script, state: TreeState = None) -> list:
    """
    Выполняет сценарий [("add"|"del", o), ...] и возвращает номера шагов,
    на которых таблицы расходятся с изменяемым деревом.
    """
    state = state or initial_state()
    oracle = MutableTree()
    mismatches = []
    for step, (action, o) in enumerate(script, start=1):
        state = state.with_operand(o)
        if action == "add":
            state = tree_add(state)
            oracle.add(o)
        else:
            state = tree_del(state)
            oracle.delete(o)
        if state.n.count != oracle.n or state.tables() != oracle.tables():
            mismatches.append(step)
    return mismatches


def random_script(rng: np.random.Generator, max_length: int = 30) -> list:
    """Случайный сценарий; o выбирается из 1..n+2 по ходу изменяемого дерева"""
    oracle = MutableTree()
    script = []
    for _ in range(int(rng.integers(1, max_length + 1))):
        action = "add" if rng.random() < 0.5 else "del"
        o = int(rng.integers(1, oracle.n + 3))
        script.append((action, o))
        if action == "add":
            oracle.add(o)
        else:
            oracle.delete(o)
    return script


def random_replay(seed: int, scripts: int = 100, max_length: int = 30) -> list:
    """Строки отчета: номер сценария, длина, число расхождений"""
    rng = np.random.default_rng(seed)
    rows = []
    for index in range(scripts):
        script = random_script(rng, max_length)
        mismatches = replay(script)
        rows.append({"script": index + 1, "length": len(script), "mismatches": len(mismatches)})
        if mismatches:
            logger.warning("Сценарий %d расходится на шагах %s", index + 1, mismatches)
    return rows
