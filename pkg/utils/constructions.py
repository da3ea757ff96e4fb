"""
Построения из примитивов: операция op и Rec_A (итератор Гжегорчика),
теорема "для всякого k существует n > k" с проверяемыми свидетельствами,
экстенсиональное равенство функционалов Eq_A и ограниченный поиск g.
"""
from __future__ import annotations

import logging
from typing import Optional

from utils.construction_graph import ConstructionGraph, GraphBuilder, curry_transform, permute_inputs
from utils.evaluator import apply_value
from utils.primitive_ops import (
    Apply, Change, Compose, Copy, IfThenElse, Ind1Code, Iter, Join, Merge, Pred, Proj, Succ,
    TypeConstructor, While, change_graph, const, discard, primitive_graph, sigma_f,
)
from utils.relations import (
    AxiomObject, Negation, Quantifier, RelationAtom, Status, check_witness, eval_relational, greater,
    relation,
)
from utils.type_system import Arrow, NAT, Product, RelKind, Sigma, TypeExpr
from utils.values import NatValue, OpValue, PairValue, Witness

logger = logging.getLogger(__name__)


def self_map(a: TypeExpr) -> Arrow:
    return Arrow((a,), (a,))


def sequence_type(a: TypeExpr) -> Arrow:
    """C = N -> (A -> A)"""
    return Arrow((NAT,), (self_map(a),))


def constant_sequence(op: OpValue) -> OpValue:
    """Последовательность, все элементы которой - op"""
    return OpValue(const(op, NAT))


def patched_sequence(items: dict, default: OpValue) -> OpValue:
    """Последовательность default с заменами в позициях items (через Change)"""
    seq = constant_sequence(default)
    for index, op in sorted(items.items()):
        seq = OpValue(change_graph(index, op, seq))
    return seq


def build_op_node(a: TypeExpr) -> ConstructionGraph:
    """
    op: N x C -> N x C. Возвращает (n+1, c'), где c'(n+1) - композиция
    c(n) и c(n+1), остальные элементы не меняются.
    """
    aa = self_map(a)
    c_type = sequence_type(a)
    b = GraphBuilder(f"op[{a}]")
    pair = b.input(Product(NAT, c_type))
    n0, c0 = b.add(Proj(NAT, c_type), pair)
    n1, n2 = b.add(Copy(NAT), n0)
    c1, c_rest = b.add(Copy(c_type), c0)
    c2, c3 = b.add(Copy(c_type), c_rest)
    (next_n,) = b.add(Succ(), n2)
    next1, next_rest = b.add(Copy(NAT), next_n)
    next2, next3 = b.add(Copy(NAT), next_rest)
    (current,) = b.add(Apply(c_type), c1, n1)
    (following,) = b.add(Apply(c_type), c2, next1)
    (composed,) = b.add(Compose(aa, aa), current, following)
    (changed,) = b.add(Change(aa), next2, composed, c3)
    (out,) = b.add(Join(NAT, c_type), next3, changed)
    b.output(out)
    return b.build()


def build_rec(a: TypeExpr) -> ConstructionGraph:
    """
    Rec_A: (N; C) -> (A -> A), композиция первых n элементов c.
    Iter_D(n)(op) применяется к (1, c), затем proj, Pred и apply.
    """
    d = Product(NAT, sequence_type(a))
    c_type = sequence_type(a)
    op = OpValue(build_op_node(a))
    b = GraphBuilder(f"Rec[{a}]")
    n, c = b.input(NAT), b.input(c_type)
    (g,) = b.add(Iter(d), n, b.constant(op))
    (start,) = b.add(Join(NAT, c_type), b.constant(NatValue(1)), c)
    (finished,) = b.add(Apply(self_map(d)), g, start)
    last, seq = b.add(Proj(NAT, c_type), finished)
    (index,) = b.add(Pred(), last)
    (out,) = b.add(Apply(c_type), seq, index)
    b.output(out)
    return b.build()


def grzegorczyk_iterator(a: TypeExpr) -> ConstructionGraph:
    """Rec_A после перестановки входов и каррирования: C -> C"""
    return curry_transform(permute_inputs(build_rec(a), (1, 0)), 1)


def rec_oracle(k: int, c: OpValue, a):
    """R(a)(c)(1) = a, R(a)(c)(j+1) = c(j)(R(a)(c)(j)); возвращает R(a)(c)(k+1)"""
    value = a
    for j in range(1, k + 1):
        value = apply_value(apply_value(c, NatValue(j)), value)
    return value


# --- Для всякого k существует n > k ---

def greater_than_successor_family() -> OpValue:
    """F(k) = Greater(Succ(k); k)"""
    b = GraphBuilder("F")
    k, k_copy = b.add(Copy(NAT), b.input(NAT))
    (n,) = b.add(Succ(), k)
    (out,) = b.add(RelationAtom(RelKind.GREATER), n, k_copy)
    b.output(out)
    return OpValue(b.build())


def theorem_forall_exists_greater(max_k: int = 20) -> tuple:
    """
    sigma_F(f), где f - примитивный объект аксиомы Greater(Succ(n); n).
    Возвращает операцию и строки проверки для k = 1..max_k.
    """
    family = greater_than_successor_family()
    witness_builder = GraphBuilder("f")
    (w,) = witness_builder.add(AxiomObject("succ_greater", family), witness_builder.input(NAT))
    witness_builder.output(w)
    f = OpValue(witness_builder.build())
    op = OpValue(sigma_f(family, f))

    rows = []
    for k in range(1, max_k + 1):
        pair = apply_value(op, NatValue(k))
        witness = pair.right if isinstance(pair, PairValue) else None
        claim = greater(k + 1, k)
        exists = Sigma(relation(f"gt(_1;{k})"))
        reread = Witness("sigma_intro", exists, (witness,), data=(k + 1,))
        rows.append({
            "k": k,
            "first": pair.left.count if isinstance(pair, PairValue) else None,
            "claim": str(claim),
            "witness_valid": check_witness(claim, witness),
            "sigma_valid": check_witness(exists, reread),
        })
    logger.debug("Теорема проверена для k <= %d", max_k)
    return op, rows


# --- Eq_A ---

def eq_functionals(a: TypeExpr, bound: Optional[int]) -> OpValue:
    """
    Eq_A: (A -> N; A -> N) -> Types2, Pi по a от Equal(f(a); g(a)).
    H(a; f; g) переставляется в (f; g; a) и каррируется по a.
    """
    fn = Arrow((a,), (NAT,))
    h = GraphBuilder(f"H[{a}]")
    point, f, g = h.input(a), h.input(fn), h.input(fn)
    point, point_copy = h.add(Copy(a), point)
    (fa,) = h.add(Apply(fn), f, point)
    (ga,) = h.add(Apply(fn), g, point_copy)
    (out,) = h.add(RelationAtom(RelKind.EQUAL), fa, ga)
    h.output(out)
    family = curry_transform(permute_inputs(h.build(), (1, 2, 0)), 2)

    b = GraphBuilder(f"Eq[{a};{bound}]")
    f, g = b.input(fn), b.input(fn)
    (pointwise,) = b.subgraph(family, f, g)
    (out,) = b.add(Quantifier("pi", a, 1, bound), pointwise)
    b.output(out)
    return OpValue(b.build())


def eq_decide(a: TypeExpr, f: OpValue, g: OpValue, bound: Optional[int]) -> Status:
    claim = apply_value(eq_functionals(a, bound), f, g)
    return eval_relational(claim.type_expr).status


# --- Ограниченный поиск ---

def toy_enumeration() -> OpValue:
    """Перечисление N -> N: числовой код n-го типа Ind1"""
    return OpValue(primitive_graph(Ind1Code()))


def equal_relation() -> OpValue:
    return OpValue(primitive_graph(RelationAtom(RelKind.EQUAL)))


def bounded_search_graph(enum: OpValue, eq: OpValue) -> ConstructionGraph:
    """
    g(target; n): наименьшее k <= n, для которого eq(target; enum(k)),
    иначе 1. Цикл while с условием Lesser(k; n) x not eq(target; enum(k)).
    """
    (item,) = enum.graph.output_types
    (level,) = eq.graph.output_types
    state = (NAT, NAT, item, enum.graph.signature, eq.graph.signature)

    cond = GraphBuilder("search_condition")
    k, n, target, en, e = (cond.input(t) for t in state)
    k, k_copy = cond.add(Copy(NAT), k)
    (in_range,) = cond.add(RelationAtom(RelKind.LESSER), k, n)
    (candidate,) = cond.add(Apply(enum.graph.signature), en, k_copy)
    (matches,) = cond.add(Apply(eq.graph.signature), e, target, candidate)
    (missing,) = cond.add(Negation(level.n), matches)
    (out,) = cond.add(TypeConstructor("x", level.n), in_range, missing)
    cond.output(out)
    condition = OpValue(cond.build())

    step = GraphBuilder("search_step")
    k, *rest = (step.input(t) for t in state)
    (k,) = step.add(Succ(), k)
    for handle in (k, *rest):
        step.output(handle)
    advance = OpValue(step.build())

    found = GraphBuilder("search_found")
    k, n, target, en, e = (found.input(t) for t in state)
    (candidate,) = found.add(Apply(enum.graph.signature), en, k)
    (out,) = found.add(Apply(eq.graph.signature), e, target, candidate)
    found.output(discard(found, out, (n,)))
    match = OpValue(found.build())

    take = GraphBuilder("search_result")
    k, *rest = (take.input(t) for t in state)
    take.output(discard(take, k, rest))

    fail = GraphBuilder("search_unspecified")
    handles = [fail.input(t) for t in state]
    fail.output(discard(fail, fail.constant(NatValue(1)), handles))

    b = GraphBuilder(f"g({enum.graph.name};{eq.graph.name})")
    target, n = b.input(item), b.input(NAT)
    n_loop, n_state = b.add(Copy(NAT), n)
    loop = b.add(
        While(state, level.n), n_loop, b.constant(condition), b.constant(advance),
        b.constant(NatValue(1)), n_state, target, b.constant(enum), b.constant(eq),
    )
    final = b.add(Merge(state), *loop)
    decided = b.add(
        IfThenElse(state, (NAT,), (NAT,), level.n),
        b.constant(match), b.constant(OpValue(take.build())), b.constant(OpValue(fail.build())), *final,
    )
    (out,) = b.add(Merge((NAT,)), *decided)
    b.output(out)
    return b.build()


def bounded_search_g(enum: OpValue, eq: OpValue, target, n: int) -> int:
    graph = OpValue(bounded_search_graph(enum, eq))
    return apply_value(graph, target, NatValue(n)).count


def linear_scan(enum: OpValue, target, n: int) -> int:
    for k in range(1, n + 1):
        if apply_value(enum, NatValue(k)) == target:
            return k
    return 1
