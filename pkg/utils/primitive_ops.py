"""
Примитивные виды узлов уровня 0 и их правила вычисления:
конструкторы/деструкторы (join, proj, plus, get, const, apply, compose),
Copy, Succ/Pred, Iter, Change, if_then_else, while, sigma_f,
а также полиморфные примитивы уровня 1 (ind1, des, конструкторы типов).
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import ClassVar, Optional

from utils.construction_graph import ConstructionGraph, GraphBuilder, NodeKind, compose_graphs, partial_apply
from utils.errors import (
    ConditionUndecidableError, EvaluationError, InvalidTypeError, TypeMismatchError, WitnessError,
)
from utils.type_system import (
    Arrow, Fiber, NAT, Product, Sigma, Sum, TypeExpr, TypesLevel, des, ind1, level1_constructor, type_code,
)
from utils.values import (
    INACTIVE, NatValue, OpValue, PairValue, Side, Tagged, TypeValue, Witness, copy_value, fits, type_of,
)

logger = logging.getLogger(__name__)


class PrimitiveKind(NodeKind):
    """
    Примитивный вид узла. PARAMS описывает параметры для файлового формата:
    имя поля -> кодек ('type', 'types', 'int', 'str', 'op').
    """
    PARAMS: ClassVar[dict] = {}


def _nat(value) -> NatValue:
    if not isinstance(value, NatValue):
        raise TypeMismatchError(f"ожидалось натуральное число, получено: {value!r}")
    return value


# --- Конструкторы и деструкторы ---

@dataclass(frozen=True)
class Join(PrimitiveKind):
    name: ClassVar[str] = "join"
    PARAMS: ClassVar[dict] = {"a": "type", "b": "type"}
    a: TypeExpr
    b: TypeExpr

    def signature(self):
        return (self.a, self.b), (Product(self.a, self.b),)

    def fire(self, args, ctx):
        return [PairValue(args[0], args[1])]


@dataclass(frozen=True)
class Proj(PrimitiveKind):
    """Проекция; side=None выдает обе компоненты, 'left'/'right' - одну"""
    name: ClassVar[str] = "proj"
    PARAMS: ClassVar[dict] = {"a": "type", "b": "type", "side": "str"}
    a: TypeExpr
    b: TypeExpr
    side: Optional[str] = None

    def signature(self):
        outs = {None: (self.a, self.b), "left": (self.a,), "right": (self.b,)}
        if self.side not in outs:
            raise InvalidTypeError(f"неизвестная сторона проекции: {self.side}")
        return (Product(self.a, self.b),), outs[self.side]

    def fire(self, args, ctx):
        pair = args[0]
        if not isinstance(pair, PairValue):
            raise TypeMismatchError(f"proj ожидает пару, получено: {pair!r}")
        if self.side == "left":
            return [pair.left]
        if self.side == "right":
            return [pair.right]
        return [pair.left, pair.right]


@dataclass(frozen=True)
class PlusLeft(PrimitiveKind):
    name: ClassVar[str] = "plus_l"
    PARAMS: ClassVar[dict] = {"a": "type", "b": "type"}
    a: TypeExpr
    b: TypeExpr

    def signature(self):
        return (self.a,), (Sum(self.a, self.b),)

    def fire(self, args, ctx):
        return [Tagged(Side.LEFT, args[0], Sum(self.a, self.b))]


@dataclass(frozen=True)
class PlusRight(PrimitiveKind):
    name: ClassVar[str] = "plus_r"
    PARAMS: ClassVar[dict] = {"a": "type", "b": "type"}
    a: TypeExpr
    b: TypeExpr

    def signature(self):
        return (self.b,), (Sum(self.a, self.b),)

    def fire(self, args, ctx):
        return [Tagged(Side.RIGHT, args[0], Sum(self.a, self.b))]


@dataclass(frozen=True)
class Get(PrimitiveKind):
    """(A + B) -> (A || B): объект получает только один из выходов"""
    name: ClassVar[str] = "get"
    PARAMS: ClassVar[dict] = {"a": "type", "b": "type"}
    a: TypeExpr
    b: TypeExpr

    def signature(self):
        return (Sum(self.a, self.b),), (self.a, self.b)

    def exclusive_groups(self):
        return (((0,), (1,)),)

    def fire(self, args, ctx):
        tagged = args[0]
        if not isinstance(tagged, Tagged):
            raise TypeMismatchError(f"get ожидает помеченный объект, получено: {tagged!r}")
        if tagged.side is Side.LEFT:
            return [tagged.payload, INACTIVE]
        return [INACTIVE, tagged.payload]


@dataclass(frozen=True)
class Const(PrimitiveKind):
    """const_{A,B} в развернутой форме (A;B) -> A: объект b потребляется и забывается"""
    name: ClassVar[str] = "const"
    PARAMS: ClassVar[dict] = {"a": "type", "b": "type"}
    a: TypeExpr
    b: TypeExpr

    def signature(self):
        return (self.a, self.b), (self.a,)

    def fire(self, args, ctx):
        return [args[0]]


@dataclass(frozen=True)
class ConstN(PrimitiveKind):
    name: ClassVar[str] = "const_n"

    def signature(self):
        return (NAT, NAT), (NAT,)

    def fire(self, args, ctx):
        return [_nat(args[0])]


@dataclass(frozen=True)
class Id(PrimitiveKind):
    name: ClassVar[str] = "id"
    PARAMS: ClassVar[dict] = {"a": "type"}
    a: TypeExpr

    def signature(self):
        return (self.a,), (self.a,)

    def fire(self, args, ctx):
        return [args[0]]


@dataclass(frozen=True)
class Apply(PrimitiveKind):
    """
    apply: (f; a1; ...; ak) -> выходы f.
    bound < числа входов f - сложный вариант: связывает первые bound входов
    и возвращает операцию от остальных.
    """
    name: ClassVar[str] = "apply"
    PARAMS: ClassVar[dict] = {"signature": "type", "bound": "int"}
    signature_type: Arrow
    bound: Optional[int] = None

    def _bound(self) -> int:
        k = len(self.signature_type.inputs)
        bound = k if self.bound is None else self.bound
        if not 1 <= bound <= k:
            raise InvalidTypeError(f"apply: недопустимое число связываемых входов {bound}")
        return bound

    def signature(self):
        sig = self.signature_type
        bound = self._bound()
        ins = (sig,) + sig.inputs[:bound]
        if bound == len(sig.inputs):
            return ins, sig.outputs
        return ins, (Arrow(sig.inputs[bound:], sig.outputs),)

    def fire(self, args, ctx):
        op, rest = args[0], args[1:]
        if self._bound() == len(self.signature_type.inputs):
            return ctx.apply(op, rest)
        graph = partial_apply(op.graph, dict(enumerate(rest)))
        return [OpValue(graph)]


def _compose_signature(first: Arrow, second: Arrow) -> Arrow:
    k = min(len(first.outputs), len(second.inputs))
    if first.outputs[:k] != second.inputs[:k]:
        raise TypeMismatchError(f"compose: выходы {first} не совпадают со входами {second}")
    return Arrow(first.inputs + second.inputs[k:], second.outputs + first.outputs[k:])


@dataclass(frozen=True)
class Compose(PrimitiveKind):
    """compose: (A -> B; B -> C) -> (A -> C), порядок - порядок потока данных"""
    name: ClassVar[str] = "compose"
    PARAMS: ClassVar[dict] = {"first": "type", "second": "type"}
    first: Arrow
    second: Arrow

    def signature(self):
        return (self.first, self.second), (_compose_signature(self.first, self.second),)

    def fire(self, args, ctx):
        f, g = args
        return [OpValue(compose_graphs(f.graph, g.graph))]


@dataclass(frozen=True)
class Copy(PrimitiveKind):
    """Первый выход - оригинал, второй - копия"""
    name: ClassVar[str] = "copy"
    PARAMS: ClassVar[dict] = {"a": "type"}
    a: TypeExpr

    def signature(self):
        return (self.a,), (self.a, self.a)

    def fire(self, args, ctx):
        return [args[0], copy_value(args[0])]


# --- Натуральные числа ---

@dataclass(frozen=True)
class Succ(PrimitiveKind):
    name: ClassVar[str] = "succ"

    def signature(self):
        return (NAT,), (NAT,)

    def fire(self, args, ctx):
        return [NatValue(_nat(args[0]).count + 1)]


@dataclass(frozen=True)
class Pred(PrimitiveKind):
    """Удаляет одну единицу; 1 остается 1"""
    name: ClassVar[str] = "pred"

    def signature(self):
        return (NAT,), (NAT,)

    def fire(self, args, ctx):
        return [NatValue(max(1, _nat(args[0]).count - 1))]


def _self_map(a: TypeExpr) -> Arrow:
    return Arrow((a,), (a,))


def _sequence(a: TypeExpr) -> Arrow:
    return Arrow((NAT,), (a,))


@dataclass(frozen=True)
class Iter(PrimitiveKind):
    """Iter_A: (N; A -> A) -> (A -> A), n-кратная композиция"""
    name: ClassVar[str] = "iter"
    PARAMS: ClassVar[dict] = {"a": "type"}
    a: TypeExpr

    def signature(self):
        return (NAT, _self_map(self.a)), (_self_map(self.a),)

    def fire(self, args, ctx):
        n, f = args
        return [OpValue(iter_graph(_nat(n).count, f.graph))]


@dataclass(frozen=True)
class Change(PrimitiveKind):
    """Change_A: (N; A; N -> A) -> (N -> A)"""
    name: ClassVar[str] = "change"
    PARAMS: ClassVar[dict] = {"a": "type"}
    a: TypeExpr

    def signature(self):
        return (NAT, self.a, _sequence(self.a)), (_sequence(self.a),)

    def fire(self, args, ctx):
        n, value, q = args
        return [OpValue(change_graph(_nat(n).count, value, q))]


@dataclass(frozen=True)
class Override(PrimitiveKind):
    """Последовательность с конечной таблицей замен поверх базовой"""
    name: ClassVar[str] = "override"
    a: TypeExpr
    table: tuple

    def signature(self):
        return (NAT, _sequence(self.a)), (self.a,)

    def fire(self, args, ctx):
        k, base = args
        for index, value in self.table:
            if index == _nat(k).count:
                return [value]
        return ctx.apply(base, [k])


# --- Условия и циклы ---

def _condition_holds(condition: OpValue, state: list, ctx) -> bool:
    from utils.relations import Status, eval_relational

    outputs = ctx.apply(condition, [copy_value(v) for v in state])
    type_value = outputs[0]
    if not isinstance(type_value, TypeValue):
        raise TypeMismatchError(f"условие '{condition.graph.name}' вернуло не тип: {type_value!r}")
    verdict = eval_relational(type_value.type_expr, bound=ctx.bound)
    if verdict.status is Status.UNDECIDABLE:
        raise ConditionUndecidableError(f"условие {type_value.type_expr} неразрешимо без границы квантора")
    return verdict.status is Status.INHABITED


@dataclass(frozen=True)
class IfThenElse(PrimitiveKind):
    """
    if_then_else_(B,C,D) в развернутой форме: (R; t; f; b) -> (C || D).
    Вход b копируется дважды: для условия и для выбранной ветви.
    """
    name: ClassVar[str] = "ite"
    PARAMS: ClassVar[dict] = {"b": "types", "c": "types", "d": "types", "level": "int"}
    b: tuple
    c: tuple
    d: tuple
    level: int = 1

    def signature(self):
        cond = Arrow(self.b, (TypesLevel(self.level),))
        return (cond, Arrow(self.b, self.c), Arrow(self.b, self.d)) + tuple(self.b), tuple(self.c) + tuple(self.d)

    def exclusive_groups(self):
        nc, nd = len(self.c), len(self.d)
        return ((tuple(range(nc)), tuple(range(nc, nc + nd))),)

    def fire(self, args, ctx):
        condition, then_op, else_op, *state = args
        if _condition_holds(condition, state, ctx):
            return ctx.apply(then_op, state) + [INACTIVE] * len(self.d)
        return [INACTIVE] * len(self.c) + ctx.apply(else_op, state)


@dataclass(frozen=True)
class While(PrimitiveKind):
    """
    while_B: (n; con; t; b) -> (B || B).
    t применяется, пока выполняется con, не более n раз. Левый канал - все
    n проверок истинны, правый - цикл остановлен ложным условием.
    """
    name: ClassVar[str] = "while"
    PARAMS: ClassVar[dict] = {"b": "types", "level": "int"}
    b: tuple
    level: int = 1

    def signature(self):
        cond = Arrow(self.b, (TypesLevel(self.level),))
        ins = (NAT, cond, Arrow(self.b, self.b)) + tuple(self.b)
        return ins, tuple(self.b) + tuple(self.b)

    def exclusive_groups(self):
        k = len(self.b)
        return ((tuple(range(k)), tuple(range(k, 2 * k))),)

    def fire(self, args, ctx):
        n, condition, step, *state = args
        inactive = [INACTIVE] * len(self.b)
        for _ in range(_nat(n).count):
            if not _condition_holds(condition, state, ctx):
                return inactive + state
            state = ctx.apply(step, state)
        return state + inactive


@dataclass(frozen=True)
class Merge(PrimitiveKind):
    """Сводит две взаимоисключающие группы каналов в одну"""
    name: ClassVar[str] = "merge"
    PARAMS: ClassVar[dict] = {"b": "types"}
    accepts_inactive: ClassVar[bool] = True
    b: tuple

    def signature(self):
        return tuple(self.b) + tuple(self.b), tuple(self.b)

    def fire(self, args, ctx):
        k = len(self.b)
        first, second = args[:k], args[k:]
        first_active = all(v is not INACTIVE for v in first)
        second_active = all(v is not INACTIVE for v in second)
        if first_active and all(v is INACTIVE for v in second):
            return list(first)
        if second_active and all(v is INACTIVE for v in first):
            return list(second)
        raise EvaluationError("merge: должна быть активна ровно одна группа каналов")


@dataclass(frozen=True)
class SigmaF(PrimitiveKind):
    """sigma_F: (f; a) -> (a; f(a)) : Sigma F, где f(a) - свидетельство F(a)"""
    name: ClassVar[str] = "sigma_f"
    PARAMS: ClassVar[dict] = {"family": "op"}
    family: OpValue

    def signature(self):
        (domain,) = self.family.graph.input_types
        return (Arrow((domain,), (Fiber(self.family),)), domain), (Sigma(self.family),)

    def fire(self, args, ctx):
        from utils.relations import check_witness

        f, a = args
        (witness,) = ctx.apply(f, [copy_value(a)])
        (claim,) = ctx.apply(self.family, [copy_value(a)])
        if not isinstance(witness, Witness) or witness.claim != claim.type_expr:
            raise WitnessError(f"sigma_f: объект {witness} не является свидетельством {claim}")
        if not check_witness(claim.type_expr, witness):
            raise WitnessError(f"sigma_f: свидетельство для {claim} не прошло проверку")
        return [PairValue(a, witness)]


# --- Полиморфные примитивы уровня 1 ---

@dataclass(frozen=True)
class Ind1(PrimitiveKind):
    name: ClassVar[str] = "ind1"

    def signature(self):
        return (NAT,), (TypesLevel(0),)

    def fire(self, args, ctx):
        return [TypeValue(ind1(_nat(args[0]).count))]


@dataclass(frozen=True)
class Ind1Code(PrimitiveKind):
    """Числовой код n-го типа перечисления Ind1"""
    name: ClassVar[str] = "ind1_code"

    def signature(self):
        return (NAT,), (NAT,)

    def fire(self, args, ctx):
        return [NatValue(type_code(ind1(_nat(args[0]).count)))]


@dataclass(frozen=True)
class Des(PrimitiveKind):
    name: ClassVar[str] = "des"

    def signature(self):
        return (TypesLevel(0),), (TypesLevel(0), TypesLevel(0))

    def fire(self, args, ctx):
        left, right = des(args[0].type_expr)
        return [TypeValue(left), TypeValue(right)]


@dataclass(frozen=True)
class TypeConstructor(PrimitiveKind):
    """x, +, ->, || как операции над объектами-типами уровня level"""
    name: ClassVar[str] = "tcon"
    PARAMS: ClassVar[dict] = {"op": "str", "level": "int"}
    op: str
    level: int = 1

    def signature(self):
        t = TypesLevel(self.level)
        return (t, t), (t,)

    def fire(self, args, ctx):
        a, b = args
        return [TypeValue(level1_constructor(self.op, a.type_expr, b.type_expr))]


# --- Конструкторы графов ---

def primitive_graph(kind: NodeKind, name: Optional[str] = None) -> ConstructionGraph:
    """Граф из одного узла с портами на каждом гнезде"""
    b = GraphBuilder(name or kind.name)
    ins, _ = kind.signature()
    for handle in b.add(kind, *[b.input(t) for t in ins]):
        b.output(handle)
    return b.build()


def succ_op() -> OpValue:
    return OpValue(primitive_graph(Succ()))


def pred_op() -> OpValue:
    return OpValue(primitive_graph(Pred()))


def id_graph(types) -> ConstructionGraph:
    types = tuple(types)
    b = GraphBuilder("id" if len(types) == 1 else f"id{len(types)}")
    for handle in [b.input(t) for t in types]:
        b.output(handle)
    return b.build()


def const(value, b_type: TypeExpr) -> ConstructionGraph:
    """const(a): B -> A, всегда возвращает a"""
    a_type = type_of(value)
    graph = partial_apply(primitive_graph(Const(a_type, b_type)), {0: value})
    return _renamed(graph, f"const({_short(value)})")


def _short(value) -> str:
    return str(value.count) if isinstance(value, NatValue) else str(value)


def _renamed(graph: ConstructionGraph, name: str) -> ConstructionGraph:
    return ConstructionGraph(name, graph.nodes, graph.wires, graph.inputs, graph.outputs)


def iter_graph(n: int, f: ConstructionGraph) -> ConstructionGraph:
    """Iter(n; f): n связанных копий f"""
    if n < 1:
        raise InvalidTypeError(f"Iter требует n >= 1, получено {n}")
    (a_type,) = f.input_types
    if f.output_types != (a_type,):
        raise TypeMismatchError(f"Iter: операция '{f.name}' должна иметь тип A -> A")
    b = GraphBuilder(f"iter({n};{f.name})")
    handle = b.input(a_type)
    for _ in range(n):
        (handle,) = b.subgraph(f, handle)
    b.output(handle)
    return b.build()


def _override_parts(graph: ConstructionGraph):
    overrides = [node for node in graph.nodes if isinstance(node.kind, Override)]
    bases = [node for node in graph.nodes if node.kind.name == "constant"]
    if len(graph.nodes) == 4 and len(overrides) == 1 and len(bases) == 1:
        return dict(overrides[0].kind.table), bases[0].kind.value
    return None


def change_graph(n: int, value, q: OpValue) -> ConstructionGraph:
    """Change(n; a; q): в позиции n - a, в остальных - q(k)"""
    (a_type,) = q.graph.output_types
    if q.graph.input_types != (NAT,):
        raise TypeMismatchError(f"Change: '{q.graph.name}' должна быть последовательностью N -> A")
    if not fits(value, a_type):
        raise TypeMismatchError(f"Change: объект {value} не имеет типа {a_type}")
    parts = _override_parts(q.graph)
    table, base = parts if parts is not None else ({}, q)
    table[n] = value
    b = GraphBuilder(f"change[{len(table)}]({base.graph.name})")
    k = b.input(NAT)
    (out,) = b.add(Override(a_type, tuple(sorted(table.items(), key=lambda item: item[0]))), k, b.constant(base))
    b.output(out)
    return b.build()


def if_then_else(condition: OpValue, then_op: OpValue, else_op: OpValue) -> ConstructionGraph:
    """Граф B -> (C || D)"""
    b_types = condition.graph.input_types
    (level,) = condition.graph.output_types
    if then_op.graph.input_types != b_types or else_op.graph.input_types != b_types:
        raise TypeMismatchError("if_then_else: условие и обе ветви должны иметь одинаковый вход")
    kind = IfThenElse(b_types, then_op.graph.output_types, else_op.graph.output_types, level.n)
    b = GraphBuilder(f"ite({condition.graph.name};{then_op.graph.name};{else_op.graph.name})")
    args = [b.input(t) for t in b_types]
    for handle in b.add(kind, b.constant(condition), b.constant(then_op), b.constant(else_op), *args):
        b.output(handle)
    return b.build()


def while_loop(n: int, condition: OpValue, step: OpValue) -> ConstructionGraph:
    """Граф B -> (B || B) для while_B(n; con; t)"""
    b_types = condition.graph.input_types
    (level,) = condition.graph.output_types
    b = GraphBuilder(f"while({n};{condition.graph.name};{step.graph.name})")
    args = [b.input(t) for t in b_types]
    kind = While(b_types, level.n)
    outs = b.add(kind, b.constant(NatValue(n)), b.constant(condition), b.constant(step), *args)
    for handle in outs:
        b.output(handle)
    return b.build()


def while_unrolled(n: int, condition: OpValue, step: OpValue) -> ConstructionGraph:
    """while_B(n; con; t) как цепочка из n условных операций, сведенных узлами merge"""
    b_types = condition.graph.input_types
    k = len(b_types)
    stage = OpValue(if_then_else(condition, step, OpValue(id_graph(b_types))))
    b = GraphBuilder(f"while_unrolled({n};{condition.graph.name};{step.graph.name})")
    state = [b.input(t) for t in b_types]
    for i in range(n):
        outs = b.subgraph(stage.graph, *state)
        if i == n - 1:
            for handle in outs:
                b.output(handle)
        else:
            state = list(b.add(Merge(b_types), *outs))
    return b.build()


def sigma_f(family: OpValue, witness_op: OpValue) -> ConstructionGraph:
    """sigma_F(f): A -> Sigma F"""
    b = GraphBuilder(f"sigma_f({family.graph.name};{witness_op.graph.name})")
    (domain,) = family.graph.input_types
    a = b.input(domain)
    (out,) = b.add(SigmaF(family), b.constant(witness_op), a)
    b.output(out)
    return b.build()


def discard(b: GraphBuilder, kept, dropped):
    """Потребляет объекты dropped узлами const, сохраняя kept"""
    for handle in dropped:
        (kept,) = b.add(Const(b.socket_type(kept), b.socket_type(handle)), kept, handle)
    return kept
