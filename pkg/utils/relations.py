"""
Отношения как типы над натуральными числами.

Тип отношения населен тогда и только тогда, когда отношение истинно.
Атомы решаются процедурой N, составные типы - по компонентам, кванторы -
только при явной границе. Для пустого типа возвращается свидетельство
его дополнения (отрицание обосновано дополнением).
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Callable, ClassVar, Optional

from utils.construction_graph import GraphBuilder, curry_transform, permute_inputs
from utils.errors import InvalidTypeError, NotRelationalError, TypeMismatchError, WitnessError
from utils.evaluator import evaluate_op_value
from utils.primitive_ops import Apply, Copy, PrimitiveKind, Succ, TypeConstructor
from utils.syntax import Quantified, format_relation, free_holes, parse_relation
from utils.type_system import (
    Arrow, Fiber, Hole, NAT, Neg, Pi, Product, RelAtom, RelKind, Sigma, Sum, TypeExpr, TypesLevel,
    is_relational,
)
from utils.values import NatValue, OpValue, TypeValue, Witness

logger = logging.getLogger(__name__)

DEFAULT_BOUND = 10

# Синонимы из грамматики отношений
Conj = Product
Disj = Sum


class Status(Enum):
    INHABITED = "inhabited"
    EMPTY = "empty"
    UNDECIDABLE = "undecidable"


@dataclass(frozen=True)
class Verdict:
    """
    Результат проверки типа отношения. Для INHABITED witness - объект
    самого типа, для EMPTY - объект его дополнения negate(t).
    """
    status: Status
    witness: Optional[Witness] = None

    @property
    def inhabited(self) -> bool:
        return self.status is Status.INHABITED


@dataclass(frozen=True)
class Trichotomy:
    outcome: RelKind
    witness: Witness


def procedure_n(n: int, k: int) -> Trichotomy:
    """
    Процедура N: из двух каналов по одному удаляются единичные сигналы,
    пока один из каналов не опустеет. Пусты оба - Equal, непуст первый -
    Greater, иначе Lesser.
    """
    n, k = int(n), int(k)
    if n < 1 or k < 1:
        raise InvalidTypeError(f"процедура N определена для натуральных чисел: ({n}; {k})")
    rounds = min(n, k)
    left, right = n - rounds, k - rounds
    if left == 0 and right == 0:
        outcome = RelKind.EQUAL
    elif left > 0:
        outcome = RelKind.GREATER
    else:
        outcome = RelKind.LESSER
    witness = Witness("procedure_n", RelAtom(outcome, n, k), data=(n, k, rounds))
    return Trichotomy(outcome, witness)


def equal(n, k) -> RelAtom:
    return RelAtom(RelKind.EQUAL, n, k)


def lesser(n, k) -> RelAtom:
    return RelAtom(RelKind.LESSER, n, k)


def greater(n, k) -> RelAtom:
    return RelAtom(RelKind.GREATER, n, k)


def fold_sum(types) -> TypeExpr:
    types = tuple(types)
    if not types:
        raise InvalidTypeError("пустой список типов")
    result = types[-1]
    for t in reversed(types[:-1]):
        result = Sum(t, result)
    return result


def fold_conj(types) -> TypeExpr:
    types = tuple(types)
    if not types:
        raise InvalidTypeError("пустой список типов")
    result = types[-1]
    for t in reversed(types[:-1]):
        result = Product(t, result)
    return result


# --- Отрицание ---

_COMPLEMENT = {
    RelKind.EQUAL: (RelKind.GREATER, RelKind.LESSER),
    RelKind.GREATER: (RelKind.EQUAL, RelKind.LESSER),
    RelKind.LESSER: (RelKind.EQUAL, RelKind.GREATER),
}


def negate(t: TypeExpr) -> TypeExpr:
    """Структурное дополнение типа отношения"""
    if isinstance(t, RelAtom):
        first, second = _COMPLEMENT[t.kind]
        return Sum(RelAtom(first, t.lhs, t.rhs), RelAtom(second, t.lhs, t.rhs))
    if isinstance(t, Product) and is_relational(t):
        return Sum(negate(t.left), negate(t.right))
    if isinstance(t, Sum) and is_relational(t):
        return Product(negate(t.left), negate(t.right))
    if isinstance(t, Neg):
        return t.body
    if isinstance(t, Pi):
        return Sigma(negated_family(t.family), t.bound)
    if isinstance(t, Sigma):
        return Pi(negated_family(t.family), t.bound)
    raise NotRelationalError(f"отрицание не определено для типа {t}")


@dataclass(frozen=True)
class Negation(PrimitiveKind):
    """not: Types^k -> Types^k"""
    name: ClassVar[str] = "neg"
    PARAMS: ClassVar[dict] = {"level": "int"}
    level: int = 1

    def signature(self):
        t = TypesLevel(self.level)
        return (t,), (t,)

    def fire(self, args, ctx):
        return [TypeValue(Neg(args[0].type_expr))]


def negated_family(family: OpValue) -> OpValue:
    """Семейство a -> not F(a)"""
    graph = family.graph
    (level,) = graph.output_types
    b = GraphBuilder(f"not({graph.name})")
    (t,) = b.subgraph(graph, *[b.input(x) for x in graph.input_types])
    (out,) = b.add(Negation(level.n), t)
    b.output(out)
    return OpValue(b.build())


def instantiate_family(family: OpValue, *args) -> TypeExpr:
    """Тип F(a1; ...; ak)"""
    values = [NatValue(a) if isinstance(a, int) else a for a in args]
    (type_value,) = evaluate_op_value(family, values)
    if not isinstance(type_value, TypeValue):
        raise TypeMismatchError(f"семейство '{family.graph.name}' вернуло не тип: {type_value!r}")
    return type_value.type_expr


# --- Проверка ---

def _inject(side: str, claim: TypeExpr, premise: Witness) -> Witness:
    return Witness(side, claim, (premise,))


def _eval_atom(t: RelAtom) -> Verdict:
    if not t.is_concrete:
        raise InvalidTypeError(f"атом {t} содержит незаполненные параметры")
    trichotomy = procedure_n(t.lhs, t.rhs)
    if trichotomy.outcome is t.kind:
        return Verdict(Status.INHABITED, trichotomy.witness)
    complement = negate(t)
    side = "inl" if complement.left.kind is trichotomy.outcome else "inr"
    return Verdict(Status.EMPTY, _inject(side, complement, trichotomy.witness))


def _quantifier_range(t, bound: Optional[int]) -> Optional[range]:
    limit = t.bound if t.bound is not None else bound
    if limit is None or t.family.graph.input_types != (NAT,):
        return None
    return range(1, limit + 1)


def eval_relational(t: TypeExpr, bound: Optional[int] = None) -> Verdict:
    """
    Решение типа отношения. Кванторы без собственной границы проверяются
    на 1..bound; при bound=None они неразрешимы.
    """
    if isinstance(t, RelAtom):
        return _eval_atom(t)

    if isinstance(t, Product) and is_relational(t):
        left, right = eval_relational(t.left, bound), eval_relational(t.right, bound)
        if left.inhabited and right.inhabited:
            return Verdict(Status.INHABITED, Witness("pair", t, (left.witness, right.witness)))
        for side, verdict in (("inl", left), ("inr", right)):
            if verdict.status is Status.EMPTY:
                return Verdict(Status.EMPTY, _inject(side, negate(t), verdict.witness))
        return Verdict(Status.UNDECIDABLE)

    if isinstance(t, Sum) and is_relational(t):
        left = eval_relational(t.left, bound)
        if left.inhabited:
            return Verdict(Status.INHABITED, _inject("inl", t, left.witness))
        right = eval_relational(t.right, bound)
        if right.inhabited:
            return Verdict(Status.INHABITED, _inject("inr", t, right.witness))
        if left.status is Status.EMPTY and right.status is Status.EMPTY:
            return Verdict(Status.EMPTY, Witness("pair", negate(t), (left.witness, right.witness)))
        return Verdict(Status.UNDECIDABLE)

    if isinstance(t, Neg):
        inner = eval_relational(t.body, bound)
        if inner.status is Status.EMPTY:
            return Verdict(Status.INHABITED, Witness("complement", t, (inner.witness,)))
        if inner.inhabited:
            return Verdict(Status.EMPTY, inner.witness)
        return Verdict(Status.UNDECIDABLE)

    if isinstance(t, (Pi, Sigma)):
        domain = _quantifier_range(t, bound)
        if domain is None:
            logger.debug("Квантор %s без границы: неразрешим", t)
            return Verdict(Status.UNDECIDABLE)
        return _eval_pi(t, domain, bound) if isinstance(t, Pi) else _eval_sigma(t, domain, bound)

    raise NotRelationalError(f"тип {t} не является типом отношения")


def _refuted(instance: TypeExpr, verdict: Verdict) -> Witness:
    """Свидетельство not F(i) для опровергнутого члена семейства"""
    return Witness("complement", Neg(instance), (verdict.witness,))


def _eval_pi(t: Pi, domain: range, bound: Optional[int]) -> Verdict:
    premises = []
    undecided = False
    for i in domain:
        instance = instantiate_family(t.family, i)
        verdict = eval_relational(instance, bound)
        if verdict.status is Status.EMPTY:
            refuted = _refuted(instance, verdict)
            return Verdict(Status.EMPTY, Witness("sigma_intro", negate(t), (refuted,), data=(i,)))
        undecided = undecided or verdict.status is Status.UNDECIDABLE
        premises.append(verdict.witness)
    if undecided:
        return Verdict(Status.UNDECIDABLE)
    return Verdict(Status.INHABITED, Witness("pi_bounded", t, tuple(premises), data=(len(domain),)))


def _eval_sigma(t: Sigma, domain: range, bound: Optional[int]) -> Verdict:
    refutations = []
    undecided = False
    for i in domain:
        instance = instantiate_family(t.family, i)
        verdict = eval_relational(instance, bound)
        if verdict.inhabited:
            return Verdict(Status.INHABITED, Witness("sigma_intro", t, (verdict.witness,), data=(i,)))
        undecided = undecided or verdict.status is Status.UNDECIDABLE
        if verdict.status is Status.EMPTY:
            refutations.append(_refuted(instance, verdict))
    if undecided:
        return Verdict(Status.UNDECIDABLE)
    return Verdict(Status.EMPTY, Witness("pi_bounded", negate(t), tuple(refutations), data=(len(domain),)))


def equiv_type(t1: TypeExpr, t2: TypeExpr) -> TypeExpr:
    """(not t1 + t2) x (not t2 + t1)"""
    return Product(Sum(Neg(t1), t2), Sum(Neg(t2), t1))


# --- Аксиомы ---

@dataclass(frozen=True)
class Axiom:
    name: str
    arity: int
    claim: Callable
    description: str


def _implies(premise: TypeExpr, conclusion: TypeExpr) -> TypeExpr:
    return Sum(Neg(premise), conclusion)


AXIOMS = {axiom.name: axiom for axiom in (
    Axiom("trichotomy", 2, lambda n, k: Sum(equal(n, k), Sum(greater(n, k), lesser(n, k))),
          "отношения Equal, Greater, Lesser вместе полны"),
    Axiom("disjoint_equal_greater", 2, lambda n, k: Neg(Product(equal(n, k), greater(n, k))),
          "Equal и Greater не пересекаются"),
    Axiom("disjoint_equal_lesser", 2, lambda n, k: Neg(Product(equal(n, k), lesser(n, k))),
          "Equal и Lesser не пересекаются"),
    Axiom("disjoint_greater_lesser", 2, lambda n, k: Neg(Product(greater(n, k), lesser(n, k))),
          "Greater и Lesser не пересекаются"),
    Axiom("equal_refl", 1, lambda n: equal(n, n), "Equal(n; n)"),
    Axiom("equal_symm", 2, lambda n, k: _implies(equal(n, k), equal(k, n)), "симметрия Equal"),
    Axiom("equal_trans", 3, lambda a, b, c: _implies(Product(equal(a, b), equal(b, c)), equal(a, c)),
          "транзитивность Equal"),
    Axiom("greater_lesser_swap", 2, lambda n, k: equiv_type(greater(n, k), lesser(k, n)),
          "Greater(n; k) эквивалентно Lesser(k; n)"),
    Axiom("pred_succ", 1, lambda n: equal(n, max(1, n + 1 - 1)), "Equal(n; Pred(Succ(n)))"),
    Axiom("succ_equal", 2, lambda n, k: _implies(equal(n, k), equal(n + 1, k + 1)), "Succ сохраняет Equal"),
    Axiom("succ_greater_cong", 2, lambda n, k: _implies(greater(n, k), greater(n + 1, k + 1)),
          "Succ сохраняет Greater"),
    Axiom("succ_greater", 1, lambda n: greater(n + 1, n), "Greater(Succ(n); n)"),
    Axiom("succ_greater_pred", 1, lambda n: greater(n + 1, max(1, n)), "Greater(Succ(n); Pred(Succ(n)))"),
    Axiom("subst_greater", 3, lambda a, b, c: _implies(Product(equal(a, b), greater(b, c)), greater(a, c)),
          "подстановка равных в Greater"),
    Axiom("subst_lesser", 3, lambda a, b, c: _implies(Product(equal(a, b), lesser(b, c)), lesser(a, c)),
          "подстановка равных в Lesser"),
)}


def axiom_witness(name: str, *args: int) -> Witness:
    """Примитивный объект аксиомы для конкретных аргументов"""
    if name not in AXIOMS:
        raise WitnessError(f"неизвестная аксиома: {name}")
    axiom = AXIOMS[name]
    if len(args) != axiom.arity:
        raise WitnessError(f"аксиома {name} принимает {axiom.arity} аргументов")
    return Witness("axiom", axiom.claim(*args), data=(name,) + tuple(args))


@dataclass(frozen=True)
class AxiomClaim(PrimitiveKind):
    """Семейство аксиомы: (N; ...) -> Types1"""
    name: ClassVar[str] = "axiom_claim"
    PARAMS: ClassVar[dict] = {"axiom": "str"}
    axiom: str

    def signature(self):
        return (NAT,) * AXIOMS[self.axiom].arity, (TypesLevel(1),)

    def fire(self, args, ctx):
        return [TypeValue(AXIOMS[self.axiom].claim(*(a.count for a in args)))]


def axiom_family(name: str) -> OpValue:
    from utils.primitive_ops import primitive_graph

    return OpValue(primitive_graph(AxiomClaim(name), name=f"{name}_claim"))


@dataclass(frozen=True)
class AxiomObject(PrimitiveKind):
    """
    Примитивный объект семейства аксиомы. family задает семейство, под
    которым объект виден в сигнатуре (по умолчанию - собственное).
    """
    name: ClassVar[str] = "axiom"
    PARAMS: ClassVar[dict] = {"axiom": "str", "family": "op"}
    axiom: str
    family: Optional[OpValue] = None

    def signature(self):
        if self.axiom not in AXIOMS:
            raise InvalidTypeError(f"неизвестная аксиома: {self.axiom}")
        family = self.family or axiom_family(self.axiom)
        return (NAT,) * AXIOMS[self.axiom].arity, (Fiber(family),)

    def fire(self, args, ctx):
        return [axiom_witness(self.axiom, *(a.count for a in args))]


def check_witness(t: TypeExpr, w) -> bool:
    """Структурная проверка вывода свидетельства типа t"""
    try:
        _check(t, w)
        return True
    except (WitnessError, InvalidTypeError, NotRelationalError, TypeMismatchError) as e:
        logger.debug("Свидетельство отклонено: %s", e)
        return False


def _premises(w: Witness, count: int) -> tuple:
    if len(w.premises) != count:
        raise WitnessError(f"правило {w.rule}: ожидалось {count} посылок, получено {len(w.premises)}")
    return w.premises


def _check(t: TypeExpr, w) -> None:
    if not isinstance(w, Witness):
        raise WitnessError(f"объект {w!r} не является свидетельством")
    if w.claim != t:
        raise WitnessError(f"свидетельство доказывает {w.claim}, а не {t}")

    if w.rule == "axiom":
        name, *args = w.data
        if axiom_witness(name, *args).claim != t:
            raise WitnessError(f"аксиома {name} не дает {t}")
    elif w.rule == "procedure_n":
        n, k, rounds = w.data
        if not isinstance(t, RelAtom) or (t.lhs, t.rhs) != (n, k) or rounds != min(n, k):
            raise WitnessError(f"запись процедуры N не соответствует {t}")
        if procedure_n(n, k).outcome is not t.kind:
            raise WitnessError(f"процедура N опровергает {t}")
    elif w.rule == "pair":
        if not isinstance(t, Product):
            raise WitnessError(f"пара не является свидетельством {t}")
        left, right = _premises(w, 2)
        _check(t.left, left)
        _check(t.right, right)
    elif w.rule in ("inl", "inr"):
        if not isinstance(t, Sum):
            raise WitnessError(f"инъекция не является свидетельством {t}")
        (premise,) = _premises(w, 1)
        _check(t.left if w.rule == "inl" else t.right, premise)
    elif w.rule == "complement":
        if not isinstance(t, Neg):
            raise WitnessError(f"дополнение не является свидетельством {t}")
        (premise,) = _premises(w, 1)
        _check(negate(t.body), premise)
    elif w.rule == "pi_bounded":
        if not isinstance(t, Pi):
            raise WitnessError(f"ограниченная функция не является свидетельством {t}")
        (limit,) = w.data
        if t.bound is not None and limit != t.bound:
            raise WitnessError(f"граница {limit} не совпадает с границей типа {t.bound}")
        for i, premise in enumerate(_premises(w, limit), start=1):
            _check(instantiate_family(t.family, i), premise)
    elif w.rule == "sigma_intro":
        if not isinstance(t, Sigma):
            raise WitnessError(f"пара (n; w) не является свидетельством {t}")
        (i,) = w.data
        if t.bound is not None and not 1 <= i <= t.bound:
            raise WitnessError(f"точка {i} вне границы {t.bound}")
        (premise,) = _premises(w, 1)
        _check(instantiate_family(t.family, i), premise)
    else:
        raise WitnessError(f"неизвестное правило вывода: {w.rule}")


# --- Отношения как узлы графов ---

@dataclass(frozen=True)
class RelationAtom(PrimitiveKind):
    """Equal_N, Lesser_N, Greater_N: (N; N) -> Types1"""
    PARAMS: ClassVar[dict] = {}
    KIND_NAMES: ClassVar[dict] = {RelKind.EQUAL: "equal", RelKind.LESSER: "lesser", RelKind.GREATER: "greater"}
    kind: RelKind

    @property
    def name(self) -> str:
        return self.KIND_NAMES[self.kind]

    def signature(self):
        return (NAT, NAT), (TypesLevel(1),)

    def fire(self, args, ctx):
        return [TypeValue(RelAtom(self.kind, args[0].count, args[1].count))]


@dataclass(frozen=True)
class Quantifier(PrimitiveKind):
    """pi/sigma: (A -> Types^k) -> Types^(k+1)"""
    PARAMS: ClassVar[dict] = {"domain": "type", "level": "int", "bound": "int"}
    which: str
    domain: TypeExpr = NAT
    level: int = 1
    bound: Optional[int] = None

    @property
    def name(self) -> str:
        return self.which

    def signature(self):
        if self.which not in ("pi", "sigma"):
            raise InvalidTypeError(f"неизвестный квантор: {self.which}")
        family = Arrow((self.domain,), (TypesLevel(self.level),))
        return (family,), (TypesLevel(self.level + 1),)

    def fire(self, args, ctx):
        cls = Pi if self.which == "pi" else Sigma
        return [TypeValue(cls(args[0], self.bound))]


def window_type(which: str, relation: OpValue, k: int, n: int, apply=None) -> TypeExpr:
    """R(k) + ... + R(k+n-1) для l_plus, произведение для l_times"""
    if which not in ("l_plus", "l_times"):
        raise InvalidTypeError(f"неизвестное окно: {which}")
    if k < 1 or n < 1:
        raise InvalidTypeError(f"окно ({k}; {n}) должно начинаться с натурального числа")
    if apply is None:
        terms = [instantiate_family(relation, i) for i in range(k, k + n)]
    else:
        terms = [apply(relation, [NatValue(i)])[0].type_expr for i in range(k, k + n)]
    return fold_sum(terms) if which == "l_plus" else fold_conj(terms)


@dataclass(frozen=True)
class Window(PrimitiveKind):
    """L+ и Lx: (N -> Types^k; k; n) -> Types^k"""
    PARAMS: ClassVar[dict] = {"level": "int"}
    which: str
    level: int = 1

    @property
    def name(self) -> str:
        return self.which

    def signature(self):
        t = TypesLevel(self.level)
        return (Arrow((NAT,), (t,)), NAT, NAT), (t,)

    def fire(self, args, ctx):
        relation, k, n = args
        return [TypeValue(window_type(self.which, relation, k.count, n.count, apply=ctx.apply))]


def template_level(template) -> int:
    if isinstance(template, RelAtom):
        return 1
    if isinstance(template, (Product, Sum)):
        return max(template_level(template.left), template_level(template.right))
    if isinstance(template, Neg):
        return template_level(template.body)
    if isinstance(template, Quantified):
        return template_level(template.body) + 1
    raise NotRelationalError(f"не является шаблоном отношения: {template!r}")


def instantiate(template, values: dict) -> TypeExpr:
    """Подстановка чисел вместо параметров шаблона"""
    if isinstance(template, RelAtom):
        lhs, rhs = (values.get(s.index, s) if isinstance(s, Hole) else s for s in (template.lhs, template.rhs))
        return RelAtom(template.kind, lhs, rhs)
    if isinstance(template, Product):
        return Product(instantiate(template.left, values), instantiate(template.right, values))
    if isinstance(template, Sum):
        return Sum(instantiate(template.left, values), instantiate(template.right, values))
    if isinstance(template, Neg):
        return Neg(instantiate(template.body, values))
    if isinstance(template, Quantified):
        family = template_graph(template.body, (template.index,), values, name=template.var)
        cls = Pi if template.which == "pi" else Sigma
        return cls(OpValue(family), template.bound)
    raise NotRelationalError(f"не является шаблоном отношения: {template!r}")


@dataclass(frozen=True)
class RelationTemplate(PrimitiveKind):
    """rel: шаблон отношения, параметры которого - входы узла"""
    name: ClassVar[str] = "rel"
    template: object
    holes: tuple
    env: tuple = ()

    def signature(self):
        return (NAT,) * len(self.holes), (TypesLevel(template_level(self.template)),)

    def fire(self, args, ctx):
        values = dict(self.env)
        values.update((h, a.count) for h, a in zip(self.holes, args))
        return [TypeValue(instantiate(self.template, values))]


def template_graph(template, holes, env: Optional[dict] = None, name: Optional[str] = None):
    env = tuple(sorted((env or {}).items()))
    kind = RelationTemplate(template, tuple(holes), env)
    label = format_relation(template)
    if name is not None:
        label = f"{name}:{label}"
    b = GraphBuilder(f"rel({label})" if not env else f"rel({label})[{','.join(f'{h}={v}' for h, v in env)}]")
    for handle in b.add(kind, *[b.input(NAT) for _ in holes]):
        b.output(handle)
    return b.build()


def relation(text: str) -> OpValue:
    """Отношение из текстового шаблона; входы - параметры _1, _2, ... по возрастанию"""
    template = parse_relation(text)
    holes = free_holes(template)
    if not holes:
        raise InvalidTypeError(f"шаблон '{text}' не имеет параметров")
    return OpValue(template_graph(template, holes))


def atom_relation(kind: RelKind) -> OpValue:
    from utils.primitive_ops import primitive_graph

    return OpValue(primitive_graph(RelationAtom(kind)))


# --- Комбинаторы условий ---

def _level(op: OpValue) -> TypesLevel:
    outputs = op.graph.output_types
    if len(outputs) != 1 or not isinstance(outputs[0], TypesLevel):
        raise TypeMismatchError(f"'{op.graph.name}' не является отношением")
    return outputs[0]


def equiv_build(r1: OpValue, r2: OpValue) -> OpValue:
    """Equiv_D(R1; R2)(a) = (not R1(a) + R2(a)) x (not R2(a) + R1(a))"""
    g1, g2 = r1.graph, r2.graph
    if g1.input_types != g2.input_types:
        raise TypeMismatchError("Equiv: отношения должны иметь одинаковые входы")
    level = _level(r1)
    if _level(r2) != level:
        raise TypeMismatchError("Equiv: отношения должны быть одного уровня")
    b = GraphBuilder(f"equiv({g1.name};{g2.name})")
    first, second = [], []
    for t in g1.input_types:
        a, a_copy = b.add(Copy(t), b.input(t))
        first.append(a)
        second.append(a_copy)
    (t1,) = b.subgraph(g1, *first)
    (t2,) = b.subgraph(g2, *second)
    t1, t1_copy = b.add(Copy(level), t1)
    t2, t2_copy = b.add(Copy(level), t2)
    (not1,) = b.add(Negation(level.n), t1)
    (not2,) = b.add(Negation(level.n), t2_copy)
    (forward,) = b.add(TypeConstructor("+", level.n), not1, t2)
    (backward,) = b.add(TypeConstructor("+", level.n), not2, t1_copy)
    (out,) = b.add(TypeConstructor("x", level.n), forward, backward)
    b.output(out)
    return OpValue(b.build())


def lem_build(r: OpValue) -> OpValue:
    """LEM(R)(a) = R(a) + not R(a)"""
    level = _level(r)
    b = GraphBuilder(f"lem({r.graph.name})")
    (t,) = b.subgraph(r.graph, *[b.input(x) for x in r.graph.input_types])
    t, t_copy = b.add(Copy(level), t)
    (negated,) = b.add(Negation(level.n), t_copy)
    (out,) = b.add(TypeConstructor("+", level.n), t, negated)
    b.output(out)
    return OpValue(b.build())


def q_plus(r1: OpValue, r2: OpValue) -> OpValue:
    """Q+(R1; R2)(i) = R1(i+1) + R2(i)"""
    level = _level(r1)
    if r1.graph.input_types != (NAT,) or r2.graph.input_types != (NAT,) or _level(r2) != level:
        raise TypeMismatchError("Q+: оба отношения должны иметь тип N -> Types^k одного уровня")
    b = GraphBuilder(f"q_plus({r1.graph.name};{r2.graph.name})")
    i, i_copy = b.add(Copy(NAT), b.input(NAT))
    (next_i,) = b.add(Succ(), i)
    (t1,) = b.subgraph(r1.graph, next_i)
    (t2,) = b.subgraph(r2.graph, i_copy)
    (out,) = b.add(TypeConstructor("+", level.n), t1, t2)
    b.output(out)
    return OpValue(b.build())


def _window_graph(which: str, r: OpValue, k: int) -> OpValue:
    level = _level(r)
    if r.graph.input_types != (NAT,):
        raise TypeMismatchError(f"{which}: отношение должно иметь тип N -> Types^k")
    if k < 1:
        raise InvalidTypeError(f"{which}: начало окна должно быть >= 1")
    b = GraphBuilder(f"{which}({r.graph.name};{k})")
    n = b.input(NAT)
    (out,) = b.add(Window(which, level.n), b.constant(r), b.constant(NatValue(k)), n)
    b.output(out)
    return OpValue(b.build())


def l_plus(r: OpValue, k: int) -> OpValue:
    """L+(R; k)(n): R(k) + ... + R(k+n-1)"""
    return _window_graph("l_plus", r, k)


def l_times(r: OpValue, k: int) -> OpValue:
    """Lx(R; k)(n): R(k) x ... x R(k+n-1)"""
    return _window_graph("l_times", r, k)


def nested_quantifier_compose(r: OpValue) -> OpValue:
    """
    P(n)(k) = (R(1;1) x ... x R(1;k)) + ... + (R(n;1) x ... x R(n;k)).
    H(i; k) = Lx(R(i; *); 1)(k), затем перестановка входов H, каррирование,
    L+ по i и каррирование результата.
    """
    graph = r.graph
    if graph.input_types != (NAT, NAT):
        raise TypeMismatchError("P: отношение должно иметь тип (N; N) -> Types^k")
    level = _level(r)
    row_family = Arrow((NAT,), (level,))

    h = GraphBuilder(f"rows({graph.name})")
    i, k = h.input(NAT), h.input(NAT)
    (row,) = h.add(Apply(graph.signature, 1), h.constant(r), i)
    (out,) = h.add(Window("l_times", level.n), row, h.constant(NatValue(1)), k)
    h.output(out)
    rows = curry_transform(permute_inputs(h.build(), (1, 0)), 1)

    p = GraphBuilder(f"P({graph.name})")
    n, k = p.input(NAT), p.input(NAT)
    (family,) = p.subgraph(rows, k)
    if p.socket_type(family) != row_family:
        raise TypeMismatchError("P: неожиданный тип семейства строк")
    (out,) = p.add(Window("l_plus", level.n), family, p.constant(NatValue(1)), n)
    p.output(out)
    return OpValue(curry_transform(p.build(), 1))
