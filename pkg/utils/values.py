"""
Объекты времени выполнения: натуральные числа (унарные), пары,
помеченные объединения, операции-значения, типы-значения,
свидетельства отношений и объекты Continuum.
"""
from __future__ import annotations

import copy
from dataclasses import dataclass
from enum import Enum
from typing import Any

from utils.errors import InvalidTypeError, TypeMismatchError
from utils.type_system import (
    Arrow, ContinuumType, Fiber, NAT, CONTINUUM, NatType, Product, Sigma, Sum,
    TypeExpr, TypesLevel, is_relational, level_of,
)


class Side(Enum):
    LEFT = "left"
    RIGHT = "right"


@dataclass(frozen=True)
class NatValue:
    count: int

    def __post_init__(self):
        if not isinstance(self.count, int) or isinstance(self.count, bool) or self.count < 1:
            raise InvalidTypeError(f"натуральное число должно быть >= 1: {self.count!r}")

    def __str__(self):
        return str(self.count)


@dataclass(frozen=True)
class PairValue:
    left: Any
    right: Any


@dataclass(frozen=True)
class Tagged:
    side: Side
    payload: Any
    sum_type: Sum


@dataclass(frozen=True)
class OpValue:
    graph: Any

    def __str__(self):
        return f"<op {self.graph.name}>"


@dataclass(frozen=True)
class TypeValue:
    type_expr: TypeExpr

    def __str__(self):
        return str(self.type_expr)


@dataclass(frozen=True)
class Witness:
    """
    Свидетельство (объект реляционного типа) с записью вывода:
    rule - правило или имя аксиомы, claim - доказываемый тип,
    premises - под-свидетельства, data - числовые параметры шага.
    """
    rule: str
    claim: TypeExpr
    premises: tuple = ()
    data: tuple = ()

    def __str__(self):
        return f"<witness {self.rule}: {self.claim}>"


@dataclass(frozen=True)
class ContinuumValue:
    complex: Any


class _Inactive:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INACTIVE"

    def __deepcopy__(self, memo):
        return self


INACTIVE = _Inactive()


def nat(n: int) -> NatValue:
    return NatValue(n)


def type_of(value) -> TypeExpr:
    """Тип объекта"""
    if isinstance(value, NatValue):
        return NAT
    if isinstance(value, PairValue):
        return Product(type_of(value.left), type_of(value.right))
    if isinstance(value, Tagged):
        return value.sum_type
    if isinstance(value, OpValue):
        return value.graph.signature
    if isinstance(value, TypeValue):
        return TypesLevel(level_of(value.type_expr))
    if isinstance(value, Witness):
        return value.claim
    if isinstance(value, ContinuumValue):
        return CONTINUUM
    raise TypeMismatchError(f"неизвестный объект: {value!r}")


def fits(value, t: TypeExpr) -> bool:
    """Может ли объект быть передан в гнездо типа t"""
    if value is INACTIVE:
        return True
    if isinstance(t, Fiber):
        return isinstance(value, Witness)
    if isinstance(value, Witness):
        return is_relational(t) and value.claim == t
    if isinstance(value, NatValue):
        return isinstance(t, NatType)
    if isinstance(value, PairValue):
        if isinstance(t, Product):
            return fits(value.left, t.left) and fits(value.right, t.right)
        if isinstance(t, Sigma):
            domain = t.family.graph.input_types
            return len(domain) == 1 and fits(value.left, domain[0]) and isinstance(value.right, Witness)
        return False
    if isinstance(value, Tagged):
        if not isinstance(t, Sum) or value.sum_type != t:
            return False
        side_type = t.left if value.side is Side.LEFT else t.right
        return fits(value.payload, side_type)
    if isinstance(value, OpValue):
        return isinstance(t, Arrow) and value.graph.signature == t
    if isinstance(value, TypeValue):
        return isinstance(t, TypesLevel) and level_of(value.type_expr) <= t.n
    if isinstance(value, ContinuumValue):
        return isinstance(t, ContinuumType)
    return False


def copy_value(value):
    """Копия объекта: равна оригиналу, но является другим объектом"""
    return copy.deepcopy(value)
