"""
Выражения типов: примитивы N и C (Continuum), конструкторы x, +, ->, ||,
иерархия уровней Types^n, реляционные атомы и зависимые типы Pi/Sigma.

Все выражения неизменяемы; равенство структурное.
"""
from __future__ import annotations

import logging
import threading
from dataclasses import dataclass
from enum import Enum
from typing import Any, Iterator, Optional, Union

from utils.errors import InvalidTypeError, LevelError

logger = logging.getLogger(__name__)


class TypeExpr:
    """Базовый класс выражений типов"""

    __slots__ = ()

    def __str__(self):
        return format_type(self)


@dataclass(frozen=True, repr=False)
class NatType(TypeExpr):
    def __repr__(self):
        return "N"


@dataclass(frozen=True, repr=False)
class ContinuumType(TypeExpr):
    def __repr__(self):
        return "C"


NAT = NatType()
CONTINUUM = ContinuumType()


@dataclass(frozen=True)
class Product(TypeExpr):
    left: TypeExpr
    right: TypeExpr


@dataclass(frozen=True)
class Sum(TypeExpr):
    left: TypeExpr
    right: TypeExpr


@dataclass(frozen=True)
class Excl(TypeExpr):
    """Взаимоисключающие выходы: активен ровно один из каналов"""
    left: TypeExpr
    right: TypeExpr


@dataclass(frozen=True)
class Arrow(TypeExpr):
    inputs: tuple
    outputs: tuple

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "outputs", tuple(self.outputs))
        if not self.inputs or not self.outputs:
            raise InvalidTypeError("у операции должен быть хотя бы один вход и один выход")


@dataclass(frozen=True)
class TypesLevel(TypeExpr):
    n: int

    def __post_init__(self):
        if self.n < 0:
            raise InvalidTypeError(f"отрицательный уровень: {self.n}")


class RelKind(Enum):
    EQUAL = "eq"
    LESSER = "lt"
    GREATER = "gt"


@dataclass(frozen=True)
class Hole:
    index: int

    def __str__(self):
        return f"_{self.index}"


Slot = Union[int, Hole]


def _slot(value: Any) -> Slot:
    if isinstance(value, Hole):
        return value
    count = getattr(value, "count", value)
    if not isinstance(count, int) or isinstance(count, bool) or count < 1:
        raise InvalidTypeError(f"аргумент отношения должен быть натуральным числом >= 1: {value!r}")
    return count


@dataclass(frozen=True)
class RelAtom(TypeExpr):
    kind: RelKind
    lhs: Slot
    rhs: Slot

    def __post_init__(self):
        object.__setattr__(self, "lhs", _slot(self.lhs))
        object.__setattr__(self, "rhs", _slot(self.rhs))

    @property
    def is_concrete(self) -> bool:
        return not isinstance(self.lhs, Hole) and not isinstance(self.rhs, Hole)


@dataclass(frozen=True)
class Neg(TypeExpr):
    body: TypeExpr


def _family_output_level(family) -> int:
    graph = getattr(family, "graph", None)
    if graph is None:
        raise InvalidTypeError("семейство типов должно быть операцией")
    outputs = graph.output_types
    if len(outputs) != 1 or not isinstance(outputs[0], TypesLevel):
        raise InvalidTypeError(
            f"семейство '{graph.name}' должно возвращать один объект типа Types^k"
        )
    return outputs[0].n


@dataclass(frozen=True)
class Pi(TypeExpr):
    """Зависимое произведение над семейством; bound=None - по всем N"""
    family: Any
    bound: Optional[int] = None

    def __post_init__(self):
        _family_output_level(self.family)


@dataclass(frozen=True)
class Sigma(TypeExpr):
    family: Any
    bound: Optional[int] = None

    def __post_init__(self):
        _family_output_level(self.family)


@dataclass(frozen=True)
class Fiber(TypeExpr):
    """Тип F(a) для объекта a, пришедшего на вход семейства F"""
    family: Any

    def __post_init__(self):
        _family_output_level(self.family)


def type_equal(a: TypeExpr, b: TypeExpr) -> bool:
    """Структурное равенство типов"""
    return a == b


def level_of(t: TypeExpr) -> int:
    """Наименьший уровень, на котором t является типом"""
    if isinstance(t, (NatType, ContinuumType)):
        return 0
    if isinstance(t, (Product, Sum, Excl)):
        return max(level_of(t.left), level_of(t.right))
    if isinstance(t, Arrow):
        return max(level_of(x) for x in t.inputs + t.outputs)
    if isinstance(t, TypesLevel):
        return t.n + 1
    if isinstance(t, RelAtom):
        return 1
    if isinstance(t, Neg):
        return level_of(t.body)
    if isinstance(t, (Pi, Sigma)):
        return _family_output_level(t.family) + 1
    if isinstance(t, Fiber):
        return _family_output_level(t.family)
    raise InvalidTypeError(f"неизвестное выражение типа: {t!r}")


def is_relational(t: TypeExpr) -> bool:
    """Принадлежит ли тип грамматике отношений (атомы, x, +, not, Pi, Sigma)"""
    if isinstance(t, (RelAtom, Neg, Pi, Sigma, Fiber)):
        return True
    if isinstance(t, (Product, Sum)):
        return is_relational(t.left) and is_relational(t.right)
    return False


def fold_product(types) -> TypeExpr:
    """Правоассоциативная свертка списка типов в произведение"""
    types = tuple(types)
    if not types:
        raise InvalidTypeError("пустой список типов")
    result = types[-1]
    for t in reversed(types[:-1]):
        result = Product(t, result)
    return result


def type_size(t: TypeExpr) -> int:
    """Число конструкторов в типе уровня 0"""
    if isinstance(t, (NatType, ContinuumType)):
        return 0
    if isinstance(t, (Product, Sum)):
        return 1 + type_size(t.left) + type_size(t.right)
    if isinstance(t, Arrow) and len(t.inputs) == 1 and len(t.outputs) == 1:
        return 1 + type_size(t.inputs[0]) + type_size(t.outputs[0])
    raise LevelError(f"тип {t} не входит в перечисление Ind1")


# --- Перечисление Ind1 ---

def _arrow(a, b):
    return Arrow((a,), (b,))


# Порядок конструкторов фиксирован: x, +, ->
_CONSTRUCTORS = (Product, Sum, _arrow)


def _enumerate_level0() -> Iterator[TypeExpr]:
    """Типы уровня 0 по числу конструкторов, затем лексикографически"""
    by_size = [[NAT, CONTINUUM]]
    yield from by_size[0]
    size = 1
    while True:
        current = []
        for ctor in _CONSTRUCTORS:
            for left_size in range(size):
                for left in by_size[left_size]:
                    for right in by_size[size - 1 - left_size]:
                        t = ctor(left, right)
                        current.append(t)
                        yield t
        by_size.append(current)
        size += 1


class _Ind1Table:
    def __init__(self):
        self._lock = threading.Lock()
        self._stream = _enumerate_level0()
        self._items = []
        self._index = {}

    def _pull(self):
        t = next(self._stream)
        self._items.append(t)
        self._index[t] = len(self._items)
        return t

    def at(self, n: int) -> TypeExpr:
        with self._lock:
            while len(self._items) < n:
                self._pull()
            return self._items[n - 1]

    def index_of(self, t: TypeExpr) -> int:
        size = type_size(t)
        with self._lock:
            while t not in self._index:
                if self._items and type_size(self._items[-1]) > size:
                    raise LevelError(f"тип {t} не найден в перечислении")
                self._pull()
            return self._index[t]


_IND1 = _Ind1Table()


def ind1(n: int) -> TypeExpr:
    """n-й тип фиксированного перечисления Ind1 (n >= 1)"""
    if n < 1:
        raise InvalidTypeError(f"индекс Ind1 должен быть >= 1: {n}")
    return _IND1.at(n)


def ind1_index(t: TypeExpr) -> int:
    """Обратная функция к ind1"""
    return _IND1.index_of(t)


def _cantor(x: int, y: int) -> int:
    return (x + y) * (x + y + 1) // 2 + y


def type_code(t: TypeExpr) -> int:
    """Инъективный числовой код типа уровня 0 (на основе спаривания Кантора)"""
    if isinstance(t, NatType):
        return 1
    if isinstance(t, ContinuumType):
        return 2
    if isinstance(t, Product):
        return 3 + 3 * _cantor(type_code(t.left), type_code(t.right))
    if isinstance(t, Sum):
        return 4 + 3 * _cantor(type_code(t.left), type_code(t.right))
    if isinstance(t, Arrow) and len(t.inputs) == 1 and len(t.outputs) == 1:
        return 5 + 3 * _cantor(type_code(t.inputs[0]), type_code(t.outputs[0]))
    raise LevelError(f"тип {t} не имеет кода уровня 0")


# --- Конструкторы уровня 1 ---

_LEVEL1_KINDS = {
    "x": Product, "×": Product,
    "+": Sum,
    "->": _arrow, "→": _arrow,
    "||": Excl,
}


def level1_constructor(kind: str, a: TypeExpr, b: TypeExpr, level: Optional[int] = None) -> TypeExpr:
    """
    Конструктор типа как операция над объектами-типами.
    level=1 - версия x^1, +^1, ->^1: оба аргумента уровня 0.
    """
    if kind not in _LEVEL1_KINDS:
        raise InvalidTypeError(f"неизвестный конструктор типов: {kind}")
    if level is not None:
        for t in (a, b):
            if level_of(t) > level - 1:
                raise LevelError(f"тип {t} выше уровня {level - 1}")
    return _LEVEL1_KINDS[kind](a, b)


def des(t: TypeExpr) -> tuple:
    """Общий деструктор для типов уровня 0"""
    if level_of(t) != 0:
        raise LevelError(f"des определен только для уровня 0, получено: {t}")
    if isinstance(t, (NatType, ContinuumType)):
        return t, t
    if isinstance(t, (Product, Sum, Excl)):
        return t.left, t.right
    if isinstance(t, Arrow):
        return fold_product(t.inputs), fold_product(t.outputs)
    raise InvalidTypeError(f"неизвестное выражение типа: {t!r}")


# --- Текстовый вид ---

def _family_name(family) -> str:
    return getattr(getattr(family, "graph", None), "name", "?")


def format_type(t: TypeExpr) -> str:
    if isinstance(t, NatType):
        return "N"
    if isinstance(t, ContinuumType):
        return "C"
    if isinstance(t, Product):
        return f"({format_type(t.left)} x {format_type(t.right)})"
    if isinstance(t, Sum):
        return f"({format_type(t.left)} + {format_type(t.right)})"
    if isinstance(t, Excl):
        return f"({format_type(t.left)} || {format_type(t.right)})"
    if isinstance(t, Arrow):
        ins = "; ".join(format_type(x) for x in t.inputs)
        outs = "; ".join(format_type(x) for x in t.outputs)
        return f"({ins} -> {outs})"
    if isinstance(t, TypesLevel):
        return f"Types{t.n}"
    if isinstance(t, RelAtom):
        return f"{t.kind.value}({t.lhs};{t.rhs})"
    if isinstance(t, Neg):
        return f"not({format_type(t.body)})"
    if isinstance(t, (Pi, Sigma)):
        name = "pi" if isinstance(t, Pi) else "sigma"
        bound = f"[{t.bound}]" if t.bound is not None else ""
        return f"{name}{bound}({_family_name(t.family)})"
    if isinstance(t, Fiber):
        return f"fiber({_family_name(t.family)})"
    return repr(t)
