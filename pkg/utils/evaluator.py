"""
Вычисление проверенных графов: узлы срабатывают в топологическом порядке,
каждый произведенный объект потребляется ровно один раз, узлы за
неактивными взаимоисключающими каналами не срабатывают.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

from utils.construction_graph import ConstructionGraph, InputPort, OutputPort
from utils.errors import EvaluationError, TypeMismatchError, UniverseError
from utils.values import INACTIVE, OpValue, fits

logger = logging.getLogger(__name__)

MAX_EVAL_DEPTH = 500


@dataclass(frozen=True)
class EvalResult:
    outputs: tuple
    exclusive: tuple
    fired: tuple
    transfers: int

    def items(self) -> list:
        """Пары (индекс гнезда, объект или INACTIVE)"""
        return list(enumerate(self.outputs))

    def values(self) -> list:
        return [v for v in self.outputs if v is not INACTIVE]

    def is_active(self, index: int) -> bool:
        return self.outputs[index] is not INACTIVE


class EvalContext:
    """Состояние одного вычисления: граница кванторов и глубина вложенности"""

    def __init__(self, bound: Optional[int] = None, max_depth: int = MAX_EVAL_DEPTH):
        self.bound = bound
        self.max_depth = max_depth
        self.depth = 0

    def run(self, graph: ConstructionGraph, args) -> list:
        if self.depth >= self.max_depth:
            raise EvaluationError(f"превышена глубина вложенных вычислений ({self.max_depth})")
        self.depth += 1
        try:
            return list(_execute(graph, list(args), self).outputs)
        finally:
            self.depth -= 1

    def apply(self, op, args) -> list:
        if not isinstance(op, OpValue):
            raise TypeMismatchError(f"ожидалась операция, получено: {op!r}")
        return self.run(op.graph, args)


def _execute(graph: ConstructionGraph, inputs: list, ctx: EvalContext) -> EvalResult:
    if len(inputs) != len(graph.inputs):
        raise EvaluationError(
            f"граф '{graph.name}' ожидает {len(graph.inputs)} входов, передано {len(inputs)}"
        )
    order, feeds = graph.plan
    produced = {}
    outputs = [INACTIVE] * len(graph.outputs)
    fired = []
    transfers = 0

    for node in order:
        args = []
        for i, socket_type in enumerate(node.in_sockets):
            source = feeds.get((node.id, i))
            if source is None or source not in produced:
                raise EvaluationError(f"вход {node.id}[{i}] графа '{graph.name}' не получил объект")
            value = produced.pop(source)
            transfers += 1
            if not fits(value, socket_type):
                raise TypeMismatchError(f"{node.id}[{i}]: объект {value} не имеет типа {socket_type}")
            args.append(value)

        kind = node.kind
        if isinstance(kind, InputPort):
            value = inputs[kind.index]
            if not fits(value, kind.type):
                raise TypeMismatchError(f"вход #{kind.index}: объект {value} не имеет типа {kind.type}")
            results = [value]
        elif isinstance(kind, OutputPort):
            outputs[kind.index] = args[0]
            continue
        elif not kind.accepts_inactive and any(a is INACTIVE for a in args):
            results = [INACTIVE] * len(node.out_sockets)
        else:
            try:
                results = kind.fire(args, ctx)
            except UniverseError:
                raise
            except Exception as e:
                raise EvaluationError(f"ошибка в узле '{node.id}' ({kind.name}): {e}") from e
            if len(results) != len(node.out_sockets):
                raise EvaluationError(f"узел '{node.id}' вернул {len(results)} объектов вместо {len(node.out_sockets)}")
            for i, (value, socket_type) in enumerate(zip(results, node.out_sockets)):
                if not fits(value, socket_type):
                    raise TypeMismatchError(f"{node.id} выход {i}: объект {value} не имеет типа {socket_type}")
            fired.append(node.id)

        for i, value in enumerate(results):
            produced[(node.id, i)] = value

    if produced:
        leftover = ", ".join(f"{n}[{i}]" for n, i in produced)
        raise EvaluationError(f"объекты не были потреблены: {leftover}")

    return EvalResult(
        outputs=tuple(outputs),
        exclusive=graph.exclusive_outputs,
        fired=tuple(fired),
        transfers=transfers,
    )


def evaluate(graph: ConstructionGraph, inputs, bound: Optional[int] = None) -> EvalResult:
    """Вычисление графа на входных объектах"""
    ctx = EvalContext(bound=bound)
    result = _execute(graph, list(inputs), ctx)
    logger.debug("Граф '%s' вычислен: %d узлов сработало", graph.name, len(result.fired))
    return result


def evaluate_op_value(f, args, bound: Optional[int] = None) -> list:
    """Применение операции-значения к списку аргументов"""
    return EvalContext(bound=bound).apply(f, list(args))


def apply_value(f, *args, bound: Optional[int] = None):
    """Применение операции с единственным активным выходом"""
    outputs = [v for v in evaluate_op_value(f, args, bound=bound) if v is not INACTIVE]
    if len(outputs) != 1:
        raise EvaluationError(f"операция '{f.graph.name}' вернула {len(outputs)} активных объектов")
    return outputs[0]


def extensionally_equal(f: ConstructionGraph, g: ConstructionGraph, samples, bound: Optional[int] = None) -> bool:
    """Поточечное сравнение двух графов на наборе входов"""
    for args in samples:
        if evaluate(f, args, bound=bound).outputs != evaluate(g, args, bound=bound).outputs:
            return False
    return True
