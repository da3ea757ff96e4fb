"""
Операции как графы: узлы с типизированными гнездами (socket boards)
и провода одноразового использования.

Линейность: каждое выходное гнездо - источник ровно одного провода,
каждое входное гнездо - цель ровно одного провода.
"""
from __future__ import annotations

import itertools
import logging
from collections import Counter, defaultdict, deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, ClassVar, Optional

import networkx as nx

from utils.errors import GraphCheckError, GraphError, TypeMismatchError
from utils.type_system import Arrow, Excl, TypeExpr, fold_product
from utils.values import OpValue, fits, type_of

logger = logging.getLogger(__name__)

Socket = tuple  # (node id, индекс гнезда)


class NodeKind:
    """Вид узла: определяет сигнатуру гнезд и правило вычисления"""

    name: ClassVar[str] = ""
    accepts_inactive: ClassVar[bool] = False

    def signature(self) -> tuple:
        raise NotImplementedError

    def exclusive_groups(self) -> tuple:
        """Пары групп выходных гнезд, из которых активна ровно одна"""
        return ()

    def fire(self, args: list, ctx) -> list:
        raise NotImplementedError(f"узел '{self.name}' не вычисляется напрямую")


@dataclass(frozen=True)
class InputPort(NodeKind):
    name: ClassVar[str] = "input"
    index: int
    type: TypeExpr

    def signature(self):
        return (), (self.type,)


@dataclass(frozen=True)
class OutputPort(NodeKind):
    name: ClassVar[str] = "output"
    index: int
    type: TypeExpr

    def signature(self):
        return (self.type,), ()


@dataclass(frozen=True)
class Constant(NodeKind):
    """Встроенный объект-константа"""
    name: ClassVar[str] = "constant"
    value: Any
    type: Optional[TypeExpr] = None

    def signature(self):
        return (), (self.type if self.type is not None else type_of(self.value),)

    def fire(self, args, ctx):
        return [self.value]


@dataclass(frozen=True)
class SubGraph(NodeKind):
    name: ClassVar[str] = "graph"
    graph: Any

    def signature(self):
        return self.graph.input_types, self.graph.output_types

    def exclusive_groups(self):
        return self.graph.exclusive_outputs

    def fire(self, args, ctx):
        return ctx.run(self.graph, args)


@dataclass(frozen=True)
class Node:
    id: str
    kind: NodeKind
    in_sockets: tuple
    out_sockets: tuple


def make_node(node_id: str, kind: NodeKind) -> Node:
    ins, outs = kind.signature()
    return Node(node_id, kind, tuple(ins), tuple(outs))


@dataclass(frozen=True)
class Wire:
    source: Socket
    target: Socket


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str

    def __str__(self):
        return f"{self.kind}: {self.message}"


@dataclass(frozen=True)
class ConstructionGraph:
    name: str
    nodes: tuple
    wires: tuple
    inputs: tuple
    outputs: tuple

    @cached_property
    def node_map(self) -> dict:
        return {node.id: node for node in self.nodes}

    @cached_property
    def input_types(self) -> tuple:
        return tuple(self.node_map[i].out_sockets[0] for i in self.inputs)

    @cached_property
    def output_types(self) -> tuple:
        return tuple(self.node_map[o].in_sockets[0] for o in self.outputs)

    @cached_property
    def signature(self) -> Arrow:
        if not self.inputs or not self.outputs:
            raise GraphError(f"у графа '{self.name}' нет входов или выходов - это не операция")
        return Arrow(self.input_types, self.output_types)

    @cached_property
    def plan(self) -> tuple:
        """Топологический порядок узлов и отображение цель -> источник"""
        feeds = {wire.target: wire.source for wire in self.wires}
        position = {node.id: i for i, node in enumerate(self.nodes)}
        downstream = defaultdict(set)
        indegree = {node.id: 0 for node in self.nodes}
        for wire in self.wires:
            src, dst = wire.source[0], wire.target[0]
            if dst not in downstream[src]:
                downstream[src].add(dst)
                indegree[dst] += 1

        queue = deque(node.id for node in self.nodes if indegree[node.id] == 0)
        ordered = []
        while queue:
            node_id = queue.popleft()
            ordered.append(self.node_map[node_id])
            for nxt in sorted(downstream[node_id], key=position.get):
                indegree[nxt] -= 1
                if indegree[nxt] == 0:
                    queue.append(nxt)

        if len(ordered) != len(self.nodes):
            raise GraphError(f"граф '{self.name}' содержит цикл")
        return tuple(ordered), feeds

    @cached_property
    def exclusive_outputs(self) -> tuple:
        """Группы выходов графа, напрямую питаемые взаимоисключающими гнездами"""
        port_of = {}
        for wire in self.wires:
            target = self.node_map.get(wire.target[0])
            if target is not None and isinstance(target.kind, OutputPort):
                port_of[wire.source] = target.kind.index
        groups = []
        for node in self.nodes:
            for group_a, group_b in node.kind.exclusive_groups():
                idx_a = [port_of.get((node.id, s)) for s in group_a]
                idx_b = [port_of.get((node.id, s)) for s in group_b]
                if None not in idx_a and None not in idx_b:
                    groups.append((tuple(idx_a), tuple(idx_b)))
        return tuple(groups)

    def output_contract(self) -> tuple:
        """Типы выходов, где взаимоисключающие группы свернуты в (C || D)"""
        types = self.output_types
        contract = []
        skip = set()
        starts = {min(a + b): (a, b) for a, b in self.exclusive_outputs}
        for i, t in enumerate(types):
            if i in skip:
                continue
            if i in starts:
                a, b = starts[i]
                contract.append(Excl(fold_product(types[j] for j in a),
                                     fold_product(types[j] for j in b)))
                skip.update(a + b)
            else:
                contract.append(t)
        return tuple(contract)


class GraphBuilder:
    """Пошаговая сборка графа; владелец один, результат неизменяем"""

    def __init__(self, name: str):
        self.name = name
        self._nodes = {}
        self._wires = []
        self._inputs = []
        self._outputs = []
        self._counter = itertools.count(1)

    def _new_id(self, prefix: str) -> str:
        while True:
            node_id = f"{prefix}{next(self._counter)}"
            if node_id not in self._nodes:
                return node_id

    def _add_node(self, node_id: str, kind: NodeKind) -> Node:
        if node_id in self._nodes:
            raise GraphError(f"узел '{node_id}' уже существует")
        node = make_node(node_id, kind)
        self._nodes[node_id] = node
        return node

    def socket_type(self, handle: Socket) -> TypeExpr:
        node_id, port = handle
        return self._nodes[node_id].out_sockets[port]

    def node(self, kind: NodeKind, node_id: Optional[str] = None) -> str:
        """Узел без проводов"""
        node_id = node_id or self._new_id(kind.name or "node")
        self._add_node(node_id, kind)
        return node_id

    def wire(self, source: Socket, target: Socket) -> None:
        self._wires.append(Wire(tuple(source), tuple(target)))

    def input(self, t: TypeExpr) -> Socket:
        index = len(self._inputs)
        node_id = f"in{index}"
        self._add_node(node_id, InputPort(index, t))
        self._inputs.append(node_id)
        return node_id, 0

    def output(self, handle: Socket, t: Optional[TypeExpr] = None) -> str:
        index = len(self._outputs)
        node_id = f"out{index}"
        self._add_node(node_id, OutputPort(index, t if t is not None else self.socket_type(handle)))
        self._outputs.append(node_id)
        self.wire(handle, (node_id, 0))
        return node_id

    def constant(self, value, t: Optional[TypeExpr] = None) -> Socket:
        node_id = self._new_id("const")
        self._add_node(node_id, Constant(value, t))
        return node_id, 0

    def add(self, kind: NodeKind, *sources: Socket) -> tuple:
        node_id = self._new_id(kind.name or "node")
        node = self._add_node(node_id, kind)
        if len(sources) != len(node.in_sockets):
            raise GraphError(
                f"узел '{kind.name}' ожидает {len(node.in_sockets)} входов, передано {len(sources)}"
            )
        for i, source in enumerate(sources):
            self.wire(source, (node_id, i))
        return tuple((node_id, i) for i in range(len(node.out_sockets)))

    def subgraph(self, graph: ConstructionGraph, *sources: Socket) -> tuple:
        return self.add(SubGraph(graph), *sources)

    def build(self, check_graph: bool = True) -> ConstructionGraph:
        graph = ConstructionGraph(
            name=self.name,
            nodes=tuple(self._nodes.values()),
            wires=tuple(self._wires),
            inputs=tuple(self._inputs),
            outputs=tuple(self._outputs),
        )
        if check_graph:
            violations = check(graph)
            if violations:
                raise GraphCheckError(self.name, violations)
        return graph


def check(graph: ConstructionGraph) -> list:
    """Проверка линейности, типов и ацикличности; возвращает список нарушений"""
    violations = []
    id_counts = Counter(node.id for node in graph.nodes)
    for node_id, count in id_counts.items():
        if count > 1:
            violations.append(Violation("duplicate_node", f"идентификатор '{node_id}' повторяется {count} раз"))
    nodes = graph.node_map

    for node in graph.nodes:
        try:
            ins, outs = node.kind.signature()
        except Exception as e:
            violations.append(Violation("bad_node", f"узел '{node.id}': {e}"))
            continue
        if tuple(ins) != node.in_sockets or tuple(outs) != node.out_sockets:
            violations.append(Violation("bad_node", f"гнезда узла '{node.id}' не совпадают с сигнатурой '{node.kind.name}'"))

    for position, (ids, port_cls) in enumerate(((graph.inputs, InputPort), (graph.outputs, OutputPort))):
        listed = set(ids)
        for index, node_id in enumerate(ids):
            node = nodes.get(node_id)
            if node is None or not isinstance(node.kind, port_cls) or node.kind.index != index:
                violations.append(Violation("bad_port", f"порт #{index} ('{node_id}') некорректен"))
        for node in graph.nodes:
            if isinstance(node.kind, port_cls) and node.id not in listed:
                violations.append(Violation("bad_port", f"порт '{node.id}' не объявлен в списке графа"))

    source_uses = Counter()
    target_uses = Counter()
    for wire in graph.wires:
        src = nodes.get(wire.source[0])
        dst = nodes.get(wire.target[0])
        if src is None or dst is None:
            violations.append(Violation("bad_wire", f"провод {wire.source} -> {wire.target} ссылается на неизвестный узел"))
            continue
        if not 0 <= wire.source[1] < len(src.out_sockets) or not 0 <= wire.target[1] < len(dst.in_sockets):
            violations.append(Violation("bad_wire", f"провод {wire.source} -> {wire.target}: индекс гнезда вне диапазона"))
            continue
        source_uses[wire.source] += 1
        target_uses[wire.target] += 1
        src_type = src.out_sockets[wire.source[1]]
        dst_type = dst.in_sockets[wire.target[1]]
        if src_type != dst_type:
            violations.append(Violation(
                "type_mismatch",
                f"провод {wire.source} -> {wire.target}: {src_type} не совпадает с {dst_type}",
            ))

    for node in graph.nodes:
        for i in range(len(node.out_sockets)):
            uses = source_uses[(node.id, i)]
            if uses == 0:
                violations.append(Violation("dangling_output", f"выход {node.id}[{i}] не использован"))
            elif uses > 1:
                violations.append(Violation("double_consumption", f"выход {node.id}[{i}] использован {uses} раз"))
        for i in range(len(node.in_sockets)):
            uses = target_uses[(node.id, i)]
            if uses == 0:
                violations.append(Violation("dangling_input", f"вход {node.id}[{i}] не подключен"))
            elif uses > 1:
                violations.append(Violation("double_feed", f"вход {node.id}[{i}] подключен {uses} раз"))

    digraph = nx.DiGraph()
    digraph.add_nodes_from(node.id for node in graph.nodes)
    digraph.add_edges_from(
        (w.source[0], w.target[0]) for w in graph.wires
        if w.source[0] in nodes and w.target[0] in nodes
    )
    try:
        cycle = nx.find_cycle(digraph)
        path = " -> ".join(edge[0] for edge in cycle)
        violations.append(Violation("cycle", f"цикл: {path}"))
    except nx.NetworkXNoCycle:
        pass

    if violations:
        logger.debug("Граф '%s': %d нарушений", graph.name, len(violations))
    return violations


def is_valid(graph: ConstructionGraph) -> bool:
    return not check(graph)


# --- Преобразования графов ---

def compose_graphs(f: ConstructionGraph, g: ConstructionGraph, pairing=None, name=None) -> ConstructionGraph:
    """
    Композиция в порядке потока данных: выходы f подаются на входы g.
    Непарные входы g и непарные выходы f становятся входами/выходами результата.
    """
    if pairing is None:
        k = min(len(f.outputs), len(g.inputs))
        pairing = [(i, i) for i in range(k)]
    pairing = [tuple(p) for p in pairing]
    f_used = [i for i, _ in pairing]
    g_used = [j for _, j in pairing]
    if len(set(f_used)) != len(f_used) or len(set(g_used)) != len(g_used):
        raise GraphError("каждое гнездо может участвовать в паре только один раз")
    for i, j in pairing:
        if not 0 <= i < len(f.outputs) or not 0 <= j < len(g.inputs):
            raise GraphError(f"пара ({i}, {j}) вне диапазона гнезд")
        if f.output_types[i] != g.input_types[j]:
            raise TypeMismatchError(f"пара ({i}, {j}): {f.output_types[i]} не совпадает с {g.input_types[j]}")

    b = GraphBuilder(name or f"compose({f.name};{g.name})")
    f_out = b.subgraph(f, *[b.input(t) for t in f.input_types])
    paired = {j: i for i, j in pairing}
    g_args = [f_out[paired[j]] if j in paired else b.input(t) for j, t in enumerate(g.input_types)]
    for handle in b.subgraph(g, *g_args):
        b.output(handle)
    for i, handle in enumerate(f_out):
        if i not in set(f_used):
            b.output(handle)
    return b.build()


def partial_apply(graph: ConstructionGraph, bindings) -> ConstructionGraph:
    """Частичное применение: связанные входы заменяются встроенными константами"""
    bindings = dict(bindings)
    if not bindings:
        return graph
    for index, value in bindings.items():
        if not 0 <= index < len(graph.inputs):
            raise GraphError(f"вход #{index} вне диапазона")
        if not fits(value, graph.input_types[index]):
            raise TypeMismatchError(f"объект {value} не подходит ко входу #{index} типа {graph.input_types[index]}")

    bound_ids = {graph.inputs[i]: value for i, value in bindings.items()}
    remaining = [node_id for node_id in graph.inputs if node_id not in bound_ids]
    renumber = {node_id: i for i, node_id in enumerate(remaining)}
    nodes = []
    for node in graph.nodes:
        if node.id in bound_ids:
            nodes.append(make_node(node.id, Constant(bound_ids[node.id], node.kind.type)))
        elif node.id in renumber:
            nodes.append(make_node(node.id, InputPort(renumber[node.id], node.kind.type)))
        else:
            nodes.append(node)
    bound_desc = ",".join(f"{i}={v}" for i, v in sorted(bindings.items()))
    return ConstructionGraph(
        name=f"{graph.name}[{bound_desc}]",
        nodes=tuple(nodes),
        wires=graph.wires,
        inputs=tuple(remaining),
        outputs=graph.outputs,
    )


def permute_inputs(graph: ConstructionGraph, order) -> ConstructionGraph:
    """Перестановка входов: вход i результата - это вход order[i] исходного графа"""
    order = list(order)
    if sorted(order) != list(range(len(graph.inputs))):
        raise GraphError(f"{order} не является перестановкой входов")
    b = GraphBuilder(f"swap({graph.name};{','.join(map(str, order))})")
    args = [None] * len(order)
    for source_index in order:
        args[source_index] = b.input(graph.input_types[source_index])
    for handle in b.subgraph(graph, *args):
        b.output(handle)
    return b.build()


def curry_transform(graph: ConstructionGraph, split: int) -> ConstructionGraph:
    """(A1;...;Ak) -> Out  превращается в  (A1;...;As) -> ((As+1;...;Ak) -> Out)"""
    from utils.primitive_ops import Apply

    if not 1 <= split < len(graph.inputs):
        raise GraphError(f"недопустимая точка каррирования {split} для {len(graph.inputs)} входов")
    b = GraphBuilder(f"curry({graph.name};{split})")
    args = [b.input(t) for t in graph.input_types[:split]]
    op = b.constant(OpValue(graph))
    (result,) = b.add(Apply(graph.signature, split), op, *args)
    b.output(result)
    return b.build()


def uncurry_transform(graph: ConstructionGraph, swap: bool = False) -> ConstructionGraph:
    """A -> (B -> C)  превращается в  (A;B) -> C  (при swap - в (B;A) -> C)"""
    from utils.primitive_ops import Apply

    if len(graph.outputs) != 1 or not isinstance(graph.output_types[0], Arrow):
        raise GraphError(f"граф '{graph.name}' не имеет каррированной формы A -> (B -> C)")
    inner = graph.output_types[0]
    b = GraphBuilder(f"uncurry({graph.name})")
    if swap:
        b_args = [b.input(t) for t in inner.inputs]
        a_args = [b.input(t) for t in graph.input_types]
    else:
        a_args = [b.input(t) for t in graph.input_types]
        b_args = [b.input(t) for t in inner.inputs]
    (op,) = b.subgraph(graph, *a_args)
    for handle in b.add(Apply(inner), op, *b_args):
        b.output(handle)
    return b.build()
