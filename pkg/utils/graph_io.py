"""
Файловый формат графов и литералы объектов.

Документ графа: {"name", "nodes": [{"id", "kind", "params"}],
"wires": [{"from": [id, port], "to": [id, port]}], "inputs", "outputs"}.

Литералы: 5 - натуральное число; {"pair": [a, b]}; {"left": v, "type": "(A + B)"};
{"graph": документ или путь}; {"type": "N"}; {"continuum": документ комплекса};
null - неактивный канал.
"""
from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Optional

from utils import primitive_ops as ops
from utils import relations as rel
from utils.construction_graph import (
    Constant, ConstructionGraph, InputPort, NodeKind, OutputPort, SubGraph, Wire, check, make_node,
)
from utils.continuum import complex_from_document, complex_to_document
from utils.errors import GraphFormatError, UniverseError
from utils.syntax import Quantified, format_relation, free_holes, parse_relation, parse_type
from utils.type_system import RelKind, Sum, TypeExpr, format_type
from utils.values import (
    INACTIVE, ContinuumValue, NatValue, OpValue, PairValue, Side, Tagged, TypeValue, Witness,
)

logger = logging.getLogger(__name__)

# Виды с параметрами, описанными в PARAMS
_SIMPLE_KINDS = {cls.name: cls for cls in (
    ops.Join, ops.Proj, ops.PlusLeft, ops.PlusRight, ops.Get, ops.Const, ops.ConstN, ops.Id, ops.Apply,
    ops.Compose, ops.Copy, ops.Succ, ops.Pred, ops.Iter, ops.Change, ops.IfThenElse, ops.While, ops.Merge,
    ops.SigmaF, ops.Ind1, ops.Ind1Code, ops.Des, ops.TypeConstructor, rel.Negation, rel.AxiomClaim,
    rel.AxiomObject,
)}

# Имя параметра в файле -> поле класса
_FIELD_ALIASES = {"signature": "signature_type"}

_ATOMS = {"equal": RelKind.EQUAL, "lesser": RelKind.LESSER, "greater": RelKind.GREATER}

KIND_NAMES = tuple(sorted(
    set(_SIMPLE_KINDS) | set(_ATOMS) | {"pi", "sigma", "l_plus", "l_times", "rel", "override", "constant",
                                        "graph", "input", "output"}
))


# --- Литералы ---

def _type(text, field: str) -> TypeExpr:
    if not isinstance(text, str):
        raise GraphFormatError(f"тип должен быть строкой, получено {text!r}", field)
    try:
        t = parse_type(text)
    except UniverseError as e:
        raise GraphFormatError(str(e), field) from e
    if isinstance(t, Quantified):
        raise GraphFormatError(f"'{text}' - шаблон отношения, а не тип", field)
    return t


def decode_value(literal, base_dir: Optional[Path] = None, field: str = "value"):
    """Объект из литерала"""
    if literal is None:
        return INACTIVE
    if isinstance(literal, bool):
        raise GraphFormatError(f"логические значения не поддерживаются: {literal!r}", field)
    if isinstance(literal, int):
        if literal < 1:
            raise GraphFormatError(f"натуральное число должно быть >= 1: {literal}", field)
        return NatValue(literal)
    if not isinstance(literal, dict) or not literal:
        raise GraphFormatError(f"неизвестный литерал: {literal!r}", field)

    if "pair" in literal:
        items = literal["pair"]
        if not isinstance(items, list) or len(items) != 2:
            raise GraphFormatError("pair ожидает список из двух литералов", f"{field}.pair")
        return PairValue(decode_value(items[0], base_dir, f"{field}.pair[0]"),
                         decode_value(items[1], base_dir, f"{field}.pair[1]"))
    for side in Side:
        if side.value in literal:
            sum_type = _type(literal.get("type"), f"{field}.type")
            if not isinstance(sum_type, Sum):
                raise GraphFormatError(f"тип помеченного объекта должен быть суммой: {sum_type}", f"{field}.type")
            payload = decode_value(literal[side.value], base_dir, f"{field}.{side.value}")
            return Tagged(side, payload, sum_type)
    if "graph" in literal:
        return OpValue(_nested_graph(literal["graph"], base_dir, f"{field}.graph"))
    if "continuum" in literal:
        try:
            return ContinuumValue(complex_from_document(literal["continuum"], f"{field}.continuum"))
        except UniverseError as e:
            raise GraphFormatError(str(e), f"{field}.continuum") from e
    if "type" in literal:
        return TypeValue(_type(literal["type"], f"{field}.type"))
    raise GraphFormatError(f"неизвестный литерал: {sorted(literal)}", field)


def encode_value(value, inline_graphs: bool = True):
    """Литерал объекта; при inline_graphs=False операция записывается именем и сигнатурой"""
    if value is INACTIVE:
        return None
    if isinstance(value, NatValue):
        return value.count
    if isinstance(value, PairValue):
        return {"pair": [encode_value(value.left, inline_graphs), encode_value(value.right, inline_graphs)]}
    if isinstance(value, Tagged):
        return {value.side.value: encode_value(value.payload, inline_graphs), "type": format_type(value.sum_type)}
    if isinstance(value, OpValue):
        if inline_graphs:
            return {"graph": graph_to_document(value.graph)}
        return {"graph": value.graph.name, "signature": format_type(value.graph.signature)}
    if isinstance(value, TypeValue):
        return {"type": format_type(value.type_expr)}
    if isinstance(value, Witness):
        return {"witness": value.rule, "claim": format_type(value.claim)}
    if isinstance(value, ContinuumValue):
        return {"continuum": complex_to_document(value.complex)}
    raise GraphFormatError(f"объект не имеет литерала: {value!r}")


def _nested_graph(source, base_dir: Optional[Path], field: str) -> ConstructionGraph:
    """Вложенный граф: документ или путь относительно файла-родителя"""
    if isinstance(source, str):
        path = Path(source)
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        graph = load_graph(path)
    elif isinstance(source, dict):
        graph = graph_from_document(source, base_dir, field)
    else:
        raise GraphFormatError("ожидался документ графа или путь", field)
    violations = check(graph)
    if violations:
        raise GraphFormatError(f"вложенный граф '{graph.name}' некорректен: {violations[0]}", field)
    return graph


# --- Параметры видов ---

def _decode_param(codec: str, raw, base_dir, field: str):
    if codec == "type":
        return _type(raw, field)
    if codec == "types":
        if not isinstance(raw, list):
            raise GraphFormatError("ожидался список типов", field)
        return tuple(_type(item, f"{field}[{i}]") for i, item in enumerate(raw))
    if codec == "int":
        if not isinstance(raw, int) or isinstance(raw, bool):
            raise GraphFormatError(f"ожидалось целое число, получено {raw!r}", field)
        return raw
    if codec == "str":
        if not isinstance(raw, str):
            raise GraphFormatError(f"ожидалась строка, получено {raw!r}", field)
        return raw
    if codec == "op":
        value = decode_value(raw, base_dir, field)
        if not isinstance(value, OpValue):
            raise GraphFormatError("ожидалась операция {\"graph\": ...}", field)
        return value
    raise GraphFormatError(f"неизвестный кодек параметра: {codec}", field)


def _encode_param(codec: str, value):
    if codec == "type":
        return format_type(value)
    if codec == "types":
        return [format_type(t) for t in value]
    if codec == "op":
        return encode_value(value)
    return value


def _simple_kind(cls, params: dict, base_dir, field: str) -> NodeKind:
    unknown = set(params) - set(cls.PARAMS)
    if unknown:
        raise GraphFormatError(f"неизвестные параметры вида '{cls.name}': {sorted(unknown)}", field)
    kwargs = {
        _FIELD_ALIASES.get(key, key): _decode_param(codec, params[key], base_dir, f"{field}.{key}")
        for key, codec in cls.PARAMS.items() if key in params
    }
    try:
        return cls(**kwargs)
    except TypeError as e:
        raise GraphFormatError(f"вид '{cls.name}': {e}", field) from e


def decode_kind(kind_name: str, params: dict, base_dir=None, field: str = "kind", port_index: int = -1) -> NodeKind:
    if kind_name in _SIMPLE_KINDS:
        return _simple_kind(_SIMPLE_KINDS[kind_name], params, base_dir, field)
    if kind_name in _ATOMS:
        return rel.RelationAtom(_ATOMS[kind_name])
    if kind_name in ("pi", "sigma"):
        unknown = set(params) - set(rel.Quantifier.PARAMS)
        if unknown:
            raise GraphFormatError(f"неизвестные параметры квантора: {sorted(unknown)}", field)
        kwargs = {key: _decode_param(codec, params[key], base_dir, f"{field}.{key}")
                  for key, codec in rel.Quantifier.PARAMS.items() if key in params}
        return rel.Quantifier(kind_name, **kwargs)
    if kind_name in ("l_plus", "l_times"):
        level = _decode_param("int", params.get("level", 1), base_dir, f"{field}.level")
        return rel.Window(kind_name, level)
    if kind_name == "rel":
        return _relation_kind(params, field)
    if kind_name == "override":
        a_type = _type(params.get("a"), f"{field}.a")
        table = params.get("table", [])
        if not isinstance(table, list):
            raise GraphFormatError("table - список пар [индекс, литерал]", f"{field}.table")
        entries = []
        for i, entry in enumerate(table):
            if not isinstance(entry, list) or len(entry) != 2 or not isinstance(entry[0], int):
                raise GraphFormatError("ожидалась пара [индекс, литерал]", f"{field}.table[{i}]")
            entries.append((entry[0], decode_value(entry[1], base_dir, f"{field}.table[{i}][1]")))
        return ops.Override(a_type, tuple(entries))
    if kind_name == "constant":
        if "value" not in params:
            raise GraphFormatError("отсутствует значение константы", f"{field}.value")
        value = decode_value(params["value"], base_dir, f"{field}.value")
        t = _type(params["type"], f"{field}.type") if "type" in params else None
        return Constant(value, t)
    if kind_name == "graph":
        source = params.get("graph", params.get("path"))
        return SubGraph(_nested_graph(source, base_dir, f"{field}.graph"))
    if kind_name in ("input", "output"):
        port = InputPort if kind_name == "input" else OutputPort
        return port(port_index, _type(params.get("type"), f"{field}.type"))
    raise GraphFormatError(f"неизвестный вид узла '{kind_name}'", field)


def _relation_kind(params: dict, field: str) -> rel.RelationTemplate:
    expr = params.get("expr")
    if not isinstance(expr, str):
        raise GraphFormatError("ожидалась строка шаблона отношения", f"{field}.expr")
    try:
        template = parse_relation(expr)
    except UniverseError as e:
        raise GraphFormatError(str(e), f"{field}.expr") from e
    holes = params.get("holes")
    env = params.get("env", {})
    if not isinstance(env, dict):
        raise GraphFormatError("env - словарь {параметр: число}", f"{field}.env")
    env = {int(k): int(v) for k, v in env.items()}
    if holes is None:
        holes = [h for h in free_holes(template) if h not in env]
    return rel.RelationTemplate(template, tuple(int(h) for h in holes), tuple(sorted(env.items())))


def encode_kind(kind: NodeKind) -> tuple:
    """(имя вида, параметры)"""
    if isinstance(kind, (InputPort, OutputPort)):
        return kind.name, {"type": format_type(kind.type)}
    if isinstance(kind, Constant):
        params = {"value": encode_value(kind.value)}
        if kind.type is not None:
            params["type"] = format_type(kind.type)
        return "constant", params
    if isinstance(kind, SubGraph):
        return "graph", {"graph": graph_to_document(kind.graph)}
    if isinstance(kind, rel.RelationAtom):
        return kind.name, {}
    if isinstance(kind, rel.Window):
        return kind.name, {"level": kind.level}
    if isinstance(kind, rel.RelationTemplate):
        return "rel", {"expr": format_relation(kind.template), "holes": list(kind.holes),
                       "env": {str(k): v for k, v in kind.env}}
    if isinstance(kind, ops.Override):
        return "override", {"a": format_type(kind.a),
                            "table": [[i, encode_value(v)] for i, v in kind.table]}
    params = {}
    for key, codec in type(kind).PARAMS.items():
        value = getattr(kind, _FIELD_ALIASES.get(key, key))
        if value is not None:
            params[key] = _encode_param(codec, value)
    return kind.name, params


# --- Документы ---

def _require(document: dict, key: str, expected: type, field: str):
    if key not in document:
        raise GraphFormatError("отсутствует обязательное поле", f"{field}{key}")
    value = document[key]
    if not isinstance(value, expected):
        raise GraphFormatError(f"ожидался {expected.__name__}", f"{field}{key}")
    return value


def _socket(raw, field: str) -> tuple:
    if not isinstance(raw, list) or len(raw) != 2 or not isinstance(raw[0], str) or not isinstance(raw[1], int):
        raise GraphFormatError("гнездо задается парой [id, номер]", field)
    return raw[0], raw[1]


def graph_from_document(document, base_dir: Optional[Path] = None, field: str = "") -> ConstructionGraph:
    """Граф из документа без проверки линейности (нарушения сообщает check)"""
    prefix = f"{field}." if field else ""
    if not isinstance(document, dict):
        raise GraphFormatError("документ графа должен быть объектом", field or None)
    name = _require(document, "name", str, prefix)
    entries = _require(document, "nodes", list, prefix)
    wires = _require(document, "wires", list, prefix)
    inputs = _require(document, "inputs", list, prefix)
    outputs = _require(document, "outputs", list, prefix)
    for key, ports in (("inputs", inputs), ("outputs", outputs)):
        for i, port in enumerate(ports):
            if not isinstance(port, str):
                raise GraphFormatError(f"ожидался id узла-порта, получено {port!r}", f"{prefix}{key}[{i}]")

    nodes = []
    for i, entry in enumerate(entries):
        node_field = f"{prefix}nodes[{i}]"
        if not isinstance(entry, dict):
            raise GraphFormatError("узел должен быть объектом", node_field)
        node_id = _require(entry, "id", str, f"{node_field}.")
        kind_name = _require(entry, "kind", str, f"{node_field}.")
        params = entry.get("params", {})
        if not isinstance(params, dict):
            raise GraphFormatError("params должен быть объектом", f"{node_field}.params")
        ports = inputs if kind_name == "input" else outputs
        index = ports.index(node_id) if node_id in ports else -1
        kind = decode_kind(kind_name, params, base_dir, f"{node_field}.params", index)
        try:
            nodes.append(make_node(node_id, kind))
        except (UniverseError, AttributeError, TypeError, KeyError) as e:
            raise GraphFormatError(str(e), node_field) from e

    parsed_wires = []
    for i, entry in enumerate(wires):
        wire_field = f"{prefix}wires[{i}]"
        if not isinstance(entry, dict):
            raise GraphFormatError("провод должен быть объектом", wire_field)
        parsed_wires.append(Wire(
            _socket(entry.get("from"), f"{wire_field}.from"),
            _socket(entry.get("to"), f"{wire_field}.to"),
        ))
    logger.debug("Загружен граф '%s': %d узлов, %d проводов", name, len(nodes), len(parsed_wires))
    return ConstructionGraph(name, tuple(nodes), tuple(parsed_wires), tuple(inputs), tuple(outputs))


def graph_to_document(graph: ConstructionGraph) -> dict:
    nodes = []
    for node in graph.nodes:
        kind_name, params = encode_kind(node.kind)
        entry = {"id": node.id, "kind": kind_name}
        if params:
            entry["params"] = params
        nodes.append(entry)
    return {
        "name": graph.name,
        "nodes": nodes,
        "wires": [{"from": list(w.source), "to": list(w.target)} for w in graph.wires],
        "inputs": list(graph.inputs),
        "outputs": list(graph.outputs),
    }


def _read_json(path: Path):
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise GraphFormatError(f"не удалось прочитать файл: {e.strerror}", str(path)) from e
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise GraphFormatError(f"строка {e.lineno}, столбец {e.colno}: {e.msg}", str(path)) from e


def load_graph(path) -> ConstructionGraph:
    path = Path(path)
    return graph_from_document(_read_json(path), path.parent)


def save_graph(graph: ConstructionGraph, path) -> None:
    Path(path).write_text(json.dumps(graph_to_document(graph), ensure_ascii=False, indent=2), encoding="utf-8")


def load_inputs(path) -> list:
    """Документ входов: список литералов или {"inputs": [...]}"""
    path = Path(path)
    document = _read_json(path)
    if isinstance(document, dict):
        document = document.get("inputs")
    if not isinstance(document, list):
        raise GraphFormatError("ожидался список литералов", f"{path}:inputs")
    return [decode_value(item, path.parent, f"inputs[{i}]") for i, item in enumerate(document)]
