"""
Обработчики команд CLI. Каждый обработчик получает разобранные аргументы
и возвращает (код завершения, отчет).
"""
from __future__ import annotations

import json
import logging

from utils.construction_graph import check
from utils.continuum import analyze, load_complex, similar
from utils.errors import GraphFormatError
from utils.evaluator import evaluate
from utils.graph_io import encode_value, load_graph, load_inputs
from utils.report_generator import ReportGenerator
from utils.repro import run_suite
from utils.type_system import format_type, ind1, type_code
from utils.values import INACTIVE, fits, type_of

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


def _literal(value) -> str:
    return json.dumps(encode_value(value, inline_graphs=False), ensure_ascii=False, sort_keys=True)


def _violations_report(report: ReportGenerator, violations) -> None:
    report.add_fields(status="violations", violations=len(violations))
    report.add_table("violations", [{"kind": v.kind, "message": v.message} for v in violations],
                     columns=["kind", "message"])


def handle_check(args):
    graph = load_graph(args.path)
    violations = check(graph)
    report = ReportGenerator("check").add_fields(graph=graph.name, nodes=len(graph.nodes), wires=len(graph.wires))
    if violations:
        logger.warning("Граф '%s': %d нарушений", graph.name, len(violations))
        _violations_report(report, violations)
        return EXIT_FAILURE, report
    report.add_fields(status="ok", violations=0, signature=format_type(graph.signature))
    contract = graph.output_contract()
    report.add_field("contract", [format_type(t) for t in contract])
    return EXIT_OK, report


def _check_inputs(graph, inputs) -> None:
    """Число и типы входов сверяются с графом до вычисления"""
    if len(inputs) != len(graph.inputs):
        raise GraphFormatError(
            f"граф '{graph.name}' ожидает {len(graph.inputs)} входов, передано {len(inputs)}", "inputs"
        )
    for i, (value, t) in enumerate(zip(inputs, graph.input_types)):
        if not fits(value, t):
            raise GraphFormatError(f"объект {_literal(value)} не имеет типа {format_type(t)}", f"inputs[{i}]")


def handle_eval(args):
    graph = load_graph(args.graph)
    report = ReportGenerator("eval").add_field("graph", graph.name)
    violations = check(graph)
    if violations:
        _violations_report(report, violations)
        return EXIT_FAILURE, report
    inputs = load_inputs(args.inputs)
    _check_inputs(graph, inputs)
    result = evaluate(graph, inputs, bound=args.bound)
    report.add_fields(status="ok", fired=len(result.fired), transfers=result.transfers)
    rows = [
        {"output": i, "active": value is not INACTIVE,
         "type": format_type(type_of(value)) if value is not INACTIVE else "-", "value": _literal(value)}
        for i, value in result.items()
    ]
    report.add_table("outputs", rows, columns=["output", "active", "type", "value"])
    return EXIT_OK, report


def handle_repro(args):
    result = run_suite(args.name, seed=args.seed, bound=args.bound)
    report = ReportGenerator(f"repro {result.name}")
    report.add_fields(**result.fields)
    report.add_fields(comparisons=len(result.table), failures=result.failures,
                      status="pass" if result.passed else "fail")
    report.add_table("comparisons", result.table)
    return (EXIT_OK if result.passed else EXIT_FAILURE), report


def handle_continuum_analyze(args):
    c = load_complex(args.path)
    summary = analyze(c)
    report = ReportGenerator("continuum analyze").add_fields(**summary)
    logger.info("Комплекс %s: %d белых, %d черных компонент", args.path,
                summary["white_components"], summary["black_components"])
    return EXIT_OK, report


def handle_continuum_similar(args):
    first, second = load_complex(args.first), load_complex(args.second)
    verdict = similar(first, second)
    report = ReportGenerator("continuum similar")
    for label, c in (("first", first), ("second", second)):
        summary = analyze(c)
        report.add_field(f"{label}_tree", summary["tree"])
        report.add_field(f"{label}_components",
                         f"{summary['white_components']} white, {summary['black_components']} black")
        report.add_field(f"{label}_edges", len(summary["edges"]))
    report.add_field("similar", verdict)
    return EXIT_OK, report


def handle_enum_types(args):
    rows = [{"index": i, "type": format_type(ind1(i)), "code": type_code(ind1(i))} for i in range(1, args.count + 1)]
    report = ReportGenerator("enum-types").add_field("count", args.count)
    report.add_table("types", rows)
    return EXIT_OK, report
