import json
import tempfile
import unittest
from pathlib import Path

from utils.continuum import CubicalComplex
from utils.errors import GraphFormatError
from utils.evaluator import evaluate
from utils.graph_io import (
    KIND_NAMES, decode_kind, decode_value, encode_value, graph_from_document, graph_to_document, load_graph,
    load_inputs, save_graph,
)
from utils.primitive_ops import succ_op
from utils.relations import Quantifier
from utils.type_system import NAT, RelAtom, RelKind, Sum
from utils.values import INACTIVE, ContinuumValue, NatValue, PairValue, Side, Tagged, TypeValue

TEST_DATA = Path(__file__).resolve().parent.parent / "test_data"
VALID = TEST_DATA / "graphs" / "valid"


def succ_document(**overrides):
    document = {
        "name": "succ",
        "nodes": [
            {"id": "in0", "kind": "input", "params": {"type": "N"}},
            {"id": "s", "kind": "succ"},
            {"id": "out0", "kind": "output", "params": {"type": "N"}},
        ],
        "wires": [{"from": ["in0", 0], "to": ["s", 0]}, {"from": ["s", 0], "to": ["out0", 0]}],
        "inputs": ["in0"],
        "outputs": ["out0"],
    }
    document.update(overrides)
    return document


class TestLoadGraph(unittest.TestCase):
    def test_valid_graph(self):
        graph = load_graph(VALID / "copy_join.json")
        self.assertEqual(graph.name, "copy_join")
        self.assertEqual([node.id for node in graph.nodes], ["in0", "c", "s", "j", "out0"])
        self.assertEqual(len(graph.wires), 5)

    def test_saved_graph_loads_back(self):
        graph = load_graph(VALID / "apply_file.json")
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "apply_inline.json"
            save_graph(graph, path)
            reloaded = load_graph(path)
        self.assertEqual(graph_to_document(reloaded), graph_to_document(graph))
        self.assertEqual(evaluate(reloaded, [NatValue(3)]).outputs, (NatValue(7),))

    def test_broken_json_reports_position(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "broken.json"
            path.write_text('{"name": "x",\n "nodes": [', encoding="utf-8")
            with self.assertRaises(GraphFormatError) as ctx:
                load_graph(path)
        self.assertIn("строка 2", str(ctx.exception))

    def test_missing_file(self):
        with self.assertRaises(GraphFormatError):
            load_graph(TEST_DATA / "graphs" / "no_such_graph.json")


class TestFieldContext(unittest.TestCase):
    def assertField(self, document, field):
        with self.assertRaises(GraphFormatError) as ctx:
            graph_from_document(document)
        self.assertEqual(ctx.exception.field, field)

    def test_missing_section(self):
        document = succ_document()
        del document["wires"]
        self.assertField(document, "wires")

    def test_bad_type_parameter(self):
        nodes = succ_document()["nodes"]
        nodes[1] = {"id": "j", "kind": "join", "params": {"a": "Q", "b": "N"}}
        self.assertField(succ_document(nodes=nodes), "nodes[1].params.a")

    def test_unknown_kind_and_parameter(self):
        nodes = succ_document()["nodes"]
        nodes[1] = {"id": "s", "kind": "teleport"}
        self.assertField(succ_document(nodes=nodes), "nodes[1].params")
        nodes[1] = {"id": "s", "kind": "copy", "params": {"a": "N", "colour": "red"}}
        self.assertField(succ_document(nodes=nodes), "nodes[1].params")

    def test_bad_wire(self):
        wires = [{"from": ["in0"], "to": ["s", 0]}]
        self.assertField(succ_document(wires=wires), "wires[0].from")

    def test_port_ids_must_be_strings(self):
        self.assertField(succ_document(inputs=[["in0"]]), "inputs[0]")
        self.assertField(succ_document(outputs=["out0", {"id": 1}]), "outputs[1]")

    def test_invalid_nested_graph(self):
        nested = succ_document(wires=[])
        nodes = succ_document()["nodes"] + [{"id": "f", "kind": "constant", "params": {"value": {"graph": nested}}}]
        self.assertField(succ_document(nodes=nodes), "nodes[3].params.value.graph")

    def test_unlisted_port_is_left_to_check(self):
        nodes = succ_document()["nodes"] + [{"id": "in9", "kind": "input", "params": {"type": "N"}}]
        graph = graph_from_document(succ_document(nodes=nodes))
        self.assertEqual(graph.node_map["in9"].kind.index, -1)


class TestKinds(unittest.TestCase):
    def test_kind_names(self):
        for name in ("succ", "join", "pi", "rel", "override", "constant", "graph", "equal", "while"):
            with self.subTest(kind=name):
                self.assertIn(name, KIND_NAMES)

    def test_quantifier(self):
        self.assertEqual(decode_kind("pi", {"bound": 3}), Quantifier("pi", bound=3))
        with self.assertRaises(GraphFormatError):
            decode_kind("sigma", {"limit": 3})

    def test_relation_template_with_env(self):
        kind = decode_kind("rel", {"expr": "gt(_1;_2)", "env": {"2": 5}})
        self.assertEqual(kind.holes, (1,))
        (t,) = kind.fire([NatValue(8)], None)
        self.assertEqual(t, TypeValue(RelAtom(RelKind.GREATER, 8, 5)))


class TestLiterals(unittest.TestCase):
    def test_decode(self):
        sum_type = Sum(NAT, NAT)
        cases = [
            (5, NatValue(5)),
            (None, INACTIVE),
            ({"pair": [1, 2]}, PairValue(NatValue(1), NatValue(2))),
            ({"right": 3, "type": "(N + N)"}, Tagged(Side.RIGHT, NatValue(3), sum_type)),
            ({"type": "(N -> N)"}, TypeValue(succ_op().graph.signature)),
            ({"continuum": {"dim": 1, "resolution": 1, "active": [[2]]}},
             ContinuumValue(CubicalComplex(1, 1, frozenset({(2,)})))),
        ]
        for literal, expected in cases:
            with self.subTest(literal=json.dumps(literal)):
                self.assertEqual(decode_value(literal), expected)

    def test_rejected_literals(self):
        for literal in (0, True, "5", {"pair": [1]}, {"left": 1, "type": "N"}, {"colour": 1}, {}):
            with self.subTest(literal=json.dumps(literal)):
                with self.assertRaises(GraphFormatError):
                    decode_value(literal)

    def test_operation_summary(self):
        self.assertEqual(encode_value(succ_op(), inline_graphs=False), {"graph": "succ", "signature": "(N -> N)"})
        self.assertEqual(encode_value(succ_op())["graph"]["name"], "succ")

    def test_input_files(self):
        inputs = load_inputs(TEST_DATA / "inputs" / "get_sum_left.json")
        self.assertEqual(inputs, [Tagged(Side.LEFT, NatValue(7), Sum(NAT, NAT))])
        with self.assertRaises(GraphFormatError) as ctx:
            load_inputs(TEST_DATA / "inputs" / "not_natural.json")
        self.assertEqual(ctx.exception.field, "inputs[0]")
        with self.assertRaises(GraphFormatError) as ctx:
            load_inputs(TEST_DATA / "inputs" / "bad_pair.json")
        self.assertEqual(ctx.exception.field, "inputs[1].pair")


if __name__ == '__main__':
    unittest.main()
