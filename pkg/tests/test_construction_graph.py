import unittest
from pathlib import Path

import numpy as np

from utils.construction_graph import (
    GraphBuilder, check, compose_graphs, curry_transform, is_valid, partial_apply, permute_inputs,
    uncurry_transform,
)
from utils.errors import GraphCheckError, GraphError, TypeMismatchError
from utils.evaluator import apply_value, evaluate, evaluate_op_value
from utils.graph_io import load_graph, load_inputs
from utils.primitive_ops import ConstN, Copy, Ind1, Join, Pred, Succ, primitive_graph
from utils.type_system import Arrow, CONTINUUM, NAT, Product
from utils.values import NatValue, OpValue, PairValue

GRAPHS = Path(__file__).resolve().parent.parent / "test_data" / "graphs"
INPUTS = GRAPHS.parent / "inputs"

SEEDED_VIOLATIONS = {
    "double_consumption": "double_consumption",
    "dangling_socket": "dangling_output",
    "type_mismatch": "type_mismatch",
    "cycle": "cycle",
    "missing_copy": "double_consumption",
}


def random_graph(rng, index):
    """(N; N) -> N или (N; N) -> N x N из цепочек succ/pred"""
    b = GraphBuilder(f"random{index}")
    x, y = b.input(NAT), b.input(NAT)

    def chain(handle):
        for _ in range(int(rng.integers(0, 4))):
            (handle,) = b.add(Succ() if rng.random() < 0.6 else Pred(), handle)
        return handle

    x, y = chain(x), chain(y)
    shape = int(rng.integers(0, 3))
    if shape == 0:
        (out,) = b.add(ConstN(), x, y)
    elif shape == 1:
        (out,) = b.add(ConstN(), y, x)
    else:
        (out,) = b.add(Join(NAT, NAT), x, y)
    b.output(out)
    return b.build()


class TestLinearityGate(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.valid = {p.stem: load_graph(p) for p in sorted((GRAPHS / "valid").glob("*.json"))}
        cls.invalid = {p.stem: load_graph(p) for p in sorted((GRAPHS / "invalid").glob("*.json"))}

    def test_corpus_size(self):
        self.assertGreaterEqual(len(self.valid), 5)
        self.assertEqual(set(self.invalid), set(SEEDED_VIOLATIONS))

    def test_valid_graphs_pass(self):
        for name, graph in self.valid.items():
            with self.subTest(graph=name):
                self.assertEqual(check(graph), [])

    def test_seeded_violations_found(self):
        for name, graph in self.invalid.items():
            with self.subTest(graph=name):
                kinds = {v.kind for v in check(graph)}
                self.assertIn(SEEDED_VIOLATIONS[name], kinds)

    def test_double_consumption_fixed_by_copy(self):
        b = GraphBuilder("double")
        (s,) = b.add(Succ(), b.input(NAT))
        (pair,) = b.add(Join(NAT, NAT), s, s)
        b.output(pair)
        with self.assertRaises(GraphCheckError) as ctx:
            b.build()
        self.assertEqual([v.kind for v in ctx.exception.violations], ["double_consumption"])

        b = GraphBuilder("copied")
        (s,) = b.add(Succ(), b.input(NAT))
        first, second = b.add(Copy(NAT), s)
        (pair,) = b.add(Join(NAT, NAT), first, second)
        b.output(pair)
        graph = b.build()
        self.assertTrue(is_valid(graph))
        self.assertEqual(evaluate(graph, [NatValue(2)]).outputs, (PairValue(NatValue(3), NatValue(3)),))

    def test_nat_into_continuum_socket(self):
        b = GraphBuilder("mismatch")
        b.output(b.input(NAT), CONTINUUM)
        kinds = [v.kind for v in check(b.build(check_graph=False))]
        self.assertEqual(kinds, ["type_mismatch"])


class TestTransforms(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.succ = primitive_graph(Succ())
        cls.join = primitive_graph(Join(NAT, NAT))

    def test_compose(self):
        twice = compose_graphs(self.succ, self.succ)
        self.assertEqual(twice.signature, Arrow((NAT,), (NAT,)))
        self.assertEqual(evaluate(twice, [NatValue(3)]).outputs, (NatValue(5),))

    def test_compose_unpaired_sockets(self):
        g = compose_graphs(self.succ, self.join, pairing=[(0, 1)])
        self.assertEqual(g.signature, Arrow((NAT, NAT), (Product(NAT, NAT),)))
        self.assertEqual(evaluate(g, [NatValue(1), NatValue(7)]).outputs, (PairValue(NatValue(7), NatValue(2)),))

    def test_compose_errors(self):
        with self.assertRaises(GraphError):
            compose_graphs(self.succ, self.join, pairing=[(0, 0), (0, 1)])
        with self.assertRaises(TypeMismatchError):
            compose_graphs(primitive_graph(Ind1()), self.succ)

    def test_partial_apply(self):
        g = partial_apply(self.join, {1: NatValue(7)})
        self.assertEqual(g.name, "join[1=7]")
        self.assertEqual(evaluate(g, [NatValue(2)]).outputs, (PairValue(NatValue(2), NatValue(7)),))
        with self.assertRaises(TypeMismatchError):
            partial_apply(self.join, {0: OpValue(self.succ)})

    def test_permute_inputs(self):
        g = permute_inputs(self.join, (1, 0))
        self.assertEqual(evaluate(g, [NatValue(1), NatValue(2)]).outputs, (PairValue(NatValue(2), NatValue(1)),))
        with self.assertRaises(GraphError):
            permute_inputs(self.join, (0, 0))

    def test_curry_errors(self):
        with self.assertRaises(GraphError):
            curry_transform(self.join, 0)
        with self.assertRaises(GraphError):
            uncurry_transform(self.succ)


class TestCurryRoundTrips(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        rng = np.random.default_rng(5)
        cls.graphs = [random_graph(rng, i) for i in range(20)]
        cls.points = [(a, b) for a in range(1, 11) for b in range(1, 11)]

    def test_uncurry_after_curry(self):
        for graph in self.graphs:
            round_trip = uncurry_transform(curry_transform(graph, 1))
            with self.subTest(graph=graph.name):
                self.assertEqual(round_trip.signature, graph.signature)
                for a, b in self.points:
                    args = [NatValue(a), NatValue(b)]
                    self.assertEqual(evaluate(round_trip, args).outputs, evaluate(graph, args).outputs)

    def test_curry_after_uncurry(self):
        for graph in self.graphs:
            curried = OpValue(curry_transform(graph, 1))
            round_trip = OpValue(curry_transform(uncurry_transform(curried.graph), 1))
            with self.subTest(graph=graph.name):
                for a, b in self.points:
                    expected = evaluate_op_value(apply_value(curried, NatValue(a)), [NatValue(b)])
                    actual = evaluate_op_value(apply_value(round_trip, NatValue(a)), [NatValue(b)])
                    self.assertEqual(actual, expected)

    def test_swapped_uncurry(self):
        for graph in self.graphs[:5]:
            swapped = uncurry_transform(curry_transform(graph, 1), swap=True)
            with self.subTest(graph=graph.name):
                for a, b in self.points:
                    self.assertEqual(
                        evaluate(swapped, [NatValue(b), NatValue(a)]).outputs,
                        evaluate(graph, [NatValue(a), NatValue(b)]).outputs,
                    )

def random_chain(rng, index):
    """N -> N из цепочки succ/pred длины 1..4"""
    b = GraphBuilder(f"chain{index}")
    handle = b.input(NAT)
    for _ in range(int(rng.integers(1, 5))):
        (handle,) = b.add(Succ() if rng.random() < 0.6 else Pred(), handle)
    b.output(handle)
    return b.build()


class TestGraphInvariants(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        rng = np.random.default_rng(9)
        cls.graphs = [random_graph(rng, i) for i in range(20)]
        cls.chains = [random_chain(rng, i) for i in range(12)]
        cls.corpus = {p.stem: load_graph(p) for p in sorted((GRAPHS / "valid").glob("*.json"))}

    def test_wire_census(self):
        graphs = list(self.corpus.values()) + self.graphs + [compose_graphs(f, g) for f, g in zip(self.chains, self.chains[1:])]
        for graph in graphs:
            with self.subTest(graph=graph.name):
                self.assertEqual(len(graph.wires), sum(len(node.in_sockets) for node in graph.nodes))
                self.assertEqual(len(graph.wires), sum(len(node.out_sockets) for node in graph.nodes))

    def test_compose_is_associative(self):
        for f, g, h in zip(self.chains, self.chains[1:], self.chains[2:]):
            left = compose_graphs(compose_graphs(f, g), h)
            right = compose_graphs(f, compose_graphs(g, h))
            with self.subTest(chains=(f.name, g.name, h.name)):
                for a in range(1, 11):
                    self.assertEqual(evaluate(left, [NatValue(a)]).outputs, evaluate(right, [NatValue(a)]).outputs)

    def test_evaluation_is_deterministic(self):
        for graph in self.graphs:
            args = [NatValue(3), NatValue(8)]
            with self.subTest(graph=graph.name):
                self.assertEqual(evaluate(graph, args), evaluate(graph, args))

    def test_every_value_is_consumed_once(self):
        cases = [(graph, [NatValue(4), NatValue(2)]) for graph in self.graphs]
        cases.append((self.corpus["succ_twice"], load_inputs(INPUTS / "succ_twice.json")))
        cases.append((self.corpus["get_sum"], load_inputs(INPUTS / "get_sum_left.json")))
        for graph, args in cases:
            with self.subTest(graph=graph.name):
                self.assertEqual(evaluate(graph, args).transfers, len(graph.wires))


if __name__ == '__main__':
    unittest.main()
