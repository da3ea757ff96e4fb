import itertools
import unittest

import numpy as np

from utils.errors import WitnessError
from utils.evaluator import apply_value
from utils.relations import (
    AXIOMS, Status, axiom_witness, check_witness, equal, equiv_build, eval_relational, greater,
    instantiate_family, l_plus, l_times, lem_build, lesser, negate, nested_quantifier_compose,
    procedure_n, q_plus, relation,
)
from utils.type_system import Neg, Pi, Product, RelAtom, RelKind, Sigma, Sum
from utils.values import NatValue, Witness


def decide(op, *args, bound=None):
    claim = apply_value(op, *(NatValue(a) for a in args)).type_expr
    return eval_relational(claim, bound=bound), claim


class TestProcedureN(unittest.TestCase):
    def test_trichotomy(self):
        for n, k in itertools.product(range(1, 51), repeat=2):
            with self.subTest(n=n, k=k):
                verdicts = [eval_relational(make(n, k)) for make in (equal, lesser, greater)]
                self.assertEqual(sum(v.inhabited for v in verdicts), 1)
                expected = RelKind.EQUAL if n == k else RelKind.LESSER if n < k else RelKind.GREATER
                self.assertIs(procedure_n(n, k).outcome, expected)

    def test_witnesses_are_checked(self):
        for n, k in itertools.product(range(1, 13), repeat=2):
            for t in (equal(n, k), lesser(n, k), greater(n, k)):
                verdict = eval_relational(t)
                with self.subTest(t=str(t)):
                    claim = t if verdict.inhabited else negate(t)
                    self.assertTrue(check_witness(claim, verdict.witness))

    def test_forged_record_rejected(self):
        forged = Witness("procedure_n", greater(2, 5), data=(2, 5, 2))
        self.assertFalse(check_witness(greater(2, 5), forged))
        self.assertFalse(check_witness(lesser(2, 5), forged))


class TestCompoundTypes(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        rng = np.random.default_rng(11)
        kinds = (equal, lesser, greater)

        def atom():
            return kinds[int(rng.integers(0, 3))](int(rng.integers(1, 9)), int(rng.integers(1, 9)))

        cls.instances = []
        for _ in range(200):
            shape = int(rng.integers(0, 3))
            if shape == 0:
                cls.instances.append(atom())
            elif shape == 1:
                cls.instances.append(Product(atom(), Sum(atom(), atom())))
            else:
                cls.instances.append(Sum(Neg(atom()), Product(atom(), atom())))

    def test_double_negation(self):
        for t in self.instances:
            with self.subTest(t=str(t)):
                self.assertIs(eval_relational(Neg(Neg(t))).status, eval_relational(t).status)

    def test_excluded_middle(self):
        for t in self.instances:
            verdict = eval_relational(Sum(t, Neg(t)))
            with self.subTest(t=str(t)):
                self.assertTrue(verdict.inhabited)
                self.assertTrue(check_witness(Sum(t, Neg(t)), verdict.witness))

    def test_lem_build(self):
        lem = lem_build(relation("lt(_1;_2)"))
        for n, k in itertools.product(range(1, 8), repeat=2):
            verdict, claim = decide(lem, n, k)
            with self.subTest(n=n, k=k):
                self.assertTrue(verdict.inhabited)
                self.assertTrue(check_witness(claim, verdict.witness))

    def test_empty_verdict_witnesses_complement(self):
        for t in self.instances:
            verdict = eval_relational(t)
            if verdict.status is Status.EMPTY:
                with self.subTest(t=str(t)):
                    self.assertTrue(check_witness(negate(t), verdict.witness))


class TestCombinators(unittest.TestCase):
    def test_equiv_greater_lesser(self):
        equiv = equiv_build(relation("gt(_1;_2)"), relation("lt(_2;_1)"))
        for n, k in itertools.product(range(1, 21), repeat=2):
            verdict, claim = decide(equiv, n, k)
            with self.subTest(n=n, k=k):
                self.assertTrue(verdict.inhabited)
                self.assertTrue(check_witness(claim, verdict.witness))

    def test_equiv_detects_difference(self):
        equiv = equiv_build(relation("gt(_1;_2)"), relation("lt(_1;_2)"))
        verdict, _ = decide(equiv, 4, 2)
        self.assertIs(verdict.status, Status.EMPTY)

    def test_windows_against_brute_force(self):
        r = relation("gt(_1;7)")
        for k in range(1, 12):
            plus, times = l_plus(r, k), l_times(r, k)
            for n in range(1, 8):
                window = range(k, k + n)
                with self.subTest(k=k, n=n):
                    self.assertEqual(decide(plus, n)[0].inhabited, any(i > 7 for i in window))
                    self.assertEqual(decide(times, n)[0].inhabited, all(i > 7 for i in window))

    def test_q_plus(self):
        op = q_plus(relation("eq(_1;4)"), relation("eq(_1;9)"))
        self.assertEqual([i for i in range(1, 12) if decide(op, i)[0].inhabited], [3, 9])

    def test_nested_quantifier_compose(self):
        p = nested_quantifier_compose(relation("gt(_1;_2)"))
        for n, k in itertools.product(range(1, 7), repeat=2):
            claim = apply_value(apply_value(p, NatValue(n)), NatValue(k)).type_expr
            with self.subTest(n=n, k=k):
                self.assertEqual(eval_relational(claim).inhabited, n > k)


class TestQuantifiers(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.above_five = relation("gt(_1;5)")

    def test_unbounded_is_undecidable(self):
        for t in (Pi(self.above_five), Sigma(self.above_five)):
            with self.subTest(t=str(t)):
                self.assertIs(eval_relational(t).status, Status.UNDECIDABLE)

    def test_explicit_bound(self):
        exists = eval_relational(Sigma(self.above_five), bound=10)
        self.assertTrue(exists.inhabited)
        self.assertEqual(exists.witness.data, (6,))
        self.assertTrue(check_witness(Sigma(self.above_five), exists.witness))

        forall = eval_relational(Pi(self.above_five), bound=10)
        self.assertIs(forall.status, Status.EMPTY)
        self.assertTrue(check_witness(negate(Pi(self.above_five)), forall.witness))

    def test_own_bound_wins(self):
        self.assertIs(eval_relational(Sigma(self.above_five, 5), bound=10).status, Status.EMPTY)
        verdict = eval_relational(Pi(relation("lt(_1;9)"), 8))
        self.assertTrue(verdict.inhabited)
        self.assertTrue(check_witness(Pi(relation("lt(_1;9)"), 8), verdict.witness))

    def test_template_quantifier(self):
        op = relation("pi[v;3](gt(v;_1))")
        self.assertIs(decide(op, 1)[0].status, Status.EMPTY)
        self.assertIs(eval_relational(instantiate_family(relation("sigma[v;3](gt(v;_1))"), 2)).status,
                      Status.INHABITED)


class TestAxioms(unittest.TestCase):
    def test_axioms_hold(self):
        for name, axiom in AXIOMS.items():
            for args in itertools.product(range(1, 5), repeat=axiom.arity):
                witness = axiom_witness(name, *args)
                with self.subTest(axiom=name, args=args):
                    self.assertTrue(check_witness(witness.claim, witness))
                    self.assertTrue(eval_relational(witness.claim).inhabited)

    def test_axiom_claim_is_fixed(self):
        witness = axiom_witness("succ_greater", 3)
        self.assertEqual(witness.claim, greater(4, 3))
        self.assertFalse(check_witness(greater(5, 3), witness))

    def test_unknown_axiom(self):
        with self.assertRaises(WitnessError):
            axiom_witness("no_such_axiom", 1)
        with self.assertRaises(WitnessError):
            axiom_witness("equal_refl", 1, 2)

    def test_unknown_rule_rejected(self):
        self.assertFalse(check_witness(equal(1, 1), Witness("guess", equal(1, 1))))
        self.assertFalse(check_witness(equal(1, 1), RelAtom(RelKind.EQUAL, 1, 1)))


if __name__ == '__main__':
    unittest.main()
