import unittest

import numpy as np

from utils.evaluator import apply_value
from utils.relations import eval_relational
from utils.repro import DEFAULT_SEED, run_suite
from utils.tree_example import (
    BUILT, REMOVED, MutableTree, condition_s11, condition_s21, initial_state, random_replay, random_script,
    replay, tree_add, tree_del,
)
from utils.values import NatValue


class TestTreeOperations(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.start = initial_state()

    def test_initial_state(self):
        self.assertEqual(self.start.n, NatValue(1))
        self.assertEqual(self.start.tables(), {"node": [1], "father": [1], "leaf": [1]})

    def test_add_under_root(self):
        after = tree_add(self.start.with_operand(1))
        self.assertEqual(after.n, NatValue(2))
        self.assertEqual(after.tables(), {"node": [BUILT, BUILT], "father": [1, 1], "leaf": [REMOVED, BUILT]})

    def test_add_outside_tree_is_ignored(self):
        after = tree_add(self.start.with_operand(5))
        self.assertEqual(after.n, NatValue(1))
        self.assertEqual(after.tables(), self.start.tables())

    def test_delete_root_changes_nothing(self):
        after = tree_del(self.start.with_operand(1))
        self.assertEqual(after.n, self.start.n)
        self.assertEqual(after.tables(), self.start.tables())

    def test_delete_leaf_restores_parent(self):
        grown = tree_add(tree_add(self.start.with_operand(1)).with_operand(2))
        self.assertEqual(grown.tables()["leaf"], [REMOVED, REMOVED, BUILT])
        pruned = tree_del(grown.with_operand(3))
        self.assertEqual(pruned.tables(), {"node": [BUILT, BUILT, REMOVED], "father": [1, 1, 2],
                                           "leaf": [REMOVED, BUILT, REMOVED]})

    def test_skip_conditions(self):
        outside = apply_value(condition_s11(), *self.start.with_operand(3).values()).type_expr
        self.assertTrue(eval_relational(outside).inhabited)
        root = apply_value(condition_s21(), *self.start.values()).type_expr
        self.assertTrue(eval_relational(root).inhabited)
        inner = apply_value(condition_s21(), *tree_add(self.start.with_operand(1)).with_operand(2).values())
        self.assertFalse(eval_relational(inner.type_expr).inhabited)


class TestReplay(unittest.TestCase):
    def test_hand_script(self):
        script = [("add", 1), ("add", 2), ("add", 2), ("del", 3), ("del", 4), ("del", 2), ("add", 3)]
        self.assertEqual(replay(script), [])

    def test_random_scripts_match_mutable_tree(self):
        rows = random_replay(DEFAULT_SEED, scripts=100, max_length=30)
        self.assertEqual(len(rows), 100)
        for row in rows:
            with self.subTest(script=row["script"]):
                self.assertEqual(row["mismatches"], 0)

    def test_scripts_are_reproducible(self):
        first = random_script(np.random.default_rng(3), 30)
        second = random_script(np.random.default_rng(3), 30)
        self.assertEqual(first, second)
        self.assertTrue(all(action in ("add", "del") for action, _ in first))

    def test_mutable_tree(self):
        tree = MutableTree()
        tree.add(1)
        tree.add(1)
        tree.delete(2)
        self.assertEqual(tree.tables(), {"node": [1, 2, 1], "father": [1, 1, 1], "leaf": [2, 2, 1]})

    def test_tree_suite(self):
        result = run_suite("tree", seed=DEFAULT_SEED)
        self.assertTrue(result.passed)
        self.assertEqual(list(result.table["case"][:3]), ["initial-state", "del-root-initial", "del-root-random"])


if __name__ == '__main__':
    unittest.main()
