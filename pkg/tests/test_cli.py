import io
import json
import logging
import os
import tempfile
import unittest
from contextlib import redirect_stderr, redirect_stdout
from pathlib import Path

from main import main
from utils.logging_config import LOG_DIR_ENV

TEST_DATA = Path(__file__).resolve().parent.parent / "test_data"
VALID = TEST_DATA / "graphs" / "valid"
INVALID = TEST_DATA / "graphs" / "invalid"
INPUTS = TEST_DATA / "inputs"
CONTINUUM = TEST_DATA / "continuum"


class TestCommandLine(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.log_dir = tempfile.TemporaryDirectory()
        cls.previous = os.environ.get(LOG_DIR_ENV)
        os.environ[LOG_DIR_ENV] = cls.log_dir.name

    @classmethod
    def tearDownClass(cls):
        for handler in list(logging.getLogger().handlers):
            handler.close()
            logging.getLogger().removeHandler(handler)
        if cls.previous is None:
            os.environ.pop(LOG_DIR_ENV, None)
        else:
            os.environ[LOG_DIR_ENV] = cls.previous
        cls.log_dir.cleanup()

    def run_cli(self, *argv):
        out, err = io.StringIO(), io.StringIO()
        with redirect_stdout(out), redirect_stderr(err):
            code = main([str(a) for a in argv])
        return code, out.getvalue(), err.getvalue()

    def test_check_valid(self):
        code, out, _ = self.run_cli("check", VALID / "succ_twice.json")
        self.assertEqual(code, 0)
        self.assertIn("STATUS: ok", out)
        self.assertIn("SIGNATURE: (N -> N)", out)

    def test_check_violations(self):
        for name, kind in (("double_consumption", "double_consumption"), ("cycle", "cycle"),
                           ("type_mismatch", "type_mismatch")):
            code, out, _ = self.run_cli("check", INVALID / f"{name}.json")
            with self.subTest(graph=name):
                self.assertEqual(code, 1)
                self.assertIn("STATUS: violations", out)
                self.assertIn(kind, out)

    def test_eval(self):
        code, out, _ = self.run_cli("eval", VALID / "succ_twice.json", INPUTS / "succ_twice.json", "--json")
        self.assertEqual(code, 0)
        document = json.loads(out)
        self.assertEqual(document["fields"]["FIRED"], 2)
        self.assertEqual(document["fields"]["TRANSFERS"], 3)
        self.assertEqual(document["tables"]["outputs"],
                         [{"output": 0, "active": True, "type": "N", "value": "6"}])

    def test_eval_exclusive_outputs(self):
        code, out, _ = self.run_cli("eval", VALID / "get_sum.json", INPUTS / "get_sum_left.json", "--json")
        self.assertEqual(code, 0)
        rows = json.loads(out)["tables"]["outputs"]
        self.assertEqual([row["active"] for row in rows], [True, False])
        self.assertEqual(rows[1]["value"], "null")

    def test_eval_bad_inputs(self):
        for inputs in ("not_natural.json", "bad_pair.json"):
            code, out, err = self.run_cli("eval", VALID / "succ_twice.json", INPUTS / inputs)
            with self.subTest(inputs=inputs):
                self.assertEqual(code, 2)
                self.assertEqual(out, "")
                self.assertTrue(any(line.startswith("ERROR: ") for line in err.splitlines()))

    def test_eval_inputs_not_matching_graph(self):
        cases = (("succ_twice.json", "greater_relation.json", "inputs: "),
                 ("get_sum.json", "succ_twice.json", "inputs[0]: "))
        for graph, inputs, field in cases:
            code, out, err = self.run_cli("eval", VALID / graph, INPUTS / inputs)
            with self.subTest(graph=graph, inputs=inputs):
                self.assertEqual(code, 2)
                self.assertEqual(out, "")
                self.assertTrue(any(line.startswith(f"ERROR: {field}") for line in err.splitlines()))

    def test_missing_file(self):
        code, _, err = self.run_cli("check", VALID / "no_such_graph.json")
        self.assertEqual(code, 2)
        self.assertIn("ERROR", err)

    def test_repro_json(self):
        code, out, _ = self.run_cli("repro", "forall-exists", "--json")
        self.assertEqual(code, 0)
        document = json.loads(out)
        self.assertEqual(document["fields"]["STATUS"], "pass")
        self.assertEqual(document["fields"]["COMPARISONS"], 20)

    def test_repro_is_byte_identical(self):
        first = self.run_cli("repro", "eq-functionals", "--seed", 7)
        second = self.run_cli("repro", "eq-functionals", "--seed", 7)
        self.assertEqual(first[0], 0)
        self.assertEqual(first[1], second[1])

    def test_continuum_analyze(self):
        code, out, _ = self.run_cli("continuum", "analyze", CONTINUUM / "annulus.txt")
        self.assertEqual(code, 0)
        self.assertIn("TREE: b(w(b()))", out)
        self.assertIn("BLACK_COMPONENTS: 2", out)

    def test_continuum_similar(self):
        code, out, _ = self.run_cli("continuum", "similar", CONTINUUM / "two_rings.txt", CONTINUUM / "nested_rings.txt")
        self.assertEqual(code, 0)
        self.assertIn("SIMILAR: false", out)
        self.assertIn("FIRST_COMPONENTS: 2 white, 3 black", out)

    def test_continuum_bad_grid(self):
        code, _, err = self.run_cli("continuum", "analyze", CONTINUUM / "bad_symbol.txt")
        self.assertEqual(code, 2)
        self.assertTrue(any(line.startswith("ERROR: ") for line in err.splitlines()))

    def test_enum_types(self):
        code, out, _ = self.run_cli("enum-types", 5, "--json")
        self.assertEqual(code, 0)
        rows = json.loads(out)["tables"]["types"]
        self.assertEqual([row["index"] for row in rows], [1, 2, 3, 4, 5])
        self.assertEqual(rows[0]["type"], "N")
        self.assertEqual(rows[2]["type"], "(N x N)")

    def test_usage_errors(self):
        for argv in (("enum-types", 0), ("repro", "nothing"), ("continuum",), ()):
            with self.subTest(argv=argv):
                with self.assertRaises(SystemExit) as ctx:
                    self.run_cli(*argv)
                self.assertEqual(ctx.exception.code, 2)


if __name__ == '__main__':
    unittest.main()
