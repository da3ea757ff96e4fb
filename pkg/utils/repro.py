"""
Воспроизведение построений со сравнением с эталонами на Python.
Каждый набор возвращает таблицу сравнений и общий результат.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import pandas as pd

from utils.constructions import (
    bounded_search_g, build_rec, constant_sequence, eq_decide, equal_relation, grzegorczyk_iterator,
    linear_scan, patched_sequence, rec_oracle, theorem_forall_exists_greater, toy_enumeration,
)
from utils.construction_graph import compose_graphs
from utils.errors import UniverseError
from utils.evaluator import apply_value
from utils.primitive_ops import Iter, change_graph, iter_graph, pred_op, primitive_graph, succ_op
from utils.relations import DEFAULT_BOUND, Status
from utils.tree_example import initial_state, random_replay, random_script, tree_add, tree_del
from utils.type_system import NAT
from utils.values import NatValue, OpValue

logger = logging.getLogger(__name__)

DEFAULT_SEED = 20
ITER_MAX_N = 12
ITER_MAX_A = 30
REC_MAX_K = 8
REC_MAX_A = 15
THEOREM_MAX_K = 20
TREE_SCRIPTS = 100
TREE_MAX_LENGTH = 30
SEARCH_MAX_N = 50


@dataclass
class SuiteResult:
    name: str
    table: pd.DataFrame
    fields: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.table["ok"].all()) if not self.table.empty else False

    @property
    def failures(self) -> int:
        return int((~self.table["ok"]).sum()) if not self.table.empty else 0


def _nat_op(f: OpValue) -> Callable[[int], int]:
    return lambda a: apply_value(f, NatValue(a)).count


# --- iter ---

def _iter_cases() -> list:
    succ = succ_op()
    return [
        ("succ", succ, lambda a: a + 1),
        ("iter(2;succ)", OpValue(iter_graph(2, succ.graph)), lambda a: a + 2),
        ("change(3;7;succ)", OpValue(change_graph(3, NatValue(7), succ)), lambda a: 7 if a == 3 else a + 1),
    ]


def iter_suite(seed: int = DEFAULT_SEED, bound: int = DEFAULT_BOUND) -> SuiteResult:
    iterate = OpValue(primitive_graph(Iter(NAT)))
    rows = []
    for label, f, oracle in _iter_cases():
        for n in range(1, ITER_MAX_N + 1):
            g = _nat_op(apply_value(iterate, NatValue(n), f))
            mismatches = 0
            for a in range(1, ITER_MAX_A + 1):
                expected = a
                for _ in range(n):
                    expected = oracle(expected)
                mismatches += g(a) != expected
            rows.append({"op": label, "n": n, "checked": ITER_MAX_A, "mismatches": mismatches,
                         "ok": mismatches == 0})
    return SuiteResult("iter", pd.DataFrame(rows), {"max_n": ITER_MAX_N, "max_a": ITER_MAX_A})


# --- grzegorczyk ---

def sample_sequences() -> dict:
    succ, pred = succ_op(), pred_op()
    return {
        "succ": constant_sequence(succ),
        "patched": patched_sequence({2: OpValue(iter_graph(3, succ.graph)), 5: pred}, succ),
        "mixed": patched_sequence({1: OpValue(iter_graph(4, succ.graph)), 3: succ, 6: succ}, pred),
    }


def grzegorczyk_suite(seed: int = DEFAULT_SEED, bound: int = DEFAULT_BOUND) -> SuiteResult:
    rec = OpValue(build_rec(NAT))
    curried = OpValue(grzegorczyk_iterator(NAT))
    rows = []
    for label, c in sample_sequences().items():
        by_sequence = apply_value(curried, c)
        for k in range(1, REC_MAX_K + 1):
            direct = _nat_op(apply_value(rec, NatValue(k), c))
            via_curry = _nat_op(apply_value(by_sequence, NatValue(k)))
            mismatches = 0
            for a in range(1, REC_MAX_A + 1):
                expected = rec_oracle(k, c, NatValue(a)).count
                mismatches += (direct(a) != expected) + (via_curry(a) != expected)
            rows.append({"sequence": label, "k": k, "checked": REC_MAX_A, "mismatches": mismatches,
                         "ok": mismatches == 0})
    return SuiteResult("grzegorczyk", pd.DataFrame(rows), {"max_k": REC_MAX_K, "max_a": REC_MAX_A})


# --- forall-exists ---

def forall_exists_suite(seed: int = DEFAULT_SEED, bound: int = DEFAULT_BOUND) -> SuiteResult:
    _, rows = theorem_forall_exists_greater(THEOREM_MAX_K)
    for row in rows:
        row["ok"] = row["first"] == row["k"] and row["witness_valid"] and row["sigma_valid"]
    return SuiteResult("forall-exists", pd.DataFrame(rows), {"max_k": THEOREM_MAX_K})


# --- tree ---

def _pinned_tree_facts(seed: int) -> list:
    """Начальное состояние Change(1; 1; const(3)) и del на корне без изменений"""
    start = initial_state()
    rows = [{"case": "initial-state", "length": 0,
             "mismatches": int(start.tables() != {"node": [1], "father": [1], "leaf": [1]})}]
    state = start
    for action, o in random_script(np.random.default_rng(seed), 12):
        state = (tree_add if action == "add" else tree_del)(state.with_operand(o))
    for label, s in (("del-root-initial", start), ("del-root-random", state)):
        after = tree_del(s.with_operand(1))
        rows.append({"case": label, "length": 1,
                     "mismatches": int(after.n != s.n or after.tables() != s.tables())})
    return rows


def tree_suite(seed: int = DEFAULT_SEED, bound: int = DEFAULT_BOUND) -> SuiteResult:
    rows = _pinned_tree_facts(seed)
    rows += [{"case": f"script-{row['script']}", "length": row["length"], "mismatches": row["mismatches"]}
             for row in random_replay(seed, TREE_SCRIPTS, TREE_MAX_LENGTH)]
    table = pd.DataFrame(rows)
    table["ok"] = table["mismatches"] == 0
    return SuiteResult("tree", table, {"seed": seed, "scripts": TREE_SCRIPTS, "max_length": TREE_MAX_LENGTH})


# --- bounded-search ---

def bounded_search_suite(seed: int = DEFAULT_SEED, bound: int = DEFAULT_BOUND) -> SuiteResult:
    enum, eq = toy_enumeration(), equal_relation()
    code = _nat_op(enum)
    rows = []
    for n in range(1, SEARCH_MAX_N + 1):
        for target in sorted({code((n + 1) // 2), code(n), code(n + 3)}):
            found = bounded_search_g(enum, eq, NatValue(target), n)
            expected = linear_scan(enum, NatValue(target), n)
            rows.append({"n": n, "target": target, "g": found, "scan": expected, "ok": found == expected})
    return SuiteResult("bounded-search", pd.DataFrame(rows), {"max_n": SEARCH_MAX_N})


# --- eq-functionals ---

def eq_suite(seed: int = DEFAULT_SEED, bound: int = DEFAULT_BOUND) -> SuiteResult:
    succ, pred = succ_op(), pred_op()
    far = bound + 2
    cases = [
        ("succ", "succ", succ, succ),
        ("succ", "iter(1;succ)", succ, OpValue(iter_graph(1, succ.graph))),
        ("succ", "pred", succ, pred),
        ("succ", f"change({far};1;succ)", succ, OpValue(change_graph(far, NatValue(1), succ))),
    ]
    rows = []
    for f_name, g_name, f, g in cases:
        for limit in (bound, far, None):
            if limit is None:
                expected = Status.UNDECIDABLE
            else:
                same = all(_nat_op(f)(a) == _nat_op(g)(a) for a in range(1, limit + 1))
                expected = Status.INHABITED if same else Status.EMPTY
            status = eq_decide(NAT, f, g, limit)
            rows.append({"f": f_name, "g": g_name, "bound": "none" if limit is None else limit,
                         "expected": expected.value, "status": status.value, "ok": status is expected})
    # compose(f; succ) отличается от f в каждой точке
    for f_name, f in (("succ", succ), ("pred", pred), ("iter(3;succ)", OpValue(iter_graph(3, succ.graph)))):
        shifted = OpValue(compose_graphs(f.graph, succ.graph))
        differs = all(_nat_op(f)(a) != _nat_op(shifted)(a) for a in range(1, bound + 1))
        status = eq_decide(NAT, f, shifted, bound)
        rows.append({"f": f_name, "g": f"compose({f_name};succ)", "bound": bound, "expected": Status.EMPTY.value,
                     "status": status.value, "ok": differs and status is Status.EMPTY})
    return SuiteResult("eq-functionals", pd.DataFrame(rows), {"bound": bound})


SUITES = {
    "iter": iter_suite,
    "grzegorczyk": grzegorczyk_suite,
    "forall-exists": forall_exists_suite,
    "tree": tree_suite,
    "bounded-search": bounded_search_suite,
    "eq-functionals": eq_suite,
}


def run_suite(name: str, seed: int = DEFAULT_SEED, bound: int = DEFAULT_BOUND) -> SuiteResult:
    if name not in SUITES:
        raise KeyError(f"неизвестный набор: {name}")
    logger.info("Запуск набора '%s' (seed=%d, bound=%d)", name, seed, bound)
    try:
        result = SUITES[name](seed=seed, bound=bound)
    except UniverseError:
        logger.error("Набор '%s' прерван ошибкой", name, exc_info=True)
        raise
    level = logging.INFO if result.passed else logging.WARNING
    logger.log(level, "Набор '%s': %d сравнений, %d расхождений", name, len(result.table), result.failures)
    return result
