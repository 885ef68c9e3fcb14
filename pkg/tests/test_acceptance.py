"""The twelve acceptance criteria, each at full size with its stated time budget.

Each test records one line ``criterion N: pass|fail ...``; the lines are printed in
the pytest summary, sorted by criterion.
"""
from __future__ import annotations

import itertools
import sys
import time

import pytest

from semitop import suites
from semitop.fintop import semigroup_library

# criterion -> (suite, keyword arguments, seconds allowed or None)
CRITERIA = {
    1: (suites.zariski_oracle, {}, 60),
    2: (suites.semitopological, {}, 30),
    3: (suites.max_chain_table, {}, None),
    4: (suites.topology_counts, {}, None),
    5: (suites.propx_witnesses, {"samples": 100, "window": 64, "nbhds": 10, "ks": 10}, 120),
    6: (suites.metrics, {"pairs": 1000}, None),
    7: (suites.normalize, {"probes": 10_000}, None),
    8: (suites.embeddings, {"random_submonoids": 5, "monoids": 10}, None),
    9: (suites.bipartitions, {"triples": 10_000, "max_degree": 5}, 30),
    10: (suites.cardinality, {"instances": 500}, None),
    11: (suites.cantor_suite, {"instances": 20, "mill_depth": 16, "maps": 20}, None),
    12: (suites.horn, {"per_case": 50, "triples": 1000}, None),
}


LINES: list[str] = []     # shown by the terminal summary hook in conftest


def _report(n: int, ok: bool, text: str) -> None:
    LINES.append(f"criterion {n:2d}: {'pass' if ok else 'fail'}  {text}")


def _canonical(table) -> tuple:
    n = len(table)
    best = None
    for p in itertools.permutations(range(n)):
        inv = {p[i]: i for i in range(n)}
        t = tuple(tuple(p[table[inv[a]][inv[b]]] for b in range(n)) for a in range(n))
        best = t if best is None or t < best else best
    return best


def _all_semigroups(n: int) -> set:
    """Associative tables on n points, up to isomorphism, by brute force."""
    seen = set()
    for flat in itertools.product(range(n), repeat=n * n):
        t = [flat[i * n:(i + 1) * n] for i in range(n)]
        if all(t[t[a][b]][c] == t[a][t[b][c]] for a in range(n) for b in range(n) for c in range(n)):
            seen.add(_canonical(t))
    return seen


def test_library_covers_small_orders():
    lib = semigroup_library()
    have = {_canonical(S.table) for S in lib}
    missing = sum(len(_all_semigroups(n) - have) for n in (1, 2, 3))
    ok = len(lib) >= 50 and max(S.order for S in lib) <= 4 and missing == 0
    _report(1, ok, f"library precondition: {len(lib)} semigroups, {missing} of order <= 3 missing")
    assert ok


@pytest.mark.parametrize("n", sorted(CRITERIA))
def test_criterion(n):
    fn, kw, budget = CRITERIA[n]
    t0 = time.perf_counter()
    r = fn(0, **kw)
    dt = time.perf_counter() - t0
    in_time = budget is None or dt < budget
    limit = f" (limit {budget}s)" if budget else ""
    _report(n, r.ok and in_time, f"{r.name}: {r.checks} checks, {r.n_failures} failures, {dt:.1f}s{limit}")
    assert r.ok, r.failures
    assert in_time, f"took {dt:.1f}s, budget {budget}s"


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
