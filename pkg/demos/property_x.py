"""Factorisation witnesses s = f t g for random elements of several monoids.

Each witness is checked twice: the identity on a window of points, and the
transfer of basic neighbourhoods of t back to neighbourhoods of s.
"""
from __future__ import annotations

import random

from semitop import propx

if __name__ == "__main__":
    rng = random.Random(1)
    for monoid in ("XX", "PX", "IX", "InjX", "BX"):
        s = propx.random_element(monoid, rng)
        w = propx.witness(monoid, s)
        rep = propx.verify_identity(w, window=32)
        print(f"{monoid:5s} s={s.name:30.30s} identity: {'pass' if rep.ok else 'fail'}")
        suite = propx.run_suite(monoid, samples=5, window=64, seed=3, nbhds=4, ks=4)
        print(f"      5 random elements, {suite.checks} probes, {len(suite.failures)} failures")
