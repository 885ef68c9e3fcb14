"""The twelve verification suites, shared by the CLI and the acceptance tests.

Each suite is seeded, returns a :class:`SuiteResult`, and never includes timing
in its JSON so that reports are reproducible byte for byte.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from . import cantor, clones, propx
from .elements import (UNDEF, ALEPH0, CardinalTag, bipartition_product, cardinal_data, check_certificate,
                       compose, finitary, identity_bipartition, IDENTITY_TAIL)
from .embeddings import (identity_congruence, inverse_submonoid, luke1_embed, right_regular_representation,
                         vp_congruences_from_action, vp_embed)
from .fintop import (FiniteSemigroup, bits, check_semigroup_topology, count_topologies_via_preorders,
                     enumerate_topologies, is_continuous, max_chain, semigroup_library,
                     symmetric_inverse_monoid)
from .sampling import bipartition, injection, partial_bijection_with_tail, surjection
from .subbasis import NamedSet, ball_to_basic, member, metric, normalize_I4
from .zariski import (elementary_algebraic, elementary_sets_from_maps, max_chain_case_table,
                      word_functions, word_functions_by_enumeration, zariski_topology)

MAX_FAILURES = 20


@dataclass
class SuiteResult:
    criterion: int
    name: str
    seed: int
    checks: int = 0
    n_failures: int = 0
    failures: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.n_failures == 0

    def check(self, cond: bool, what) -> bool:
        self.checks += 1
        if not cond:
            self.n_failures += 1
            if len(self.failures) < MAX_FAILURES:
                self.failures.append(what if isinstance(what, (str, dict)) else str(what))
        return cond

    def to_json(self) -> dict:
        return {"criterion": self.criterion, "suite": self.name, "seed": self.seed,
                "verdict": "pass" if self.ok else "fail", "checks": self.checks,
                "n_failures": self.n_failures, "failures": self.failures, "details": self.details}


def _modes(S: FiniteSemigroup) -> list[str]:
    return ["semigroup", "inverse"] if S.inverse is not None else ["semigroup"]


def zariski_oracle(seed: int = 0) -> SuiteResult:
    r = SuiteResult(1, "zariski-oracle", seed)
    lib = semigroup_library()
    r.details["semigroups"] = len(lib)
    r.details["max_order"] = max(S.order for S in lib)
    for S in lib:
        for mode in _modes(S):
            for words in ("strict", "with_constants"):
                fam = elementary_algebraic(S, mode, words)
                maps = word_functions_by_enumeration(S, mode, words)
                closure = {w.induced for w in word_functions(S, mode, words)}
                r.check(closure == maps, f"{S.name or S.table}/{mode}/{words}: word maps differ")
                r.check(fam.masks == elementary_sets_from_maps(maps, S.order),
                        f"{S.name or S.table}/{mode}/{words}: elementary families differ")
                r.check(fam.check(), f"{S.name or S.table}/{mode}/{words}: witness words wrong")
    return r


def semitopological(seed: int = 0) -> SuiteResult:
    r = SuiteResult(2, "semitopological", seed)
    lib = semigroup_library()
    inverse = 0
    for S in lib:
        for mode in _modes(S):
            t = zariski_topology(S, mode)
            rep = check_semigroup_topology(S, t)
            r.check(rep.left_semitopological and rep.right_semitopological,
                    f"{S.name or S.table}/{mode}: not semitopological")
            if S.inverse is not None:
                r.check(is_continuous(S.inverse, t), f"{S.name or S.table}/{mode}: inversion discontinuous")
        inverse += S.inverse is not None
    r.details.update(semigroups=len(lib), inverse_semigroups=inverse)
    return r


def max_chain_table(seed: int = 0, sizes=range(2, 7)) -> SuiteResult:
    r = SuiteResult(3, "max-chain-case-table", seed)
    for n in sizes:
        for adjoin in (False, True):
            S = max_chain(n)
            size = n + 1 if adjoin else n
            mul = lambda a, x: x if a == n else max(a, x)
            pred = max_chain_case_table(n, adjoin)
            masks = elementary_algebraic(S, "semigroup", "with_constants", adjoin).masks
            for a in range(size):
                for b in range(size):
                    V = bits(x for x in range(n) if mul(a, x) == mul(b, x))
                    W = bits(x for x in range(n) if b < n and mul(a, x) == b)
                    if b == n:      # the identity as a constant lies outside S
                        W = 0
                    tag = f"n={n} adjoin={adjoin} a={a} b={b}"
                    r.check((V, W) == pred[(a, b)], tag + ": prediction differs")
                    r.check(V in masks and W in masks, tag + ": not elementary algebraic")
    return r


def topology_counts(seed: int = 0) -> SuiteResult:
    r = SuiteResult(4, "topology-counts", seed)
    expected = {2: 4, 3: 29}
    for n, want in expected.items():
        a = sum(1 for _ in enumerate_topologies(n))
        b = count_topologies_via_preorders(n)
        r.details[str(n)] = a
        r.check(a == b == want, f"n={n}: lattice {a}, preorders {b}, expected {want}")
    return r


CRITERION5_MONOIDS = ("XX", "PX", "IX", "InjX", "BX")


def propx_witnesses(seed: int = 0, samples: int = 100, window: int = 64, nbhds: int = 10,
                    ks: int = 10, monoids=CRITERION5_MONOIDS) -> SuiteResult:
    r = SuiteResult(5, "propx-witnesses", seed)
    for m in monoids:
        rep = propx.run_suite(m, samples=samples, window=window, seed=seed, nbhds=nbhds, ks=ks)
        r.checks += rep.checks
        r.n_failures += len(rep.failures)
        r.failures.extend(rep.failures[:5])
        r.details[m] = {"elements": rep.elements, "checks": rep.checks, "verdict": "pass" if rep.ok else "fail"}
    return r


def _equal(f, g) -> bool:
    sf, sg = f.support, g.support
    return sf.tail == sg.tail and all(sf(x) == sg(x) for x in range(max(sf.m, sg.m) + 1))


def _near(rng: random.Random, f):
    """f followed by a permutation moving only points >= r."""
    r = rng.randint(0, 8)
    tail = list(range(r, r + 4))
    rng.shuffle(tail)
    return compose(f, finitary(list(range(r)) + tail, IDENTITY_TAIL))


def metrics(seed: int = 0, pairs: int = 1000) -> SuiteResult:
    r = SuiteResult(6, "metrics", seed)
    rng = random.Random(f"metrics:{seed}")
    for mid in ("d_I1", "d1", "d2", "d4", "d_inj"):
        gen = (lambda: injection(rng, rng.randint(1, 6))) if mid == "d_inj" else \
              (lambda: partial_bijection_with_tail(rng, rng.randint(1, 6)))
        for i in range(pairs):
            f = gen()
            g = gen() if rng.random() < 0.5 else _near(rng, f)
            h = gen() if rng.random() < 0.5 else _near(rng, g)
            dfg, dgf, dgh, dfh = metric(mid, f, g), metric(mid, g, f), metric(mid, g, h), metric(mid, f, h)
            tag = f"{mid} #{i}"
            r.check(metric(mid, f, f) == 0, tag + ": d(f,f) != 0")
            r.check(dfg == dgf, tag + ": not symmetric")
            r.check((dfg == 0) == _equal(f, g), tag + ": zero distance disagrees with equality")
            r.check(dfh <= dfg + dgh, tag + ": triangle inequality")
            r.check(0 <= dfg <= 1, tag + ": out of [0,1]")
    for i in range(pairs):
        f = partial_bijection_with_tail(rng, rng.randint(1, 6))
        g = partial_bijection_with_tail(rng, rng.randint(1, 6)) if rng.random() < 0.5 else _near(rng, f)
        r.check(metric("d4", f, g) == max(metric("d1", f, g), metric("d2", f, g)), f"d4 #{i}")
        m = rng.randint(0, 8)
        B = ball_to_basic(f, m)
        r.check(B.member(g) == (metric("d4", f, g) <= Fraction(1, m + 1)), f"ball #{i} m={m}")
    return r


def normalize(seed: int = 0, probes: int = 10_000) -> SuiteResult:
    r = SuiteResult(7, "normalize-I4", seed)
    rng = random.Random(f"normalize:{seed}")
    agree_true = 0
    for i in range(probes):
        e = partial_bijection_with_tail(rng, rng.randint(1, 6))
        sets = []
        for _ in range(rng.randint(0, 4)):
            kind = rng.choice(["U", "U", "W", "Winv"])
            x = rng.randrange(8)
            if kind == "U":
                y = e(x) if rng.random() < 0.6 and e(x) is not UNDEF else rng.randrange(8)
                sets.append(NamedSet("U", (x, y)))
            else:
                sets.append(NamedSet(kind, (x,)))
        direct = all(member(e, s) for s in sets)
        got = normalize_I4(sets).member(e)
        agree_true += bool(direct)
        r.check(got == direct, {"probe": i, "sets": [str(s) for s in sets]})
    r.details["members"] = agree_true
    return r


def _random_pbij(rng: random.Random, n: int) -> dict:
    dom = rng.sample(range(n), rng.randint(0, n))
    img = rng.sample(range(n), len(dom))
    return dict(zip(dom, img))


def embeddings(seed: int = 0, random_submonoids: int = 5, monoids: int = 10) -> SuiteResult:
    r = SuiteResult(8, "embeddings", seed)
    rng = random.Random(f"embeddings:{seed}")
    cases = [("I2",) + symmetric_inverse_monoid(2) + (2,), ("I3",) + symmetric_inverse_monoid(3) + (3,)]
    for k in range(random_submonoids):
        gens = [_random_pbij(rng, 3) for _ in range(rng.randint(1, 3))]
        S, elems = inverse_submonoid(gens, 3)
        cases.append((f"sub{k}", S, elems, 3))
    for name, S, elems, n in cases:
        rep = vp_embed(S, vp_congruences_from_action(S, elems, n))
        r.check(rep.homomorphism, f"{name}: not a homomorphism")
        r.check(rep.injective, f"{name}: not injective")
        r.check(rep.checks["preserves_inversion"], f"{name}: inversion not preserved")
    r.details["vp_cases"] = [c[0] for c in cases]
    lib = [S for S in semigroup_library() if S.identity is not None and S.order >= 2][:monoids]
    for M in lib:
        rep = luke1_embed(M, [identity_congruence(M)])
        rr = right_regular_representation(M)
        r.check(rep.ok and [im.images for im in rep.images] == [im.images for im in rr],
                f"{M.name or M.table}: luke1 differs from the right regular representation")
    r.details["monoids"] = len(lib)
    return r


def bipartitions(seed: int = 0, triples: int = 10_000, max_degree: int = 5) -> SuiteResult:
    r = SuiteResult(9, "bipartitions", seed)
    rng = random.Random(f"bipartitions:{seed}")
    certs = 0
    for i in range(triples):
        n = rng.randint(1, max_degree)
        a, b, c = (bipartition(rng, n) for _ in range(3))
        ab, cert = bipartition_product(a, b)
        left = bipartition_product(ab, c)[0]
        right = bipartition_product(a, bipartition_product(b, c)[0])[0]
        r.check(left == right, f"triple #{i}: not associative")
        one = identity_bipartition(n)
        r.check(bipartition_product(one, a)[0] == a == bipartition_product(a, one)[0], f"#{i}: identity law")
        for p, q in cert.pairs():
            path = cert.path(p, q)
            ends = {(p[0], 0 if p[1] == 0 else 2), (q[0], 0 if q[1] == 0 else 2)}
            r.check(check_certificate(a, b, path) and {path[0], path[-1]} == ends,
                    f"#{i}: bad certificate {p}~{q}")
            certs += 1
    r.details["certificates"] = certs
    return r


def _coimage_sum(a: CardinalTag, b: CardinalTag) -> CardinalTag:
    return a + b


def cardinality(seed: int = 0, instances: int = 500) -> SuiteResult:
    r = SuiteResult(10, "cardinality-laws", seed)
    rng = random.Random(f"cardinality:{seed}")
    for i in range(instances):
        f, g = injection(rng, rng.randint(1, 6)), injection(rng, rng.randint(1, 6))
        fg = compose(f, g)
        want = _coimage_sum(cardinal_data(f).coimage, cardinal_data(g).coimage)
        got = fg.support.coimage() if fg.support is not None else cardinal_data(fg).coimage
        r.check(got == want, f"injection #{i}: {got} != {want}")
    for i in range(instances):
        f, g = surjection(rng, rng.randint(1, 6)), surjection(rng, rng.randint(1, 6))
        fg = compose(f, g)
        F = cardinal_data(f).fiber
        for y in range(12):
            pre = g.support.preimages(y)
            want = sum((F(z) for z in pre), CardinalTag(0))
            r.check(cardinal_data(fg).fiber(y) == want, f"surjection #{i} y={y}")
    return r


def cantor_suite(seed: int = 0, instances: int = 20, mill_depth: int = 16, maps: int = 20,
                 witness_depth: int = 12) -> SuiteResult:
    r = SuiteResult(11, "cantor", seed)
    rng = random.Random(f"cantor-suite:{seed}")
    for i in range(instances):
        A, B, phi, phi_inv, eps = cantor.random_mill_instance(rng)
        ext = cantor.mill_extend(A, B, phi, phi_inv, eps, depth=mill_depth)
        rep = cantor.verify_mill(ext, A, phi, depth=mill_depth, seed=seed * 1000 + i)
        r.check(rep.ok, {"instance": i, **rep.to_json()})
    for i in range(maps):
        s = cantor.random_map(rng)
        w = cantor.cantor_propx_witness(s, depth=witness_depth)
        rep = cantor.verify_witness(s, w, depth=witness_depth, seed=seed * 1000 + i)
        r.check(rep.ok, {"map": s.name, **rep.to_json()})
    return r


def horn(seed: int = 0, per_case: int = 50, triples: int = 1000) -> SuiteResult:
    r = SuiteResult(12, "horn", seed)
    rng = random.Random(f"horn:{seed}")
    for case in ("alpha", "beta", "gamma", "delta"):
        for i in range(per_case):
            fs, g = clones.random_case_instance(rng, case)
            rep = clones.check_horn_instance(fs, g)
            r.check(rep.ok and rep.case == case, {"instance": i, "expected": case, **rep.to_json()})
    for i in range(triples):
        q = rng.randint(2, 3)
        ops = []
        for _ in range(3):
            n = rng.randint(1, 3)
            ops.append(clones.FiniteOperation(q, n, tuple(rng.randrange(q) for _ in range(q ** n))))
        f, g, h = ops
        r.check(clones.star(clones.star(f, g), h) == clones.star(f, clones.star(g, h)), f"triple #{i}")
    return r


SUITES: dict[str, Callable[..., SuiteResult]] = {
    "zariski-oracle": zariski_oracle,
    "semitopological": semitopological,
    "max-chain": max_chain_table,
    "topology-counts": topology_counts,
    "propx": propx_witnesses,
    "metrics": metrics,
    "normalize": normalize,
    "embeddings": embeddings,
    "bipartitions": bipartitions,
    "cardinality": cardinality,
    "cantor": cantor_suite,
    "horn": horn,
}
