"""Right congruences and the embeddings built from them.

Semigroups are finite Cayley tables (see :mod:`semitop.fintop`); products are
read left to right, matching right actions.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

from .elements import FinitePartialBijection, FinitePartialMap, FiniteTransformation, UnionFind
from .fintop import FiniteSemigroup, _cap

ENUM_CAP = 8


@dataclass(frozen=True)
class RightCongruence:
    """Partition of a finite semigroup, stored as a canonical class label per element."""

    labels: tuple[int, ...]

    def __post_init__(self):
        relabel: dict[int, int] = {}
        out = tuple(relabel.setdefault(c, len(relabel)) for c in self.labels)
        object.__setattr__(self, "labels", out)

    @classmethod
    def from_classes(cls, classes: Sequence[Sequence[int]], n: int) -> "RightCongruence":
        lab = [-1] * n
        for i, cl in enumerate(classes):
            for x in cl:
                if lab[x] != -1:
                    raise ValueError(f"element {x} lies in two classes")
                lab[x] = i
        if -1 in lab:
            raise ValueError("classes do not cover the semigroup")
        return cls(tuple(lab))

    @property
    def n_classes(self) -> int:
        return max(self.labels, default=-1) + 1

    def classes(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.n_classes)]
        for x, c in enumerate(self.labels):
            out[c].append(x)
        return out

    def same(self, a: int, b: int) -> bool:
        return self.labels[a] == self.labels[b]

    def to_json(self) -> dict:
        return {"classes": self.classes()}


def identity_congruence(S: FiniteSemigroup) -> RightCongruence:
    return RightCongruence(tuple(range(S.order)))


def universal_congruence(S: FiniteSemigroup) -> RightCongruence:
    return RightCongruence((0,) * S.order)


def is_right_congruence(S: FiniteSemigroup, rho: RightCongruence) -> tuple[bool, Optional[tuple]]:
    """Right compatibility; the counterexample is (a, b, c) with a ~ b but ac !~ bc."""
    if len(rho.labels) != S.order:
        raise ValueError("partition does not cover the semigroup")
    t, lab = S.table, rho.labels
    for cl in rho.classes():
        a = cl[0]
        for b in cl[1:]:
            for c in range(S.order):
                if lab[t[a][c]] != lab[t[b][c]]:
                    return False, (a, b, c)
    return True, None


def _set_partitions(n: int) -> Iterator[tuple[int, ...]]:
    """Restricted growth strings of length n."""
    if n == 0:
        yield ()
        return

    def rec(prefix, m):
        if len(prefix) == n:
            yield tuple(prefix)
            return
        for c in range(m + 1):
            yield from rec(prefix + [c], max(m, c + 1))

    yield from rec([0], 1)


def enumerate_right_congruences(S: FiniteSemigroup, cap: Optional[int] = None) -> Iterator[RightCongruence]:
    cap = _cap(ENUM_CAP) if cap is None else cap
    if S.order > cap:
        raise ValueError(f"order {S.order} exceeds cap {cap}")
    for labels in _set_partitions(S.order):
        rho = RightCongruence(labels)
        if is_right_congruence(S, rho)[0]:
            yield rho


def right_congruence_generated(S: FiniteSemigroup, pairs: Sequence[tuple[int, int]]) -> RightCongruence:
    uf = UnionFind(range(S.order))
    todo = list(pairs)
    while todo:
        a, b = todo.pop()
        if uf.find(a) == uf.find(b):
            continue
        uf.union(a, b)
        todo.extend((S.table[a][c], S.table[b][c]) for c in range(S.order))
    return RightCongruence(tuple(uf.find(x) for x in range(S.order)))


def right_congruences_by_joins(S: FiniteSemigroup) -> set[RightCongruence]:
    """Second route: every right congruence is a join of principal ones."""
    principal = {right_congruence_generated(S, [(a, b)])
                 for a in range(S.order) for b in range(a + 1, S.order)}
    found = {identity_congruence(S)} | principal
    frontier = set(found)
    while frontier:
        new = set()
        for r in frontier:
            for p in principal:
                pairs = [(c[0], x) for c in r.classes() + p.classes() for x in c[1:]]
                j = right_congruence_generated(S, pairs)
                if j not in found:
                    new.add(j)
        found |= new
        frontier = new
    return found


# -- Vagner-Preston ---------------------------------------------------------------

@dataclass
class VPCertificate:
    branches: dict = field(default_factory=dict)    # s -> "a" | "b" | "ab"
    violation: Optional[int] = None


def _require_inverse_monoid(S: FiniteSemigroup) -> tuple[int, tuple[int, ...]]:
    e, inv = S.identity, S.inverse
    if e is None or inv is None:
        raise ValueError("need an inverse monoid")
    return e, inv


def is_vagner_preston(S: FiniteSemigroup, rho: RightCongruence) -> tuple[bool, VPCertificate]:
    e, inv = _require_inverse_monoid(S)
    t, lab = S.table, rho.labels
    cert = VPCertificate()
    for s in range(S.order):
        a = all(lab[t[u][inv[u]]] == lab[e] for u in range(S.order) if lab[u] == lab[s])
        b = all(lab[t[s][u]] == lab[s] for u in range(S.order))
        cert.branches[s] = "ab" if a and b else "a" if a else "b" if b else ""
        if not (a or b):
            cert.violation = s
            return False, cert
    return True, cert


# -- embeddings -------------------------------------------------------------------

@dataclass
class EmbeddingReport:
    homomorphism: bool
    injective: bool
    checks: dict
    points: list          # (i, class index) for each point of X
    images: list          # per element: a transformation or partial bijection on X

    @property
    def ok(self) -> bool:
        return self.homomorphism and self.injective and all(v is True for v in self.checks.values())

    def to_json(self) -> dict:
        return {"homomorphism": self.homomorphism, "injective": self.injective,
                "checks": self.checks, "n_points": len(self.points)}


def _points(rhos: Sequence[RightCongruence]) -> tuple[list, dict]:
    pts = [(i, c) for i, r in enumerate(rhos) for c in range(r.n_classes)]
    return pts, {p: k for k, p in enumerate(pts)}


def luke1_embed(M: FiniteSemigroup, rhos: Sequence[RightCongruence]) -> EmbeddingReport:
    """Act on the disjoint union of the classes of the rho_i by right multiplication.

    If M has no identity one is adjoined and each rho_i is extended by {(1,1)}.
    """
    for r in rhos:
        ok, cex = is_right_congruence(M, r)
        if not ok:
            raise ValueError(f"not a right congruence: {cex}")
    M1, one = M.with_identity()
    if M1 is not M:
        rhos = [RightCongruence(r.labels + (r.n_classes,)) for r in rhos]
    pts, index = _points(rhos)
    t = M1.table
    images = []
    for m in range(M1.order):
        img = [0] * len(pts)
        for i, r in enumerate(rhos):
            for c, cl in enumerate(r.classes()):
                img[index[(i, c)]] = index[(i, r.labels[t[cl[0]][m]])]
        images.append(FiniteTransformation(tuple(img)))
    hom = all(tuple(images[b].images[v] for v in images[a].images) == images[t[a][b]].images
              for a in range(M1.order) for b in range(M1.order))
    inj = len({im.images for im in images}) == M1.order
    separating = all(any(not r.same(a, b) for r in rhos)
                     for a in range(M1.order) for b in range(a + 1, M1.order))
    return EmbeddingReport(hom, inj, {"injective_iff_separating": inj == separating},
                           pts, images)


def right_regular_representation(M: FiniteSemigroup) -> list[FiniteTransformation]:
    return [FiniteTransformation(tuple(M.table[x][m] for x in range(M.order)))
            for m in range(M.order)]


def vp_embed(S: FiniteSemigroup, rhos: Sequence[RightCongruence]) -> EmbeddingReport:
    e, inv = _require_inverse_monoid(S)
    for r in rhos:
        ok, cert = is_vagner_preston(S, r)
        if not ok:
            raise ValueError(f"not Vagner-Preston at element {cert.violation}")
        if not is_right_congruence(S, r)[0]:
            raise ValueError("not a right congruence")
    pts, index = _points(rhos)
    t = S.table
    images = []
    for f in range(S.order):
        ff = t[f][inv[f]]
        pairs = set()
        for i, r in enumerate(rhos):
            lab = r.labels
            for c, cl in enumerate(r.classes()):
                a = cl[0]
                if lab[t[a][inv[a]]] == lab[e] and lab[a] == lab[t[a][ff]]:
                    pairs.add((index[(i, c)], index[(i, lab[t[a][f]])]))
        images.append(FinitePartialBijection(len(pts), frozenset(pairs)))
    def comp(p, q):
        qm = q.mapping
        return frozenset((x, qm[y]) for x, y in p.pairs if y in qm)
    hom = all(comp(images[a], images[b]) == images[t[a][b]].pairs
              for a in range(S.order) for b in range(S.order))
    inverses = all(frozenset((y, x) for x, y in images[f].pairs) == images[inv[f]].pairs
                   for f in range(S.order))
    inj = len({im.pairs for im in images}) == S.order
    separating = all(any(not r.same(a, b) or not r.same(inv[a], inv[b]) for r in rhos)
                     for a in range(S.order) for b in range(a + 1, S.order))
    checks = {"preserves_inversion": inverses, "separating": separating}
    return EmbeddingReport(hom, inj, checks, pts, images)


def vp_congruences_from_action(S: FiniteSemigroup, elems: Sequence[dict], n: int) -> list[RightCongruence]:
    """rho_i groups elements by their value at i, or by i lying outside the domain."""
    out = []
    for i in range(n):
        rho = RightCongruence(tuple(f.get(i, -1) for f in elems))
        if not is_right_congruence(S, rho)[0] or not is_vagner_preston(S, rho)[0]:
            raise AssertionError(f"rho_{i} failed its checks")
        out.append(rho)
    return out


def inverse_submonoid(gens: Sequence[dict], n: int) -> tuple[FiniteSemigroup, list[dict]]:
    """Inverse submonoid of I_n generated by ``gens``, their inverses and the identity."""
    key = lambda d: tuple(sorted(d.items()))
    start = [dict((x, x) for x in range(n))] + [dict(g) for g in gens] + \
            [{y: x for x, y in g.items()} for g in gens]
    elems, index = [], {}
    for g in start:
        if key(g) not in index:
            index[key(g)] = len(elems)
            elems.append(g)
    i = 0
    while i < len(elems):
        for g in start:
            p = {x: g[y] for x, y in elems[i].items() if y in g}
            if key(p) not in index:
                index[key(p)] = len(elems)
                elems.append(p)
        i += 1
    tab = tuple(tuple(index[key({x: b[y] for x, y in a.items() if y in b})] for b in elems)
                for a in elems)
    return FiniteSemigroup(tab, f"inv<{len(gens)} gens>"), elems


def natural_embed(f: FinitePartialMap) -> FiniteTransformation:
    """Send undefined points to a new fixed point n."""
    n = f.degree
    return FiniteTransformation(tuple(n if v is None else v for v in f.images) + (n,))


def natural_unembed(t: FiniteTransformation) -> FinitePartialMap:
    n = t.degree - 1
    if n < 0 or t.images[n] != n:
        raise ValueError("transformation does not fix the sentinel point")
    return FinitePartialMap(tuple(None if v == n else v for v in t.images[:n]))


def surjection_sigma(n: int) -> tuple[FiniteSemigroup, RightCongruence]:
    """T_n with the two classes permutations / non-permutations."""
    elems = list(itertools.product(range(n), repeat=n))
    index = {e: i for i, e in enumerate(elems)}
    tab = tuple(tuple(index[tuple(b[v] for v in a)] for b in elems) for a in elems)
    S = FiniteSemigroup(tab, f"T{n}")
    return S, RightCongruence(tuple(int(len(set(e)) == n) for e in elems))
