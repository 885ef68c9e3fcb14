"""Topologies on small finite sets and the semigroups that live on them.

Open sets are int bitmasks over ``range(n)``.
"""
from __future__ import annotations

import itertools
import json
import os
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence

DEFAULT_CAP = 4


def _cap(default: int = DEFAULT_CAP) -> int:
    return int(os.environ.get("SEMITOP_CAP", default))


def bits(xs: Iterable[int]) -> int:
    m = 0
    for x in xs:
        m |= 1 << x
    return m


def members(mask: int) -> list[int]:
    out, i = [], 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


# -- topologies -----------------------------------------------------------------

@dataclass(frozen=True)
class FiniteTopology:
    n: int
    opens: frozenset[int]

    def __post_init__(self):
        full = (1 << self.n) - 1
        opens = frozenset(self.opens)
        if 0 not in opens or full not in opens:
            raise ValueError("topology must contain the empty set and the ground set")
        for u in opens:
            if u & ~full:
                raise ValueError(f"open set {members(u)} leaves the ground set")
        for u, v in itertools.combinations(opens, 2):
            if (u | v) not in opens or (u & v) not in opens:
                raise ValueError("family is not closed under union and intersection")
        object.__setattr__(self, "opens", opens)

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    def nbhd(self, x: int) -> int:
        """Smallest open set containing x."""
        m = self.full
        for u in self.opens:
            if u >> x & 1:
                m &= u
        return m

    def nbhds(self) -> list[int]:
        return [self.nbhd(x) for x in range(self.n)]

    def is_open(self, mask: int) -> bool:
        return mask in self.opens

    def sorted_opens(self) -> list[list[int]]:
        return [members(u) for u in sorted(self.opens, key=lambda u: (bin(u).count("1"), u))]

    def to_json(self) -> dict:
        return {"n": self.n, "opens": self.sorted_opens()}

    @classmethod
    def from_json(cls, d: dict) -> "FiniteTopology":
        return cls(d["n"], frozenset(bits(o) for o in d["opens"]))

    def image(self, perm: Sequence[int]) -> "FiniteTopology":
        """Push the topology forward along a bijection of the ground set."""
        return FiniteTopology(self.n, frozenset(bits(perm[x] for x in members(u)) for u in self.opens))


def discrete(n: int) -> FiniteTopology:
    return FiniteTopology(n, frozenset(range(1 << n)))


def indiscrete(n: int) -> FiniteTopology:
    return FiniteTopology(n, frozenset({0, (1 << n) - 1}))


def generate_topology(subbasis: Iterable, n: int) -> FiniteTopology:
    """Least topology on ``range(n)`` containing every set of ``subbasis``.

    Sets may be given as bitmasks or as iterables of points.
    """
    full = (1 << n) - 1
    sub = set()
    for s in subbasis:
        m = s if isinstance(s, int) else bits(s)
        if m & ~full or m < 0:
            raise ValueError(f"set {s} is not a subset of range({n})")
        sub.add(m)
    # finite intersections
    basis = {full}
    frontier = {full}
    while frontier:
        new = {b & s for b in frontier for s in sub} - basis
        basis |= new
        frontier = new
    # unions: close by pairwise union until stable
    opens = set(basis) | {0}
    frontier = set(opens)
    while frontier:
        new = {a | b for a in frontier for b in opens} - opens
        opens |= new
        frontier = new
    return FiniteTopology(n, frozenset(opens))


def intersect_topologies(ts: Sequence[FiniteTopology]) -> FiniteTopology:
    if not ts:
        raise ValueError("need at least one topology")
    n = ts[0].n
    if any(t.n != n for t in ts):
        raise ValueError("ground sizes differ")
    opens = frozenset.intersection(*(t.opens for t in ts))
    return FiniteTopology(n, opens)


@dataclass(frozen=True)
class Separation:
    T0: bool
    T1: bool
    T2: bool


def separation(t: FiniteTopology) -> Separation:
    nb = t.nbhds()
    t0 = len(set(nb)) == t.n
    t1 = all(nb[x] == 1 << x for x in range(t.n))
    t2 = all(nb[x] & nb[y] == 0 for x, y in itertools.combinations(range(t.n), 2))
    # on a finite set T1, T2 and discreteness coincide
    assert t1 == t2 == (len(t.opens) == 1 << t.n)
    return Separation(t0, t1, t2)


def enumerate_topologies(n: int, cap: Optional[int] = None) -> Iterator[FiniteTopology]:
    """Every topology on n labelled points, by brute force over set families."""
    cap = _cap() if cap is None else cap
    if n > cap:
        raise ValueError(f"n={n} exceeds enumeration cap {cap} (set SEMITOP_CAP to raise it)")
    full = (1 << n) - 1
    middle = list(range(1, full))
    for r in range(len(middle) + 1):
        for fam in itertools.combinations(middle, r):
            s = set(fam)
            if all((a | b) in s or (a | b) == full for a in fam for b in fam) and \
               all((a & b) in s or (a & b) == 0 for a in fam for b in fam):
                yield FiniteTopology(n, frozenset(s | {0, full}))
    if n == 0:
        return


def count_topologies_via_preorders(n: int) -> int:
    """Topologies on a finite set correspond to preorders (specialisation order)."""
    pairs = [(a, b) for a in range(n) for b in range(n) if a != b]
    count = 0
    for r in range(len(pairs) + 1):
        for rel in itertools.combinations(pairs, r):
            s = set(rel)
            if all((a, c) in s for a, b in s for b2, c in s if b == b2 and a != c):
                count += 1
    return count


# -- semigroups ------------------------------------------------------------------

@dataclass(frozen=True)
class FiniteSemigroup:
    table: tuple[tuple[int, ...], ...]
    name: str = ""

    def __post_init__(self):
        t = tuple(tuple(int(v) for v in row) for row in self.table)
        n = len(t)
        if any(len(row) != n for row in t):
            raise ValueError("Cayley table must be square")
        if any(not 0 <= v < n for row in t for v in row):
            raise ValueError("table value out of range")
        object.__setattr__(self, "table", t)
        bad = self.associativity_failure()
        if bad is not None:
            raise ValueError(f"not associative at {bad}")

    @property
    def order(self) -> int:
        return len(self.table)

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def associativity_failure(self) -> Optional[tuple[int, int, int]]:
        t = self.table
        n = len(t)
        for a in range(n):
            for b in range(n):
                ab = t[a][b]
                for c in range(n):
                    if t[ab][c] != t[a][t[b][c]]:
                        return (a, b, c)
        return None

    @property
    def identity(self) -> Optional[int]:
        for e in range(self.order):
            if all(self.table[e][x] == x == self.table[x][e] for x in range(self.order)):
                return e
        return None

    @property
    def inverse(self) -> Optional[tuple[int, ...]]:
        """The inversion map if S is an inverse semigroup, else None."""
        t = self.table
        out = []
        for x in range(self.order):
            ys = [y for y in range(self.order) if t[t[x][y]][x] == x and t[t[y][x]][y] == y]
            if len(ys) != 1:
                return None
            out.append(ys[0])
        return tuple(out)

    def with_identity(self, force: bool = False) -> tuple["FiniteSemigroup", int]:
        """S^1 and the index of its identity; an identity is adjoined only if needed or forced."""
        e = self.identity
        if e is not None and not force:
            return self, e
        n = self.order
        rows = [list(r) + [i] for i, r in enumerate(self.table)]
        rows.append(list(range(n)) + [n])
        return FiniteSemigroup(tuple(map(tuple, rows)), self.name + "^1"), n

    def with_zero(self) -> "FiniteSemigroup":
        n = self.order
        rows = [list(r) + [n] for r in self.table]
        rows.append([n] * (n + 1))
        return FiniteSemigroup(tuple(map(tuple, rows)), self.name + "^0")

    def relabel(self, perm: Sequence[int]) -> "FiniteSemigroup":
        n = self.order
        inv = [0] * n
        for i, p in enumerate(perm):
            inv[p] = i
        rows = tuple(tuple(perm[self.table[inv[a]][inv[b]]] for b in range(n)) for a in range(n))
        return FiniteSemigroup(rows, self.name)

    def dual(self) -> "FiniteSemigroup":
        n = self.order
        return FiniteSemigroup(tuple(tuple(self.table[b][a] for b in range(n)) for a in range(n)),
                               self.name + "^op")

    def automorphisms(self) -> list[tuple[int, ...]]:
        n, t = self.order, self.table
        return [p for p in itertools.permutations(range(n))
                if all(p[t[a][b]] == t[p[a]][p[b]] for a in range(n) for b in range(n))]

    def anti_automorphisms(self) -> list[tuple[int, ...]]:
        n, t = self.order, self.table
        return [p for p in itertools.permutations(range(n))
                if all(p[t[a][b]] == t[p[b]][p[a]] for a in range(n) for b in range(n))]

    def canonical(self) -> tuple:
        """Lexicographically least relabelled table; equal iff isomorphic."""
        return min(self.relabel(p).table for p in itertools.permutations(range(self.order)))

    def to_json(self) -> dict:
        d = {"order": self.order, "table": [list(r) for r in self.table]}
        if self.identity is not None:
            d["identity"] = self.identity
        inv = self.inverse
        if inv is not None:
            d["inverse"] = list(inv)
        return d

    @classmethod
    def from_json(cls, d: dict, name: str = "") -> "FiniteSemigroup":
        s = cls(tuple(tuple(r) for r in d["table"]), name or d.get("name", ""))
        if "order" in d and d["order"] != s.order:
            raise ValueError("declared order disagrees with table")
        if "identity" in d and d["identity"] != s.identity:
            raise ValueError("declared identity is not an identity")
        if "inverse" in d and tuple(d["inverse"]) != s.inverse:
            raise ValueError("declared inverse is not the unique inversion")
        return s


def load_cayley(path: str) -> FiniteSemigroup:
    with open(path) as fh:
        return FiniteSemigroup.from_json(json.load(fh), name=os.path.basename(path))


@dataclass(frozen=True)
class SemigroupTopologyReport:
    topological: bool
    left_semitopological: bool
    right_semitopological: bool
    counterexample: Optional[tuple[int, int, list[int]]] = None


def check_semigroup_topology(S: FiniteSemigroup, t: FiniteTopology) -> SemigroupTopologyReport:
    """Continuity of multiplication, read off the minimal neighbourhoods.

    On a finite space it suffices to test N(a)N(b) against N(ab).
    """
    if S.order != t.n:
        raise ValueError(f"semigroup order {S.order} differs from ground size {t.n}")
    nb = t.nbhds()
    mem = [members(m) for m in nb]
    tab = S.table
    cex = None
    for a in range(S.order):
        for b in range(S.order):
            target = nb[tab[a][b]]
            if any(not target >> tab[x][y] & 1 for x in mem[a] for y in mem[b]):
                cex = (a, b, members(target))
                break
        if cex:
            break
    left = all(nb[tab[s][x]] >> tab[s][y] & 1 for s in range(S.order)
               for x in range(S.order) for y in mem[x])
    right = all(nb[tab[x][s]] >> tab[y][s] & 1 for s in range(S.order)
                for x in range(S.order) for y in mem[x])
    return SemigroupTopologyReport(cex is None, left, right, cex)


def is_continuous(f: Sequence[int], t: FiniteTopology, u: Optional[FiniteTopology] = None) -> bool:
    """Continuity of a self-map (or a map into ``u``) via preimages of opens."""
    u = t if u is None else u
    for o in u.opens:
        pre = bits(x for x in range(t.n) if o >> f[x] & 1)
        if pre not in t.opens:
            return False
    return True


# -- semigroup library ---------------------------------------------------------------

def all_semigroups(n: int) -> list[FiniteSemigroup]:
    """All semigroups of order n up to isomorphism (brute force; n <= 3)."""
    if n > 3:
        raise ValueError("brute-force search is limited to order 3")
    seen = {}
    for flat in itertools.product(range(n), repeat=n * n):
        t = tuple(tuple(flat[i * n:(i + 1) * n]) for i in range(n))
        ok = all(t[t[a][b]][c] == t[a][t[b][c]] for a in range(n) for b in range(n) for c in range(n))
        if not ok:
            continue
        s = FiniteSemigroup(t)
        key = s.canonical()
        if key not in seen:
            seen[key] = FiniteSemigroup(key, f"S{n}_{len(seen)}")
    return list(seen.values())


def cyclic_group(n: int) -> FiniteSemigroup:
    return FiniteSemigroup(tuple(tuple((a + b) % n for b in range(n)) for a in range(n)), f"Z{n}")


def max_chain(n: int) -> FiniteSemigroup:
    """({0,...,n-1}, max)."""
    return FiniteSemigroup(tuple(tuple(max(a, b) for b in range(n)) for a in range(n)), f"chain{n}")


def min_chain(n: int) -> FiniteSemigroup:
    return FiniteSemigroup(tuple(tuple(min(a, b) for b in range(n)) for a in range(n)), f"minchain{n}")


def left_zero(n: int) -> FiniteSemigroup:
    return FiniteSemigroup(tuple(tuple(a for _ in range(n)) for a in range(n)), f"LZ{n}")


def right_zero(n: int) -> FiniteSemigroup:
    return FiniteSemigroup(tuple(tuple(range(n)) for _ in range(n)), f"RZ{n}")


def null_semigroup(n: int) -> FiniteSemigroup:
    return FiniteSemigroup(tuple(tuple(0 for _ in range(n)) for _ in range(n)), f"N{n}")


def klein_four() -> FiniteSemigroup:
    return FiniteSemigroup(tuple(tuple(a ^ b for b in range(4)) for a in range(4)), "V4")


def free_semilattice(k: int) -> FiniteSemigroup:
    """Subsets of a k-set under union."""
    n = 1 << k
    return FiniteSemigroup(tuple(tuple(a | b for b in range(n)) for a in range(n)), f"SL2^{k}")


def transformation_semigroup(gens: Sequence[Sequence[int]], name: str = "") -> FiniteSemigroup:
    """Semigroup generated by transformations, composed left to right."""
    elems = [tuple(g) for g in gens]
    index = {e: i for i, e in enumerate(elems)}
    i = 0
    while i < len(elems):
        for g in list(elems[:len(gens)]):
            p = tuple(g[v] for v in elems[i])
            if p not in index:
                index[p] = len(elems)
                elems.append(p)
        i += 1
    # close under all products, not just right multiplication by generators
    changed = True
    while changed:
        changed = False
        for a in list(elems):
            for b in list(elems):
                p = tuple(b[v] for v in a)
                if p not in index:
                    index[p] = len(elems)
                    elems.append(p)
                    changed = True
    tab = tuple(tuple(index[tuple(b[v] for v in a)] for b in elems) for a in elems)
    return FiniteSemigroup(tab, name)


def symmetric_inverse_monoid(n: int) -> tuple[FiniteSemigroup, list[dict[int, int]]]:
    """I_n with elements listed as dicts; product is left-to-right composition."""
    elems = []
    for r in range(n + 1):
        for dom in itertools.combinations(range(n), r):
            for img in itertools.permutations(range(n), r):
                elems.append(dict(zip(dom, img)))
    key = lambda d: tuple(sorted(d.items()))
    index = {key(e): i for i, e in enumerate(elems)}
    tab = tuple(tuple(index[key({x: b[y] for x, y in a.items() if y in b})] for b in elems)
                for a in elems)
    return FiniteSemigroup(tab, f"I{n}"), elems


def semigroup_library(min_size: int = 50) -> list[FiniteSemigroup]:
    """Every semigroup of order <= 3 up to isomorphism, plus assorted order-4 ones."""
    lib: dict[tuple, FiniteSemigroup] = {}

    def add(s: FiniteSemigroup):
        key = s.canonical()
        if key not in lib:
            lib[key] = s

    for n in (1, 2, 3):
        for s in all_semigroups(n):
            add(s)
    for s in (cyclic_group(4), klein_four(), max_chain(4), min_chain(4), left_zero(4),
              right_zero(4), null_semigroup(4), free_semilattice(2)):
        add(s)
    for s in all_semigroups(3):
        add(s.with_identity(force=True)[0])
        add(s.with_zero())
    for s in all_semigroups(2):
        add(s.with_identity(force=True)[0].with_identity(force=True)[0])
    out = list(lib.values())
    if len(out) < min_size:
        raise RuntimeError(f"library has only {len(out)} semigroups")
    return out
