"""Property-X witnesses: factorizations s = f t_s g with t_s in a fixed subset.

For each supported monoid the bundle carries f, g, a builder for t_s and a
transfer procedure: given a basic neighbourhood B of t_s it returns a
neighbourhood U of s and a map k -> t_k with t_k in B and f t_k g = k.

All infinite permutations are :class:`LazyPerm` objects: a finite forced part
plus pieces that are either explicit rules or order-isomorphisms between two
decidable sets.  Their enumeration caches are guarded by locks, so a bundle may
be probed from several threads at once; a single-threaded warm-up is not needed.
"""
from __future__ import annotations

import bisect
import random
import threading
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Optional, Sequence

from .elements import (ALEPH0, IDENTITY_TAIL, UNDEF, UNDEFINED_TAIL, CardinalTag, ComputableElement,
                       Tail, Unknown, card, compose, finitary, pair, pair_tuple, relation_element,
                       shift_tail, unpair, unpair_tuple)
from .subbasis import NamedSet, member

MONOIDS = ("XX", "PX", "IX", "InjX", "BX", "FullClone")
SCAN_LIMIT = 1 << 22


# -- decidable subsets of N ---------------------------------------------------

class DecidableSet:
    """A subset of N given by a predicate, enumerated lazily in increasing order.

    ``bound`` promises every member is below it; ``size`` promises the number of
    members.  Either one makes a finite set safely enumerable.
    """

    def __init__(self, pred: Callable[[int], bool], bound: Optional[int] = None,
                 size: Optional[int] = None, name: str = ""):
        self.pred = pred
        self.bound = bound
        self.size = size
        self.name = name
        self._items: list[int] = []
        self._index: dict[int, int] = {}
        self._next = 0
        self._lock = threading.Lock()

    def __contains__(self, x: int) -> bool:
        if self.bound is not None and x >= self.bound:
            return False
        return self.pred(x)

    def _exhausted(self) -> bool:
        return (self.size is not None and len(self._items) >= self.size) or \
            (self.bound is not None and self._next >= self.bound)

    def _step(self) -> bool:
        if self._exhausted():
            return False
        if self._next > SCAN_LIMIT:
            raise RuntimeError(f"{self.name}: scan limit exceeded")
        x = self._next
        self._next += 1
        if self.pred(x):
            self._index[x] = len(self._items)
            self._items.append(x)
        return True

    def nth(self, i: int) -> int:
        with self._lock:
            while len(self._items) <= i:
                if not self._step():
                    raise IndexError(f"{self.name} has only {len(self._items)} members")
            return self._items[i]

    def rank(self, x: int) -> int:
        if x not in self:
            raise ValueError(f"{x} is not in {self.name}")
        with self._lock:
            while self._next <= x:
                self._step()
            return self._index[x]


class ResidueSet:
    """{x : x = res mod m} minus a finite exclusion set; rank and nth are arithmetic."""

    def __init__(self, mod: int, res: int, excluded=(), name: str = ""):
        self.mod, self.res, self.name = mod, res, name
        self.excluded = sorted(e for e in set(excluded) if e % mod == res)
        self._ex = set(self.excluded)
        self.size = None

    def __contains__(self, x: int) -> bool:
        return x % self.mod == self.res and x not in self._ex

    def rank(self, x: int) -> int:
        if x not in self:
            raise ValueError(f"{x} is not in {self.name}")
        return (x - self.res) // self.mod - bisect.bisect_left(self.excluded, x)

    def nth(self, i: int) -> int:
        j = i
        for e in self.excluded:
            if (e - self.res) // self.mod <= j:
                j += 1
            else:
                break
        return self.res + self.mod * j


class CoFinite:
    """N minus a finite set."""

    def __init__(self, excluded=()):
        self.excluded = sorted(set(excluded))
        self._ex = set(self.excluded)

    def __contains__(self, x: int) -> bool:
        return x not in self._ex

    def rank(self, x: int) -> int:
        return x - bisect.bisect_left(self.excluded, x)

    def nth(self, i: int) -> int:
        j = i
        for e in self.excluded:
            if e <= j:
                j += 1
            else:
                break
        return j


# -- lazy permutations ---------------------------------------------------------------

@dataclass(frozen=True)
class RulePiece:
    dom: Callable[[int], bool]
    fwd: Callable[[int], int]
    tgt: Callable[[int], bool]
    bwd: Callable[[int], int]


class RankPiece:
    """The order isomorphism between two decidable sets of the same size."""

    def __init__(self, dom, tgt):
        self.domset, self.tgtset = dom, tgt

    def dom(self, x: int) -> bool:
        return x in self.domset

    def tgt(self, y: int) -> bool:
        return y in self.tgtset

    def fwd(self, x: int) -> int:
        return self.tgtset.nth(self.domset.rank(x))

    def bwd(self, y: int) -> int:
        return self.domset.nth(self.tgtset.rank(y))


class LazyPerm:
    """A permutation of N: forced values, then the first piece whose domain holds x."""

    def __init__(self, forced: dict, pieces: Sequence, name: str = "perm"):
        self.forced = dict(forced)
        self.back = {v: k for k, v in self.forced.items()}
        if len(self.back) != len(self.forced):
            raise ValueError("forced part is not injective")
        self.pieces = list(pieces)
        self.name = name

    def __call__(self, x: int) -> int:
        v = self.forced.get(x)
        if v is not None:
            return v
        for p in self.pieces:
            if p.dom(x):
                return p.fwd(x)
        raise RuntimeError(f"{self.name}: no piece covers {x}")

    def inverse(self, y: int) -> int:
        v = self.back.get(y)
        if v is not None:
            return v
        for p in self.pieces:
            if p.tgt(y):
                return p.bwd(y)
        raise RuntimeError(f"{self.name}: no piece covers image point {y}")

    def element(self) -> ComputableElement:
        return ComputableElement("Permutation", fn=self, inv=self.inverse, coimage=card(0),
                                 name=self.name)


def check_permutation(t: ComputableElement, window: int) -> Optional[dict]:
    """First failure of t^-1 t = 1 = t t^-1 on the window, or None."""
    for x in range(window):
        y = t(x)
        if y is UNDEF or t.inv(y) != x:
            return {"check": "inverse_after_forward", "point": x, "image": repr(y)}
    for y in range(window):
        x = t.inv(y)
        if x is UNDEF or t(x) != y:
            return {"check": "forward_after_inverse", "point": y, "preimage": repr(x)}
    return None


# -- descriptors and bundles -------------------------------------------------------------

@dataclass(frozen=True)
class NaryMap:
    """A total map N^n -> N."""

    arity: int
    fn: Callable[[tuple], int]
    name: str = "op"

    def __call__(self, xs: tuple) -> int:
        return self.fn(tuple(xs))


@dataclass(frozen=True)
class BasicNbhdDescriptor:
    """A finite intersection of subbasic sets, each a :class:`NamedSet`.

    For n-ary operations a ``U`` constraint takes a tuple as its first argument.
    """

    monoid: str
    constraints: tuple = ()

    def holds(self, e) -> bool | Unknown:
        for c in self.constraints:
            r = satisfies(e, c)
            if isinstance(r, Unknown):
                return r
            if not r:
                return False
        return True

    def first_violation(self, e) -> Optional[NamedSet]:
        for c in self.constraints:
            r = satisfies(e, c)
            if not isinstance(r, Unknown) and not r:
                return c
        return None

    def to_json(self) -> dict:
        return {"monoid": self.monoid, "constraints": [str(c) for c in self.constraints]}


def satisfies(e, c: NamedSet):
    if isinstance(e, NaryMap) or (not isinstance(e, ComputableElement) and hasattr(e, "arity")):
        if c.kind != "U":
            raise ValueError(f"operations only carry point constraints, not {c.kind}")
        xs, y = c.args
        return e(xs) == y
    return member(e, c)


def _pointwise(monoid: str, t, points) -> BasicNbhdDescriptor:
    return BasicNbhdDescriptor(monoid, tuple(NamedSet("U", (x, t(x))) for x in points))


def _fixed_points(B: BasicNbhdDescriptor, center, monoid: str) -> dict:
    out = {}
    for c in B.constraints:
        if c.kind != "U":
            raise ValueError(f"{monoid}: expected point constraints, got {c}")
        x, y = c.args
        if center(x) != y:
            raise ValueError(f"neighbourhood is not centred at t_s: {c}")
        out[x] = y
    return out


@dataclass(frozen=True)
class WitnessBundle:
    monoid: str
    s: Any
    f: Any
    g: Any
    t_builder: Callable[[Any], Any]
    transfer_fn: Callable[[BasicNbhdDescriptor], tuple]
    kind: str = "function"                       # function | relation | clone
    nbhd_sampler: Optional[Callable] = None      # (rng, window) -> B
    k_sampler: Optional[Callable] = None         # (U, rng, window) -> k
    in_sym: bool = True
    t_s: Any = field(default=None, compare=False)

    def __post_init__(self):
        if self.t_s is None:
            object.__setattr__(self, "t_s", self.t_builder(self.s))


def transfer(bundle: WitnessBundle, B: BasicNbhdDescriptor) -> tuple[BasicNbhdDescriptor, Callable]:
    return bundle.transfer_fn(B)


# -- XX: N^N over Sym(N) ------------------------------------------------------------

def _is_diag(c: int) -> bool:
    a, b = unpair(c)
    return a == b


def _xx_t(k, center=None, F: dict | None = None) -> ComputableElement:
    """pair(x,x) -> pair(z_x, (x)k) with z_x the x-th point outside the forced first coordinates."""
    F = F or {}
    A = CoFinite(unpair(v)[0] for v in F.values())
    im_forced = set(F.values())

    def dom_d(c):
        return c not in F and _is_diag(c)

    def fwd_d(c):
        x = unpair(c)[0]
        return pair(A.nth(x), k(x))

    def tgt_d(y):
        a, b = unpair(y)
        if a not in A:
            return False
        x = A.rank(a)
        return pair(x, x) not in F and k(x) == b

    def bwd_d(y):
        x = A.rank(unpair(y)[0])
        return pair(x, x)

    rest_dom = DecidableSet(lambda c: c not in F and not _is_diag(c), name="offdiag")
    rest_tgt = DecidableSet(lambda y: y not in im_forced and not tgt_d(y), name="rest")
    perm = LazyPerm(F, [RulePiece(dom_d, fwd_d, tgt_d, bwd_d), RankPiece(rest_dom, rest_tgt)],
                    name=f"t[{getattr(k, 'name', 'k')}]")
    return perm.element()


def _require(s, families, monoid):
    if not isinstance(s, ComputableElement) or s.family not in families:
        fam = getattr(s, "family", type(s).__name__)
        raise ValueError(f"{monoid}: element of family {fam} is outside the monoid")


_TOTAL = ("Transformation", "Injection", "Permutation", "Surjection")


def _xx_bundle(s) -> WitnessBundle:
    _require(s, _TOTAL, "XX")
    f = ComputableElement("Injection", fn=lambda x: pair(x, x), coimage=ALEPH0, name="diag")
    g = ComputableElement("Transformation", fn=lambda c: unpair(c)[1], name="snd")
    t_s = _xx_t(s)

    def transfer_fn(B):
        F = _fixed_points(B, t_s, "XX")
        xs = sorted(unpair(c)[0] for c in F if _is_diag(c))
        U = _pointwise("XX", s, xs)
        return U, lambda k: _xx_t(k, t_s, F)

    def nbhd_sampler(rng, window):
        pts = {pair(x, x) for x in rng.sample(range(window), 2)}
        pts |= set(rng.sample(range(4 * window), 2))
        return _pointwise("XX", t_s, sorted(pts))

    return WitnessBundle("XX", s, f, g, _xx_t, transfer_fn, "function", nbhd_sampler,
                         _sample_transformation, True, t_s)


def _forced(U: BasicNbhdDescriptor):
    vals, undef, avoid, coim = {}, set(), set(), None
    for c in U.constraints:
        if c.kind == "U":
            vals[c.args[0]] = c.args[1]
        elif c.kind == "W":
            undef.add(c.args[0])
        elif c.kind == "Winv":
            avoid.add(c.args[0])
        elif c.kind == "F":
            coim = c.args[0]
        else:
            raise ValueError(f"unsupported constraint {c}")
    return vals, undef, avoid, coim


def _sample_transformation(U, rng, window):
    vals, _, _, _ = _forced(U)
    m = max([16] + [x + 1 for x in vals])
    table = [vals.get(x, rng.randrange(m + 2)) for x in range(m)]
    return finitary(table, IDENTITY_TAIL, "Transformation")


# -- PX: partial maps over N^N ---------------------------------------------------------

def _px_t(k) -> ComputableElement:
    def fn(x):
        if x == 0:
            return 0
        v = k(x - 1)
        return 0 if v is UNDEF else v + 1
    return ComputableElement("Transformation", fn=fn, name=f"t[{getattr(k, 'name', 'k')}]")


_PARTIAL = _TOTAL + ("PartialMap", "PartialBijection")


def _px_bundle(s) -> WitnessBundle:
    _require(s, _PARTIAL, "PX")
    f = finitary([], shift_tail(1), "Injection", name="succ")
    g = finitary([None], shift_tail(-1), name="pred")
    t_s = _px_t(s)

    def transfer_fn(B):
        F = _fixed_points(B, t_s, "PX")
        cons = []
        for x, y in sorted(F.items()):
            if x == 0:
                continue
            cons.append(NamedSet("W", (x - 1,)) if y == 0 else NamedSet("U", (x - 1, y - 1)))
        return BasicNbhdDescriptor("PX", tuple(cons)), _px_t

    def nbhd_sampler(rng, window):
        return _pointwise("PX", t_s, sorted(rng.sample(range(window), 4)))

    return WitnessBundle("PX", s, f, g, _px_t, transfer_fn, "function", nbhd_sampler,
                         _sample_partial_map, False, t_s)


def _sample_partial_map(U, rng, window):
    vals, undef, _, _ = _forced(U)
    m = max([16] + [x + 1 for x in vals | dict.fromkeys(undef)])
    table = []
    for x in range(m):
        if x in vals:
            table.append(vals[x])
        elif x in undef or rng.random() < 0.3:
            table.append(None)
        else:
            table.append(rng.randrange(m + 2))
    tail = rng.choice([UNDEFINED_TAIL, IDENTITY_TAIL])
    return finitary(table, tail, "PartialMap")


# -- IX: I_N with the topology I4, over Sym(N) ------------------------------------------

def _ix_t(u, K: dict | None = None) -> ComputableElement:
    """A permutation t with f t f^-1 = u for f doubling, extending the finite K."""
    K = K or {}
    if u.inv is None or u.support is None:
        raise ValueError("IX: the target needs an inverse and a finite-support descriptor")
    uf, ui = u.fn, u.inv
    im_K = set(K.values())

    p1 = RulePiece(lambda x: x % 2 == 0 and x not in K and uf(x // 2) is not UNDEF,
                   lambda x: 2 * uf(x // 2),
                   lambda y: y % 2 == 0 and y not in im_K and ui(y // 2) is not UNDEF,
                   lambda y: 2 * ui(y // 2))
    bound = None
    if u.support.tail.kind != "undefined":
        bound = 2 * u.support.m
    E2 = DecidableSet(lambda x: x % 2 == 0 and x not in K and uf(x // 2) is UNDEF,
                      bound=bound, name="E2")
    O = ResidueSet(2, 1, im_K, name="odd targets")

    def tgt2(y):
        if y not in O:
            return False
        r = O.rank(y)
        if r % 2:
            return False
        try:
            E2.nth(r // 2)
        except IndexError:
            return False
        return True

    p2 = RulePiece(lambda x: x in E2, lambda x: O.nth(2 * E2.rank(x)), tgt2,
                   lambda y: E2.nth(O.rank(y) // 2))
    dom3 = ResidueSet(2, 1, K.keys(), name="odd points")
    tgt3 = DecidableSet(lambda y: y not in im_K and not p1.tgt(y) and not tgt2(y), name="rest")
    perm = LazyPerm(K, [p1, p2, RankPiece(dom3, tgt3)], name=f"t[{u.name}]")
    return perm.element()


def _ix_bundle(s) -> WitnessBundle:
    _require(s, ("PartialBijection", "Injection", "Permutation"), "IX")
    f = finitary([], Tail("affine", 2, 0), "Injection", name="double")
    g = ComputableElement("PartialBijection", fn=lambda y: UNDEF if y % 2 else y // 2,
                          inv=lambda x: 2 * x, name="halve")
    t_s = _ix_t(s)

    def transfer_fn(B):
        K = _fixed_points(B, t_s, "IX")
        cons = [NamedSet("U", (x // 2, v // 2)) for x, v in sorted(K.items())
                if x % 2 == 0 and v % 2 == 0]
        cons += [NamedSet("W", (x // 2,)) for x, v in sorted(K.items()) if x % 2 == 0 and v % 2]
        cons += [NamedSet("Winv", (v // 2,)) for x, v in sorted(K.items()) if x % 2 and v % 2 == 0]
        return BasicNbhdDescriptor("IX", tuple(cons)), lambda u: _ix_t(u, K)

    def nbhd_sampler(rng, window):
        return _pointwise("IX", t_s, sorted(rng.sample(range(window), 4)))

    return WitnessBundle("IX", s, f, g, _ix_t, transfer_fn, "function", nbhd_sampler,
                         _sample_ix, True, t_s)


def _sample_ix(U, rng, window):
    vals, undef, avoid, _ = _forced(U)
    m = max([12] + [x + 1 for x in list(vals) + list(undef) + list(avoid)] +
            [v + 1 for v in vals.values()]) + 4
    used = set(vals.values()) | avoid
    free = [v for v in range(m) if v not in used]
    rng.shuffle(free)
    table = []
    for x in range(m):
        if x in vals:
            table.append(vals[x])
        elif x not in undef and free and rng.random() < 0.6:
            table.append(free.pop())
        else:
            table.append(None)
    tail = rng.choice([UNDEFINED_TAIL, IDENTITY_TAIL])
    return finitary(table, tail)


# -- InjX: Inj(N) with the co-image topology, over Sym(N) -------------------------------

def _injx_t(s, k, Y) -> ComputableElement:
    """h in Sym fixing Y with s h = k; needs the conditions of the transfer set."""
    Y = frozenset(Y)
    si, ki = s.inv, k.inv
    p1 = RulePiece(lambda y: y not in Y and si(y) is not UNDEF, lambda y: k(si(y)),
                   lambda z: z not in Y and ki(z) is not UNDEF, lambda z: s(ki(z)))
    off = len([y for y in Y if si(y) is UNDEF])

    def size(e):
        c = e.coimage
        return None if c is None or not c.finite else c.n - off

    dom2 = DecidableSet(lambda y: y not in Y and si(y) is UNDEF, size=size(s), name="coim s")
    tgt2 = DecidableSet(lambda z: z not in Y and ki(z) is UNDEF, size=size(k), name="coim k")
    perm = LazyPerm({y: y for y in Y}, [p1, RankPiece(dom2, tgt2)], name=f"h[{k.name}]")
    return perm.element()


def _injx_bundle(s) -> WitnessBundle:
    _require(s, ("Injection", "Permutation"), "InjX")
    if s.inv is None or s.coimage is None:
        raise ValueError("InjX: need an inverse evaluator and a declared co-image")
    one = finitary([], IDENTITY_TAIL, "Permutation", name="id")

    def t_builder(k):
        return one if k is s else _injx_t(s, k, ())

    def transfer_fn(B):
        Y = sorted(_fixed_points(B, one, "InjX"))
        cons = [NamedSet("Winv", (y,)) for y in Y if s.inv(y) is UNDEF]
        cons += [NamedSet("U", (s.inv(y), y)) for y in Y if s.inv(y) is not UNDEF]
        cons.append(NamedSet("F", (s.coimage,)))
        return BasicNbhdDescriptor("InjX", tuple(cons)), lambda k: _injx_t(s, k, Y)

    def nbhd_sampler(rng, window):
        return _pointwise("InjX", one, sorted(rng.sample(range(window), 4)))

    return WitnessBundle("InjX", s, s, one, t_builder, transfer_fn, "function", nbhd_sampler,
                         _sample_injx, True, one)


def _sample_injx(U, rng, window):
    vals, _, avoid, coim = _forced(U)
    if coim is None:
        raise ValueError("InjX neighbourhood without a co-image constraint")
    m = max([12] + [x + 1 for x in vals] + [v + 1 for v in vals.values()] +
            [y + 1 for y in avoid]) + 4
    if coim.finite:
        tail, span = shift_tail(coim.n), m + coim.n
    else:
        tail, span = Tail("affine", 2, 0), 2 * m
    used = set(vals.values()) | avoid
    pool = [v for v in range(span) if v not in used]
    rng.shuffle(pool)
    table = [vals[x] if x in vals else pool.pop() for x in range(m)]
    return finitary(table, tail, "Injection")


# -- BX: binary relations over Sym(N) ----------------------------------------------------

def bx_block(y: int) -> Optional[int]:
    """Index i with y in X_i, or None for the free set Y (the even numbers)."""
    return None if y % 2 == 0 else unpair((y - 1) // 2)[0]


def bx_point(i: int, b: int) -> int:
    """The b-th point of X_i."""
    return 2 * pair(i, b) + 1


def _bx_t(u, K: dict | None = None) -> ComputableElement:
    """t in Sym with (X_i x X_j) meeting t exactly when (i,j) is in u, extending K."""
    if u.graph is None:
        raise ValueError("BX: the target relation must have a finite graph")
    forced = dict(K or {})
    im = set(forced.values())
    realized = {(bx_block(a), bx_block(b)) for a, b in forced.items()
                if a % 2 and b % 2}
    for i, j in sorted(u.graph):
        if (i, j) in realized:
            continue
        a = next(bx_point(i, c) for c in range(SCAN_LIMIT) if bx_point(i, c) not in forced)
        b = next(bx_point(j, c) for c in range(SCAN_LIMIT) if bx_point(j, c) not in im)
        forced[a] = b
        im.add(b)
        realized.add((i, j))
    Dx = ResidueSet(2, 1, forced.keys(), name="X part")
    Dy = ResidueSet(2, 0, forced.keys(), name="Y part")
    Ty = ResidueSet(2, 0, im, name="Y targets")
    p1 = RulePiece(lambda x: x in Dx, lambda x: Ty.nth(2 * Dx.rank(x)),
                   lambda y: y in Ty and Ty.rank(y) % 2 == 0, lambda y: Dx.nth(Ty.rank(y) // 2))
    T2 = DecidableSet(lambda y: y not in im and (y % 2 == 1 or Ty.rank(y) % 2 == 1),
                      name="other targets")
    perm = LazyPerm(forced, [p1, RankPiece(Dy, T2)], name=f"t[{u.name}]")
    return perm.element()


def bx_conjugate_pairs(t: ComputableElement, grid: int, probes: int = 4) -> tuple[set, set]:
    """(pairs certified by the forced part, pairs seen on probes) of f t f^-1 in the grid.

    Off the forced part every X-point is sent into Y by construction, so the
    first set is the whole relation; the second is a literal search that can
    only confirm it.
    """
    perm = t.fn
    certified = {(bx_block(a), bx_block(b)) for a, b in perm.forced.items()
                 if a % 2 and b % 2}
    certified = {(i, j) for i, j in certified if i < grid and j < grid}
    seen = set()
    for i in range(grid):
        for c in range(probes):
            j = bx_block(t(bx_point(i, c)))
            if j is not None and j < grid:
                seen.add((i, j))
    return certified, seen


def _bx_bundle(s) -> WitnessBundle:
    _require(s, ("Relation",), "BX")
    if s.graph is None:
        raise ValueError("BX: s must be a finitary relation")
    f = ComputableElement("Relation", member=lambda i, y: bx_block(y) == i,
                          image_member=lambda y: y % 2 == 1, name="blocks")
    g = ComputableElement("Relation", member=lambda y, i: bx_block(y) == i, name="blocks^-1")
    t_s = _bx_t(s)

    def transfer_fn(B):
        K = _fixed_points(B, t_s, "BX")
        rel = sorted({(bx_block(a), bx_block(b)) for a, b in K.items() if a % 2 and b % 2})
        U = BasicNbhdDescriptor("BX", tuple(NamedSet("U", p) for p in rel))
        return U, lambda u: _bx_t(u, K)

    def nbhd_sampler(rng, window):
        grid = _bx_grid(window)
        pts = {bx_point(i, c) for i in rng.sample(range(grid), 2) for c in (0, 1)}
        pts |= {bx_point(i, 0) for i, _ in s.graph}
        pts |= set(rng.sample(range(window), 2))
        return _pointwise("BX", t_s, sorted(rng.sample(sorted(pts), min(4, len(pts)))))

    return WitnessBundle("BX", s, f, g, _bx_t, transfer_fn, "relation", nbhd_sampler,
                         _sample_bx, True, t_s)


def _bx_grid(window: int) -> int:
    return max(1, window // 4)


def _sample_bx(U, rng, window):
    base = {c.args for c in U.constraints}
    span = max(2, _bx_grid(window) // 2)
    extra = {(rng.randrange(span), rng.randrange(span)) for _ in range(rng.randint(0, 5))}
    return relation_element(base | extra)


# -- full function clone: n-ary s = f t_s g with t_s a unary permutation ------------------

def _fc_t(k, n: int, center=None, F: dict | None = None) -> ComputableElement:
    F = F or {}
    im_F = set(F.values())

    def target(c):
        x = unpair_tuple(c // 2, n)
        v = k(x)
        y = pair(v, c)
        if y not in im_F:
            return y
        return next(pair(v, 2 * pair(c // 2, j) + 1) for j in range(SCAN_LIMIT)
                    if pair(v, 2 * pair(c // 2, j) + 1) not in im_F)

    def tgt_d(y):
        if y in im_F:
            return False
        a, b = unpair(y)
        if b % 2 == 0:
            c = b
        else:
            c = 2 * unpair((b - 1) // 2)[0]
        if c in F or k(unpair_tuple(c // 2, n)) != a:
            return False
        return target(c) == y

    def bwd_d(y):
        b = unpair(y)[1]
        return b if b % 2 == 0 else 2 * unpair((b - 1) // 2)[0]

    p1 = RulePiece(lambda c: c % 2 == 0 and c not in F, target, tgt_d, bwd_d)
    dom2 = ResidueSet(2, 1, F.keys(), name="odd points")
    tgt2 = DecidableSet(lambda y: y not in im_F and not tgt_d(y), name="rest")
    perm = LazyPerm(F, [p1, RankPiece(dom2, tgt2)], name=f"t[{getattr(k, 'name', 'k')}]")
    return perm.element()


def _fc_bundle(s, n: int) -> WitnessBundle:
    if getattr(s, "arity", None) != n:
        raise ValueError(f"FullClone({n}): operation has arity {getattr(s, 'arity', None)}")
    f = NaryMap(n, lambda xs: 2 * pair_tuple(xs), name="2*code")
    g = ComputableElement("Transformation", fn=lambda c: unpair(c)[0], name="fst")
    t_s = _fc_t(s, n)

    def transfer_fn(B):
        F = _fixed_points(B, t_s, "FullClone")
        cons = tuple(NamedSet("U", (unpair_tuple(c // 2, n), s(unpair_tuple(c // 2, n))))
                     for c in sorted(F) if c % 2 == 0)
        return BasicNbhdDescriptor("FullClone", cons), lambda k: _fc_t(k, n, t_s, F)

    def nbhd_sampler(rng, window):
        pts = {2 * c for c in rng.sample(range(window), 2)} | set(rng.sample(range(4 * window), 2))
        return _pointwise("FullClone", t_s, sorted(pts))

    def k_sampler(U, rng, window):
        vals = {c.args[0]: c.args[1] for c in U.constraints}
        return random_operation(rng, n, vals)

    return WitnessBundle(f"FullClone({n})", s, f, g, lambda k: _fc_t(k, n), transfer_fn, "clone",
                         nbhd_sampler, k_sampler, True, t_s)


def random_operation(rng: random.Random, n: int, forced: dict | None = None, q: int = 4) -> NaryMap:
    """A table on {0..q-1}^n, forced values, and x1 + ... + xn elsewhere."""
    forced = dict(forced or {})
    table = {}
    for code in range(q ** n):
        xs = tuple((code // q ** (n - 1 - i)) % q for i in range(n))
        table[xs] = rng.randrange(2 * q)
    table.update(forced)
    return NaryMap(n, lambda xs: table.get(xs, sum(xs)), name=f"op{n}")


# -- entry points ---------------------------------------------------------------------

def witness(monoid: str, s, n: int | None = None) -> WitnessBundle:
    if monoid.startswith("FullClone"):
        if n is None:
            inner = monoid[len("FullClone"):].strip("()")
            n = int(inner) if inner else getattr(s, "arity", 1)
        return _fc_bundle(s, n)
    builders = {"XX": _xx_bundle, "PX": _px_bundle, "IX": _ix_bundle, "InjX": _injx_bundle,
                "BX": _bx_bundle}
    if monoid not in builders:
        raise ValueError(f"unknown monoid {monoid}; expected one of {MONOIDS}")
    return builders[monoid](s)


@dataclass
class CheckReport:
    name: str
    ok: bool
    failure: Optional[dict] = None

    def to_json(self) -> dict:
        out = {"name": self.name, "verdict": "pass" if self.ok else "fail"}
        if self.failure is not None:
            out["failure"] = self.failure
        return out


def _show(v) -> Any:
    return "-" if v is UNDEF else v


def _apply(e, x):
    return UNDEF if x is UNDEF else e(x)


def _identity_failure(bundle: WitnessBundle, s, t, window: int) -> Optional[dict]:
    f, g = bundle.f, bundle.g
    if bundle.kind == "function":
        for x in range(window):
            got = _apply(g, _apply(t, _apply(f, x)))
            want = s(x)
            if got != want:
                return {"point": x, "expected": _show(want), "got": _show(got)}
        return None
    if bundle.kind == "clone":
        for c in range(window):
            xs = unpair_tuple(c, s.arity)
            got, want = g(t(f(xs))), s(xs)
            if got != want:
                return {"point": list(xs), "expected": want, "got": got}
        return None
    grid = _bx_grid(window)
    certified, seen = bx_conjugate_pairs(t, grid)
    for i in range(grid):
        for j in range(grid):
            want = s.member(i, j)
            if want != ((i, j) in certified) or ((i, j) in seen and not want):
                return {"point": [i, j], "expected": want, "got": (i, j) in certified}
    for i in range(grid):
        for c in range(4):
            if not g.member(bx_point(i, c), i) or not f.member(i, bx_point(i, c)):
                return {"point": [i, c], "check": "block relations"}
    return None


def verify_identity(bundle: WitnessBundle, s=None, window: int = 64, t=None) -> CheckReport:
    """s = f t_s g on the window (pairs on a window/4 grid for relations)."""
    s = bundle.s if s is None else s
    t = bundle.t_s if t is None else t
    fail = _identity_failure(bundle, s, t, window)
    if fail is None and bundle.in_sym:
        fail = check_permutation(t, window)
    return CheckReport("identity", fail is None, fail)


def check_transfer(bundle: WitnessBundle, B: BasicNbhdDescriptor, ks: Sequence,
                   window: int = 64) -> CheckReport:
    """Transfer B, then for every k: k in U, t_k in B, t_k invertible, f t_k g = k."""
    if bundle.t_s is not None and B.holds(bundle.t_s) is not True:
        return CheckReport("transfer", False, {"check": "centre", "nbhd": B.to_json()})
    U, k_to_t = transfer(bundle, B)
    if U.holds(bundle.s) is not True:
        return CheckReport("transfer", False, {"check": "s in U", "nbhd": U.to_json()})
    for n, k in enumerate(ks):
        if U.holds(k) is not True:
            return CheckReport("transfer", False, {"check": "k in U", "sample": n})
        tk = k_to_t(k)
        bad = B.first_violation(tk)
        if bad is not None:
            return CheckReport("transfer", False, {"check": "t_k in B", "sample": n,
                                                   "constraint": str(bad)})
        if B.holds(tk) is not True:
            return CheckReport("transfer", False, {"check": "t_k in B undecided", "sample": n})
        fail = _identity_failure(bundle, k, tk, window)
        if fail is None and bundle.in_sym:
            fail = check_permutation(tk, window)
        if fail is not None:
            return CheckReport("transfer", False, dict(fail, sample=n))
    return CheckReport("transfer", True)


# -- transitivity ---------------------------------------------------------------------

def chain(outer: WitnessBundle, inner_monoid: str = "XX") -> WitnessBundle:
    """Stack a witness for t_s of ``outer`` under ``outer``: s = (f f') t' (g' g)."""
    inner = witness(inner_monoid, outer.t_s)
    if outer.kind != "function" or inner.kind != "function":
        raise ValueError("chaining is implemented for function monoids")

    def transfer_fn(B):
        U2, h2 = inner.transfer_fn(B)
        U1, h1 = outer.transfer_fn(replace(U2, monoid=outer.monoid))
        return U1, lambda k: h2(h1(k))

    return WitnessBundle(f"{outer.monoid}/{inner.monoid}", outer.s, compose(outer.f, inner.f),
                         compose(inner.g, outer.g),
                         lambda k: inner.t_builder(outer.t_builder(k)), transfer_fn, "function",
                         inner.nbhd_sampler, outer.k_sampler, True, inner.t_s)


# -- random elements and the suite ---------------------------------------------------------

def random_element(monoid: str, rng: random.Random, n: int = 2):
    from . import sampling
    m = rng.randint(4, 12)
    if monoid == "XX":
        if rng.random() < 0.2:
            c = rng.randrange(5)
            return ComputableElement("Transformation", fn=lambda x: c, name=f"const({c})")
        return sampling.transformation(rng, m)
    if monoid in ("PX", "PX/XX"):
        return _sample_partial_map(BasicNbhdDescriptor("PX"), rng, m)
    if monoid == "IX":
        if rng.random() < 0.1:
            return finitary([], UNDEFINED_TAIL, "PartialBijection", name="empty")
        return sampling.partial_bijection_with_tail(rng, m)
    if monoid == "InjX":
        return sampling.injection(rng, m)
    if monoid == "BX":
        span = rng.randint(1, 8)
        return relation_element({(rng.randrange(span), rng.randrange(span))
                                 for _ in range(rng.randint(0, 6))})
    if monoid.startswith("FullClone"):
        return random_operation(rng, n)
    raise ValueError(f"unknown monoid {monoid}")


@dataclass
class SuiteReport:
    monoid: str
    seed: int
    elements: int
    checks: int
    failures: list

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {"monoid": self.monoid, "seed": self.seed, "elements": self.elements,
                "checks": self.checks, "verdict": "pass" if self.ok else "fail",
                "failures": self.failures[:10]}


def run_suite(monoid: str, samples: int = 10, window: int = 64, seed: int = 0, nbhds: int = 10,
              ks: int = 10, n: int = 2) -> SuiteReport:
    """verify_identity and transfer for seeded random elements of one monoid."""
    rng = random.Random(f"propx:{monoid}:{seed}")
    checks, failures = 0, []
    for e in range(samples):
        s = random_element(monoid, rng, n)
        if monoid == "PX/XX":
            b = chain(witness("PX", s))
        else:
            b = witness(monoid if not monoid.startswith("FullClone") else f"FullClone({n})", s)
        reports = [verify_identity(b, window=window)]
        for _ in range(nbhds):
            B = b.nbhd_sampler(rng, window)
            U, _ = transfer(b, B)
            reports.append(check_transfer(b, B, [b.k_sampler(U, rng, window) for _ in range(ks)],
                                          window))
        for r in reports:
            checks += 1
            if not r.ok:
                failures.append(dict(r.to_json(), element=e, s=getattr(s, "name", str(s))))
    return SuiteReport(monoid, seed, samples, checks, failures)
