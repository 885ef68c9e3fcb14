"""Continuous self-maps of the Cantor space 2^N, probed through finite prefixes.

A point of 2^N is a lazy, memoized bit stream (:class:`Seq`).  A
:class:`PrefixMap` is a stream transformer with a modulus m: k output bits
depend only on the first m(k) input bits.  Evaluating on a finite prefix uses
a stream that raises :class:`ModulusError` on any read past its end, so every
evaluation also checks the declared modulus.

Pairs of points are coded by interleaving (first component on even positions).
Caches are plain dicts filled deterministically; sharing one map between
threads is fine after a single-threaded warm-up, and not guaranteed before.
"""
from __future__ import annotations

import functools
import itertools
import random
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Optional, Sequence

Bits = tuple


class ModulusError(IndexError):
    """An evaluator read beyond the prefix its modulus allows."""


class Seq:
    """An infinite bit sequence, computed on demand and cached."""

    __slots__ = ("fn", "cache")

    def __init__(self, fn: Callable[[int], int]):
        self.fn = fn
        self.cache: dict[int, int] = {}

    def __getitem__(self, i: int) -> int:
        c = self.cache
        if i in c:
            return c[i]
        v = self.fn(i)
        c[i] = v
        return v

    def prefix(self, k: int) -> Bits:
        return tuple(self[i] for i in range(k))


def finite(bits: Sequence[int]) -> Seq:
    """A prefix viewed as a stream that refuses reads past its end."""
    bits = tuple(bits)
    n = len(bits)

    def fn(i):
        if i >= n:
            raise ModulusError(i)
        return bits[i]
    return Seq(fn)


def padded(bits: Sequence[int], tail: Optional[Callable[[int], int]] = None) -> Seq:
    """The point bits + tail (zeros by default)."""
    bits = tuple(bits)
    n = len(bits)
    return Seq(lambda i: bits[i] if i < n else (tail(i - n) if tail else 0))


ZERO = Seq(lambda i: 0)


def xor(a: Seq, b: Seq) -> Seq:
    return Seq(lambda i: a[i] ^ b[i])


def merge(a: Seq, b: Seq) -> Seq:
    return Seq(lambda i: a[i >> 1] if i % 2 == 0 else b[i >> 1])


def split(x: Seq) -> tuple[Seq, Seq]:
    return Seq(lambda i: x[2 * i]), Seq(lambda i: x[2 * i + 1])


# -- prefix maps -----------------------------------------------------------------

@dataclass(frozen=True)
class PrefixMap:
    modulus: Callable[[int], int]
    apply: Callable[[Seq], Seq]
    name: str = "map"

    def __call__(self, x: Seq) -> Seq:
        return self.apply(x)

    def ev(self, bits: Sequence[int], k: int) -> Bits:
        """k output bits from a prefix of length at least m(k)."""
        if len(bits) < self.modulus(k):
            raise ValueError(f"{self.name}: need {self.modulus(k)} input bits for {k} output bits")
        return self.apply(finite(bits)).prefix(k)

    def __str__(self) -> str:
        return self.name


def pm_compose(*maps: PrefixMap) -> PrefixMap:
    """First maps[0], then maps[1], ...; the modulus is m_0 o m_1 o ..."""
    if not maps:
        return IDENTITY

    def modulus(k):
        for m in reversed(maps):
            k = m.modulus(k)
        return k

    def apply(x):
        for m in maps:
            x = m.apply(x)
        return x

    return PrefixMap(modulus, apply, "compose(" + ",".join(m.name for m in maps) + ")")


IDENTITY = PrefixMap(lambda k: k, lambda x: x, "id")


def flip(i: int) -> PrefixMap:
    return PrefixMap(lambda k: k, lambda x: Seq(lambda j: x[j] ^ (j == i)), f"flip({i})")


def xor_mask(mask: Sequence[int]) -> PrefixMap:
    mask = tuple(mask)
    m = padded(mask)
    return PrefixMap(lambda k: k, lambda x: xor(x, m), "xor(" + "".join(map(str, mask)) + ")")


def const(bits: Sequence[int] = ()) -> PrefixMap:
    bits = tuple(bits)
    p = padded(bits)
    return PrefixMap(lambda k: 0, lambda x: p, "const(" + "".join(map(str, bits)) + ")")


def shift(n: int) -> PrefixMap:
    return PrefixMap(lambda k: k + n if k else 0, lambda x: Seq(lambda j: x[j + n]), f"shift({n})")


def swap(i: int, j: int) -> PrefixMap:
    """Exchange bits i and j."""
    top = max(i, j) + 1
    tr = {i: j, j: i}
    return PrefixMap(lambda k: max(k, top) if k else 0, lambda x: Seq(lambda q: x[tr.get(q, q)]),
                     f"swap({i},{j})")


def or_ahead(n: int) -> PrefixMap:
    """Bit j becomes x_j or x_(j+n)."""
    return PrefixMap(lambda k: k + n if k else 0, lambda x: Seq(lambda j: x[j] | x[j + n]),
                     f"or({n})")


def evens() -> PrefixMap:
    return PrefixMap(lambda k: 2 * k - 1 if k else 0, lambda x: Seq(lambda j: x[2 * j]), "evens")


def diagonal() -> PrefixMap:
    """x -> interleave(x, x)."""
    return PrefixMap(lambda k: (k + 1) // 2, lambda x: merge(x, x), "interleave")


@dataclass(frozen=True)
class PairCodec:
    """Phi: 2^N -> 2^N x 2^N by even/odd positions, and its inverse."""

    def split(self, bits: Sequence[int]) -> tuple[Bits, Bits]:
        bits = tuple(bits)
        return bits[0::2], bits[1::2]

    def merge(self, a: Sequence[int], b: Sequence[int]) -> Bits:
        out = []
        for i in range(max(len(a), len(b))):
            if i < len(a):
                out.append(a[i])
            if i < len(b) and i < len(a):
                out.append(b[i])
        return tuple(out)


def interleave() -> PairCodec:
    return PairCodec()


# -- DSL ---------------------------------------------------------------------------

_ATOM = re.compile(r"\s*([a-z]+)\s*(?:\(\s*([^()]*)\s*\))?\s*$")


def _split_args(body: str) -> list[str]:
    out, depth, cur = [], 0, ""
    for ch in body:
        if ch == "," and depth == 0:
            out.append(cur)
            cur = ""
            continue
        depth += (ch == "(") - (ch == ")")
        cur += ch
    if cur.strip():
        out.append(cur)
    return [c.strip() for c in out]


def parse_map(text: str) -> PrefixMap:
    """id, flip(i), xor(0110), const(01), shift(n), swap(i,j), or(n), evens,
    interleave, compose(m1, m2, ...)."""
    t = text.strip()
    if t.startswith("compose(") and t.endswith(")"):
        return pm_compose(*(parse_map(p) for p in _split_args(t[len("compose("):-1])))
    mt = _ATOM.match(t)
    if not mt:
        raise ValueError(f"cannot parse map {text!r}")
    name, arg = mt.group(1), (mt.group(2) or "").strip()
    bits = lambda a: tuple(int(c) for c in a if c in "01")
    if name == "id":
        return IDENTITY
    if name == "flip":
        return flip(int(arg))
    if name == "xor":
        return xor_mask(bits(arg))
    if name == "const":
        return const(bits(arg))
    if name == "shift":
        return shift(int(arg))
    if name == "swap":
        i, j = (int(a) for a in arg.split(","))
        return swap(i, j)
    if name == "or":
        return or_ahead(int(arg))
    if name == "evens":
        return evens()
    if name == "interleave":
        return diagonal()
    raise ValueError(f"unknown map {name!r}")


# -- closed sets ----------------------------------------------------------------------

@dataclass(frozen=True)
class ClosedTree:
    """A closed set given by which finite strings extend to one of its points."""

    ext: Callable[[Bits], bool]
    name: str = "F"

    def __contains__(self, w: Sequence[int]) -> bool:
        return self.ext(tuple(w))

    @property
    def empty(self) -> bool:
        return not self.ext(())

    def strings(self, depth: int) -> Iterator[Bits]:
        """Extendable strings of the given length, in lexicographic order."""
        def rec(w):
            if len(w) == depth:
                yield w
                return
            for b in (0, 1):
                if self.ext(w + (b,)):
                    yield from rec(w + (b,))
        if self.ext(()):
            yield from rec(())


def whole() -> ClosedTree:
    return ClosedTree(lambda w: True, "2^N")


def cylinder(prefix: Sequence[int]) -> ClosedTree:
    p = tuple(prefix)
    return ClosedTree(lambda w: w[:len(p)] == p[:len(w)], "[" + "".join(map(str, p)) + "]")


def fixed_bits(bits_at: dict) -> ClosedTree:
    """Points with the given values at the given positions."""
    bits_at = dict(bits_at)
    return ClosedTree(lambda w: all(w[i] == v for i, v in bits_at.items() if i < len(w)),
                      "fix" + str(sorted(bits_at.items())))


def diagonal_tree() -> ClosedTree:
    """{interleave(x, x)}."""
    return ClosedTree(lambda w: all(w[i] == w[i + 1] for i in range(0, len(w) - 1, 2)), "diag")


def image_tree(A: ClosedTree, phi_inv: PrefixMap, top: int = 0) -> ClosedTree:
    """Image of A under a bit-permuting homeomorphism phi (phi_inv given), modulus m(k) = max(k, top)."""
    @functools.lru_cache(maxsize=None)
    def ext(w):
        if len(w) < top:
            return any(ext(w + (b,)) for b in (0, 1))
        return A.ext(phi_inv.ev(w, len(w)))
    return ClosedTree(ext, f"({A.name})phi")


def graph_tree(s: PrefixMap) -> ClosedTree:
    """{interleave(s(x), x)}, by search over the input bits the modulus makes relevant."""
    @functools.lru_cache(maxsize=None)
    def ext(w):
        ys, xs = w[0::2], w[1::2]
        need = max(s.modulus(len(ys)), len(xs))
        free = need - len(xs)
        for tail in itertools.product((0, 1), repeat=free):
            x = xs + tail
            if s.ev(x, len(ys)) == ys:
                return True
        return False
    return ClosedTree(ext, f"graph({s.name})")


def check_tree(F: ClosedTree, depth: int) -> bool:
    """Downward closed and every extendable string has an extendable child, to depth."""
    for n in range(depth):
        for w in itertools.product((0, 1), repeat=n):
            if F.ext(w):
                if not (F.ext(w + (0,)) or F.ext(w + (1,))):
                    return False
                if n and not F.ext(w[:-1]):
                    return False
    return True


def retract(F: ClosedTree) -> PrefixMap:
    """g_F: follow the input while it stays in F, then the least branch of F."""
    if F.empty:
        raise ValueError("cannot retract onto the empty set")

    def apply(x: Seq) -> Seq:
        out: list[int] = []
        state = {"following": True}

        def fn(i):
            while len(out) <= i:
                w = tuple(out)
                if state["following"]:
                    b = x[len(out)]
                    if F.ext(w + (b,)):
                        out.append(b)
                        continue
                    state["following"] = False
                out.append(0 if F.ext(w + (0,)) else 1)
            return out[i]
        return Seq(fn)

    return PrefixMap(lambda k: k + 1 if k else 0, apply, f"retract({F.name})")


# -- exact dyadic metrics ---------------------------------------------------------------

@dataclass(frozen=True)
class DyadicInterval:
    lower: Fraction
    upper: Fraction

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError("lower bound exceeds upper bound")
        for v in (self.lower, self.upper):
            d = v.denominator
            if d & (d - 1):
                raise ValueError(f"{v} is not dyadic")

    def __contains__(self, v) -> bool:
        return self.lower <= v <= self.upper

    def to_json(self) -> dict:
        return {"lower": dyadic_str(self.lower), "upper": dyadic_str(self.upper)}

    def __str__(self) -> str:
        return f"[{dyadic_str(self.lower)}, {dyadic_str(self.upper)}]"


def dyadic_str(v: Fraction) -> str:
    k = v.denominator.bit_length() - 1
    return f"{v.numerator}/2^{k}"


def d_prefix(a: Sequence[int], b: Sequence[int]) -> Fraction:
    """sum |a_i - b_i| / 2^(i+1) over the common length."""
    return sum((Fraction(1, 2 ** (i + 1)) for i, (x, y) in enumerate(zip(a, b)) if x != y),
               Fraction(0))


def dinf_estimate(f: PrefixMap, g: PrefixMap, depth: int, domain: Optional[ClosedTree] = None,
                  cap: int = 22) -> DyadicInterval:
    """sup_x d((x)f, (x)g), by exhausting input prefixes (optionally inside ``domain``)."""
    L = max(f.modulus(depth), g.modulus(depth))
    if L > cap:
        raise ValueError(f"need {L} input bits, above the cap {cap}")
    it = domain.strings(L) if domain is not None else itertools.product((0, 1), repeat=L)
    best = Fraction(0)
    for w in it:
        v = d_prefix(f.ev(w, depth), g.ev(w, depth))
        if v > best:
            best = v
    return DyadicInterval(best, best + Fraction(1, 2 ** depth))


def rho(p: tuple[Seq, Seq], q: tuple[Seq, Seq], depth: int) -> Fraction:
    return max(d_prefix(p[0].prefix(depth), q[0].prefix(depth)),
               d_prefix(p[1].prefix(depth), q[1].prefix(depth)))


# -- the extension homeomorphism ---------------------------------------------------------

PairMap = Callable[[Seq, Seq], tuple[Seq, Seq]]


@dataclass(frozen=True)
class PairPrefixMap:
    """A map of 2^N x 2^N with component moduli: k bits of both outputs need ma(k) bits
    of the first input and my(k) of the second."""

    ma: Callable[[int], int]
    my: Callable[[int], int]
    apply: PairMap
    name: str = "pair map"

    def __call__(self, a: Seq, y: Seq) -> tuple[Seq, Seq]:
        return self.apply(a, y)

    def then(self, other: "PairPrefixMap") -> "PairPrefixMap":
        def need(k):
            return max(other.ma(k), other.my(k))
        return PairPrefixMap(lambda k: self.ma(need(k)), lambda k: self.my(need(k)),
                             lambda a, y: other.apply(*self.apply(a, y)),
                             f"{self.name};{other.name}")

    def on_codes(self) -> PrefixMap:
        """Phi (this) Phi^-1 as a map of 2^N."""
        def modulus(k):
            K = (k + 1) // 2
            return max(2 * self.ma(K) - 1, 2 * self.my(K), 0)
        return PrefixMap(modulus, lambda x: merge(*self.apply(*split(x))), self.name)


@dataclass(frozen=True)
class MillExtension:
    forward: PairPrefixMap
    backward: PairPrefixMap
    n: int
    eps: Fraction
    phi_bound: DyadicInterval
    parts: tuple



def _tail_index(eps: Fraction) -> int:
    n = 0
    while Fraction(1, 2 ** n) >= eps:
        n += 1
    return n


def mill_extend(A: ClosedTree, B: ClosedTree, phi: PrefixMap, phi_inv: PrefixMap,
                eps, depth: int = 16) -> MillExtension:
    """phi' = phi0 phi1 phi2 with (a, 0^inf)phi' = ((a)phi, 0^inf) for a in A.

    Writing the second coordinate as (b, c) with b of length n:
      phi0: c += a,   phi1: a += g_A(c) + (g_A(c))phi,   phi2: c += (g_B(a))phi^-1
    (all mod 2).  Each step is an involution, so the inverse is phi2 phi1 phi0.
    """
    eps = Fraction(eps)
    bound = dinf_estimate(phi, IDENTITY, depth, domain=A)
    if not bound.upper < eps:
        raise ValueError(f"d(phi, id_A) is only certified below {dyadic_str(bound.upper)}, "
                         f"not below {eps}")
    n = _tail_index(eps)
    gA, gB = retract(A), retract(B)

    def c_of(y):
        return Seq(lambda i: y[n + i])

    def with_c(y, c):
        return Seq(lambda i: y[i] if i < n else c[i - n])

    def p0(a, y):
        c = c_of(y)
        return a, with_c(y, xor(c, a))

    def p1(a, y):
        z = gA(c_of(y))
        return xor(xor(a, z), phi(z)), y

    def p2(a, y):
        h = phi_inv(gB(a))
        return a, with_c(y, xor(c_of(y), h))

    ident = lambda k: k
    P0 = PairPrefixMap(ident, ident, p0, "phi0")
    P1 = PairPrefixMap(ident, lambda k: max(k, n + gA.modulus(max(k, phi.modulus(k)))), p1, "phi1")
    P2 = PairPrefixMap(lambda k: max(k, gB.modulus(phi_inv.modulus(k))), ident, p2, "phi2")
    fwd = P0.then(P1).then(P2)
    bwd = P2.then(P1).then(P0)
    return MillExtension(fwd, bwd, n, eps, bound, (P0, P1, P2))


def rho_upper(ext: MillExtension) -> Fraction:
    return max(Fraction(1, 2 ** ext.n), ext.phi_bound.upper)


@dataclass
class MillReport:
    ok: bool
    extension_checked: int
    inverse_checked: int
    rho: DyadicInterval
    eps: Fraction
    failure: Optional[dict] = None

    def to_json(self) -> dict:
        out = {"verdict": "pass" if self.ok else "fail", "extension_checked": self.extension_checked,
               "inverse_checked": self.inverse_checked, "rho_inf": self.rho.to_json(),
               "eps": dyadic_str(self.eps)}
        if self.failure:
            out["failure"] = self.failure
        return out


def random_point(rng: random.Random, depth: int) -> Seq:
    bits = [rng.randrange(2) for _ in range(depth)]
    return padded(bits, lambda i: (i * 7 + 3) % 5 % 2)


def verify_mill(ext: MillExtension, A: ClosedTree, phi: PrefixMap, depth: int = 16,
                samples: int = 100, seed: int = 0) -> MillReport:
    rng = random.Random(f"mill:{seed}")
    gA = retract(A)
    lower = Fraction(0)
    fail = None
    for i in range(samples):
        a = gA(random_point(rng, 2 * depth))
        out = ext.forward(a, ZERO)
        want = phi(a).prefix(depth)
        if out[0].prefix(depth) != want or out[1].prefix(depth) != (0,) * depth:
            fail = fail or {"check": "extension", "sample": i}
    for i in range(samples):
        p = (random_point(rng, 2 * depth), random_point(rng, 2 * depth))
        q = ext.forward(*p)
        lower = max(lower, rho(p, q, depth))
        back = ext.backward(*q)
        if back[0].prefix(depth) != p[0].prefix(depth) or back[1].prefix(depth) != p[1].prefix(depth):
            fail = fail or {"check": "inverse", "sample": i}
    upper = max(rho_upper(ext), lower)
    if not upper < ext.eps:
        fail = fail or {"check": "rho_inf", "upper": dyadic_str(upper)}
    return MillReport(fail is None, samples, samples, DyadicInterval(lower, upper), ext.eps, fail)


def random_mill_instance(rng: random.Random) -> tuple[ClosedTree, ClosedTree, PrefixMap, PrefixMap, Fraction]:
    """A closed A, a bit-permuting or masking homeomorphism phi, B = (A)phi and an eps above d(phi, id_A)."""
    kind = rng.choice(["cylinder", "fixed"])
    if kind == "cylinder":
        A = cylinder([rng.randrange(2) for _ in range(rng.randint(1, 3))])
    else:
        A = fixed_bits({i: rng.randrange(2) for i in rng.sample(range(8), 3)})
    if rng.random() < 0.5:
        i, j = rng.sample(range(4), 2)
        phi = swap(i, j)
        phi_inv, top = phi, max(i, j) + 1
    else:
        mask = [rng.randrange(2) for _ in range(rng.randint(1, 4))]
        phi = xor_mask(mask)
        phi_inv, top = phi, 0
    B = image_tree(A, phi_inv, top)
    bound = dinf_estimate(phi, IDENTITY, 16, domain=A)
    eps = bound.upper + Fraction(rng.randint(1, 8), 64)
    return A, B, phi, phi_inv, eps


# -- the property-X witness ------------------------------------------------------------

@dataclass(frozen=True)
class CantorWitness:
    f: PrefixMap
    t: PrefixMap
    t_inv: PrefixMap
    g: PrefixMap
    mill: MillExtension


WITNESS_EPS = Fraction(2)


def cantor_propx_witness(s: PrefixMap, depth: int = 12) -> CantorWitness:
    """f = Phi^-1 on (Delta Phi^-1, 0), g = Phi pi0 Phi pi0, t_s = Phi zeta Phi^-1.

    zeta extends phi: interleave(x,x) -> interleave((x)s, x) from the diagonal A
    to the graph B.  Any eps above 1 is admissible since d <= 1, so the tail
    index is 0 and the second coordinate is used whole.
    """
    f = PrefixMap(lambda k: (k + 3) // 4, lambda x: merge(merge(x, x), ZERO), "f")
    g = PrefixMap(lambda k: 4 * k - 3 if k else 0, lambda x: Seq(lambda i: x[4 * i]), "g")

    def m_phi(k):
        return 2 * max(s.modulus((k + 1) // 2), k // 2)

    def phi_apply(a):
        x = Seq(lambda i: a[2 * i + 1])
        return merge(s(x), x)

    phi = PrefixMap(m_phi, phi_apply, f"graph({s.name})")
    def phi_inv_apply(b):
        x = Seq(lambda i: b[2 * i + 1])
        return merge(x, x)

    phi_inv = PrefixMap(lambda k: 2 * ((k + 1) // 2), phi_inv_apply, "diag-back")
    A, B = diagonal_tree(), graph_tree(s)
    ext = mill_extend(A, B, phi, phi_inv, WITNESS_EPS, depth=min(depth, 8))
    return CantorWitness(f, ext.forward.on_codes(), ext.backward.on_codes(), g, ext)


@dataclass
class WitnessReport:
    ok: bool
    probes: int
    failure: Optional[dict] = None

    def to_json(self) -> dict:
        out = {"verdict": "pass" if self.ok else "fail", "probes": self.probes}
        if self.failure:
            out["failure"] = self.failure
        return out


def verify_witness(s: PrefixMap, w: CantorWitness, depth: int = 12, samples: int = 64,
                   seed: int = 0) -> WitnessReport:
    """f t_s g = s and t_s^-1 t_s = id on the first ``depth`` bits of probe points."""
    rng = random.Random(f"cantor:{seed}")
    probes = [padded(p) for p in _corner_prefixes(depth)]
    probes += [random_point(rng, 3 * depth) for _ in range(samples)]
    for i, x in enumerate(probes):
        got = w.g(w.t(w.f(x))).prefix(depth)
        if got != s(x).prefix(depth):
            return WitnessReport(False, len(probes), {"check": "identity", "probe": i})
        if w.t_inv(w.t(x)).prefix(depth) != x.prefix(depth):
            return WitnessReport(False, len(probes), {"check": "inverse", "probe": i})
        if w.t(w.t_inv(x)).prefix(depth) != x.prefix(depth):
            return WitnessReport(False, len(probes), {"check": "inverse", "probe": i})
    return WitnessReport(True, len(probes))


def _corner_prefixes(depth: int) -> list[Bits]:
    return [(0,) * depth, (1,) * depth, tuple(i % 2 for i in range(depth)),
            tuple((i + 1) % 2 for i in range(depth))]


def random_map(rng: random.Random, depth: int = 3) -> PrefixMap:
    """A composite of registry maps."""
    atoms = [lambda: IDENTITY, lambda: flip(rng.randrange(6)),
             lambda: xor_mask([rng.randrange(2) for _ in range(rng.randint(1, 5))]),
             lambda: const([rng.randrange(2) for _ in range(rng.randint(0, 4))]),
             lambda: shift(rng.randint(1, 3)), lambda: swap(*rng.sample(range(5), 2)),
             lambda: or_ahead(rng.randint(1, 2)), evens, diagonal]
    return pm_compose(*(rng.choice(atoms)() for _ in range(rng.randint(1, depth))))
