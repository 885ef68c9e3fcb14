"""Exact arithmetic for the classical monoids.

Composition is left to right and maps act on the right of their arguments,
so ``compose(a, b)`` sends ``x`` to ``((x)a)b``.
"""
from __future__ import annotations

import functools
import math
import re
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Optional, Union


class _Undefined:
    """The point an undefined partial map sends things to."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self) -> str:
        return "-"

    def __reduce__(self):
        return (_Undefined, ())


UNDEF = _Undefined()


@functools.total_ordering
@dataclass(frozen=True)
class CardinalTag:
    """A finite count, or aleph-0 when ``n`` is None."""

    n: Optional[int] = None

    def __post_init__(self):
        if self.n is not None and self.n < 0:
            raise ValueError("cardinal must be non-negative")

    @property
    def finite(self) -> bool:
        return self.n is not None

    def __add__(self, other: "CardinalTag") -> "CardinalTag":
        if self.n is None or other.n is None:
            return ALEPH0
        return CardinalTag(self.n + other.n)

    def __lt__(self, other):
        if self.n is None:
            return False
        return other.n is None or self.n < other.n

    def __str__(self) -> str:
        return "inf" if self.n is None else str(self.n)

    @classmethod
    def parse(cls, text: Union[str, int, "CardinalTag"]) -> "CardinalTag":
        if isinstance(text, CardinalTag):
            return text
        if isinstance(text, int):
            return cls(text)
        t = str(text).strip()
        if t in ("inf", "aleph0", "ℵ₀", "ℵ_0", "aleph_0"):
            return ALEPH0
        return cls(int(t))


ALEPH0 = CardinalTag(None)


def card(n: Optional[int]) -> CardinalTag:
    return CardinalTag(n)


@dataclass(frozen=True)
class Unknown:
    reason: str

    def __bool__(self):
        raise TypeError("Unknown has no truth value; branch on it explicitly")


# -- pairing -----------------------------------------------------------------

def pair(a: int, b: int) -> int:
    """Cantor pairing N x N -> N."""
    s = a + b
    return s * (s + 1) // 2 + b


def unpair(z: int) -> tuple[int, int]:
    w = (math.isqrt(8 * z + 1) - 1) // 2
    b = z - w * (w + 1) // 2
    return w - b, b


def pair_tuple(xs: tuple[int, ...]) -> int:
    """Bijection N^n -> N for n >= 1 by iterated pairing."""
    if len(xs) == 1:
        return xs[0]
    return pair(xs[0], pair_tuple(xs[1:]))


def unpair_tuple(z: int, n: int) -> tuple[int, ...]:
    if n == 1:
        return (z,)
    a, rest = unpair(z)
    return (a,) + unpair_tuple(rest, n - 1)


# -- finite elements ---------------------------------------------------------

@dataclass(frozen=True)
class FiniteTransformation:
    images: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "images", tuple(int(v) for v in self.images))
        n = len(self.images)
        for v in self.images:
            if not 0 <= v < n:
                raise ValueError(f"image {v} out of range for degree {n}")

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, x: int) -> int:
        return self.images[x]

    def __str__(self) -> str:
        return "[" + ",".join(map(str, self.images)) + "]"


@dataclass(frozen=True)
class FinitePartialMap:
    images: tuple[Optional[int], ...]

    def __post_init__(self):
        vals = tuple(None if v is None or v is UNDEF else int(v) for v in self.images)
        object.__setattr__(self, "images", vals)
        n = len(vals)
        for v in vals:
            if v is not None and not 0 <= v < n:
                raise ValueError(f"image {v} out of range for degree {n}")

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, x: int):
        v = self.images[x]
        return UNDEF if v is None else v

    @property
    def domain(self) -> frozenset[int]:
        return frozenset(i for i, v in enumerate(self.images) if v is not None)

    def __str__(self) -> str:
        return "[" + ",".join("-" if v is None else str(v) for v in self.images) + "]"


def _check_pairs(degree: int, pairs: Iterable) -> frozenset[tuple[int, int]]:
    out = frozenset((int(a), int(b)) for a, b in pairs)
    for a, b in out:
        if not (0 <= a < degree and 0 <= b < degree):
            raise ValueError(f"pair {(a, b)} out of range for degree {degree}")
    return out


@dataclass(frozen=True)
class FiniteBinaryRelation:
    degree: int
    pairs: frozenset[tuple[int, int]]

    def __post_init__(self):
        object.__setattr__(self, "pairs", _check_pairs(self.degree, self.pairs))

    def image_of(self, xs: Iterable[int]) -> frozenset[int]:
        xs = set(xs)
        return frozenset(b for a, b in self.pairs if a in xs)

    def __contains__(self, p) -> bool:
        return tuple(p) in self.pairs

    def __str__(self) -> str:
        return "{" + ",".join(f"({a},{b})" for a, b in sorted(self.pairs)) + "}"


@dataclass(frozen=True)
class FinitePartialBijection:
    degree: int
    pairs: frozenset[tuple[int, int]]

    def __post_init__(self):
        pairs = _check_pairs(self.degree, self.pairs)
        if len({a for a, _ in pairs}) != len(pairs) or len({b for _, b in pairs}) != len(pairs):
            raise ValueError("not a partial bijection")
        object.__setattr__(self, "pairs", pairs)

    @property
    def mapping(self) -> dict[int, int]:
        return dict(self.pairs)

    @property
    def domain(self) -> frozenset[int]:
        return frozenset(a for a, _ in self.pairs)

    @property
    def image(self) -> frozenset[int]:
        return frozenset(b for _, b in self.pairs)

    def __call__(self, x: int):
        return self.mapping.get(x, UNDEF)

    def __str__(self) -> str:
        return "{" + ",".join(f"({a},{b})" for a, b in sorted(self.pairs)) + "}"


Point = tuple[int, int]


def _fmt_point(p: Point) -> str:
    return f"{p[0]}'" if p[1] else str(p[0])


@dataclass(frozen=True)
class Bipartition:
    degree: int
    blocks: frozenset[frozenset[Point]]

    def __post_init__(self):
        blocks = frozenset(frozenset((int(x), int(r)) for x, r in b) for b in self.blocks)
        seen: set[Point] = set()
        for b in blocks:
            if not b:
                raise ValueError("empty block")
            for x, r in b:
                if r not in (0, 1) or not 0 <= x < self.degree:
                    raise ValueError(f"bad point {(x, r)}")
                if (x, r) in seen:
                    raise ValueError(f"point {(x, r)} in two blocks")
                seen.add((x, r))
        if len(seen) != 2 * self.degree:
            raise ValueError("blocks do not cover all points")
        object.__setattr__(self, "blocks", blocks)

    def block_of(self) -> dict[Point, frozenset[Point]]:
        return {p: b for b in self.blocks for p in b}

    def sorted_blocks(self) -> list[list[Point]]:
        key = lambda p: (p[1], p[0])
        return sorted((sorted(b, key=key) for b in self.blocks), key=lambda b: key(b[0]))

    def __str__(self) -> str:
        return "[" + ",".join("[" + ",".join(_fmt_point(p) for p in b) + "]"
                              for b in self.sorted_blocks()) + "]"


def identity_bipartition(n: int) -> Bipartition:
    return Bipartition(n, frozenset(frozenset({(x, 0), (x, 1)}) for x in range(n)))


FiniteElement = Union[FiniteTransformation, FinitePartialMap, FinitePartialBijection,
                      FiniteBinaryRelation, Bipartition]


# -- tails and finitary descriptors -------------------------------------------

@dataclass(frozen=True)
class Tail:
    """Rule applied beyond the finite table.

    ``affine``: x -> a*x + b (a >= 1).  ``div``: x -> (x + c)//a + b.
    ``undefined``: nothing is mapped.
    """

    kind: str
    a: int = 1
    b: int = 0
    c: int = 0

    def __post_init__(self):
        if self.kind not in ("affine", "div", "undefined"):
            raise ValueError(f"unknown tail kind {self.kind}")
        if self.kind != "undefined" and self.a < 1:
            raise ValueError("tail slope must be positive")

    def apply(self, x: int):
        if self.kind == "affine":
            return self.a * x + self.b
        if self.kind == "div":
            return (x + self.c) // self.a + self.b
        return UNDEF

    def preimage(self, y: int, start: int) -> list[int]:
        """All x >= start with (x)tail = y."""
        if self.kind == "affine":
            q, r = divmod(y - self.b, self.a)
            return [q] if r == 0 and q >= start else []
        if self.kind == "div":
            lo = self.a * (y - self.b) - self.c
            return [x for x in range(max(lo, start), lo + self.a) if x >= start]
        return []

    def image_threshold(self, start: int) -> Optional[int]:
        """For onto-a-ray tails, the least y from which every value is hit."""
        if self.kind == "affine" and self.a == 1:
            return start + self.b
        if self.kind == "div":
            return (start + self.c) // self.a + self.b
        return None

    def __str__(self) -> str:
        if self.kind == "undefined":
            return "undefined"
        if self.kind == "affine":
            if (self.a, self.b) == (1, 0):
                return "identity"
            return f"affine({self.a},{self.b})"
        return f"div({self.a},{self.c},{self.b})"


IDENTITY_TAIL = Tail("affine", 1, 0)
UNDEFINED_TAIL = Tail("undefined")


def shift_tail(k: int) -> Tail:
    return Tail("affine", 1, k)


@dataclass(frozen=True)
class FiniteSupport:
    """A finite table on 0..m-1 followed by a tail rule."""

    table: tuple[Optional[int], ...]
    tail: Tail = IDENTITY_TAIL

    def __post_init__(self):
        object.__setattr__(self, "table", tuple(None if v is None or v is UNDEF else int(v)
                                                for v in self.table))
        for v in self.table:
            if v is not None and v < 0:
                raise ValueError("negative image")
        if self.tail.kind == "div" and self.tail.apply(len(self.table)) < 0:
            raise ValueError("tail produces negative values")
        if self.tail.kind == "affine" and self.tail.apply(len(self.table)) < 0:
            raise ValueError("tail produces negative values")

    @property
    def m(self) -> int:
        return len(self.table)

    def __call__(self, x: int):
        if x < self.m:
            v = self.table[x]
            return UNDEF if v is None else v
        return self.tail.apply(x)

    def preimages(self, y: int) -> list[int]:
        out = [x for x, v in enumerate(self.table) if v == y]
        return out + self.tail.preimage(y, self.m)

    def fiber(self, y: int) -> CardinalTag:
        return CardinalTag(len(self.preimages(y)))

    def image_bound(self) -> Optional[int]:
        """A bound beyond which every value is in the image, or None if none exists."""
        thr = self.tail.image_threshold(self.m)
        if thr is None:
            return None
        return max(thr, 0)

    def coimage(self) -> CardinalTag:
        thr = self.image_bound()
        if thr is None:
            # the table is finite and the tail misses infinitely many values
            return ALEPH0
        return CardinalTag(sum(1 for y in range(thr) if not self.preimages(y)))

    def coimage_points(self) -> Optional[list[int]]:
        thr = self.image_bound()
        if thr is None:
            return None
        return [y for y in range(thr) if not self.preimages(y)]

    def is_injective(self) -> bool:
        vals = [v for v in self.table if v is not None]
        if len(set(vals)) != len(vals):
            return False
        if self.tail.kind == "div" and self.tail.a > 1:
            return False
        return all(not self.tail.preimage(v, self.m) for v in vals)

    def undefined_points(self) -> Optional[list[int]]:
        if self.tail.kind == "undefined":
            return None
        return [x for x, v in enumerate(self.table) if v is None]

    def __str__(self) -> str:
        return "table([" + ",".join("-" if v is None else str(v) for v in self.table) + f"],{self.tail})"


def _compose_tails(t1: Tail, t2: Tail) -> Optional[Tail]:
    if t1.kind == "undefined":
        return t1
    if t2.kind == "undefined":
        return t2
    if t1.kind == "affine" and t2.kind == "affine":
        return Tail("affine", t1.a * t2.a, t2.a * t1.b + t2.b)
    if t1.kind == "div" and t2.kind == "div":
        return Tail("div", t1.a * t2.a, t2.b, t1.c + t1.a * (t1.b + t2.c))
    if t1.kind == "affine" and t1.a == 1 and t2.kind == "div":
        return Tail("div", t2.a, t2.b, t2.c + t1.b)
    if t1.kind == "div" and t2.kind == "affine" and t2.a == 1:
        return Tail("div", t1.a, t1.b + t2.b, t1.c)
    return None


def _tail_threshold(t1: Tail, start: int, need: int) -> int:
    """Least x >= start such that (y)t1 >= need for every y >= x."""
    if t1.kind == "undefined":
        return start
    if t1.kind == "affine":
        x = max(start, -(-(need - t1.b) // t1.a))
    else:
        x = max(start, t1.a * (need - t1.b) - t1.c)
    return max(x, start)


def compose_supports(f: FiniteSupport, g: FiniteSupport) -> Optional[FiniteSupport]:
    tail = _compose_tails(f.tail, g.tail)
    if tail is None:
        return None
    M = _tail_threshold(f.tail, f.m, g.m)

    def ev(x):
        v = f(x)
        return UNDEF if v is UNDEF else g(v)

    return FiniteSupport(tuple(ev(x) for x in range(M)), tail)


# -- computable elements -------------------------------------------------------

FAMILIES = ("Transformation", "PartialMap", "PartialBijection", "Injection",
            "Surjection", "Relation", "Permutation")

_FUNCTION_FAMILIES = set(FAMILIES) - {"Relation"}
_PARTIAL = {"PartialMap", "PartialBijection"}


def _family_of_composite(a: str, b: str) -> str:
    if "Relation" in (a, b):
        raise TypeError("relations compose only with relations")
    if a == b:
        return a
    pair_ = {a, b}
    if pair_ <= {"Permutation", "Injection"}:
        return "Injection"
    if pair_ <= {"Permutation", "Surjection"}:
        return "Surjection"
    if pair_ <= {"Permutation", "PartialBijection", "Injection"}:
        return "PartialBijection"
    if pair_ & _PARTIAL:
        return "PartialMap"
    return "Transformation"


@dataclass(frozen=True, eq=False)
class ComputableElement:
    """An element of a countable monoid, known through its evaluator.

    Equality is only ever decided on a stated window.
    """

    family: str
    fn: Optional[Callable[[int], object]] = None
    inv: Optional[Callable[[int], object]] = None
    coimage: Optional[CardinalTag] = None
    fiber: Optional[Callable[[int], CardinalTag]] = None
    support: Optional[FiniteSupport] = None
    member: Optional[Callable[[int, int], bool]] = None
    image_member: Optional[Callable[[int], bool]] = None
    graph: Optional[frozenset] = None
    name: str = "anon"

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family}")
        if self.family == "Relation":
            if self.member is None:
                raise ValueError("relations need a membership predicate")
        elif self.fn is None:
            if self.support is None:
                raise ValueError("need an evaluator or a finite support")
            object.__setattr__(self, "fn", self.support)

    def __call__(self, x: int):
        return self.fn(x)

    def inverse_at(self, y: int):
        if self.inv is None:
            raise TypeError(f"{self.name} has no inverse evaluator")
        return self.inv(y)

    def __repr__(self) -> str:
        return f"ComputableElement({self.family}, {self.name})"

    def window(self, n: int) -> tuple:
        return tuple(self(x) for x in range(n))

    def agrees_on(self, other: "ComputableElement", n: int) -> bool:
        return all(self(x) == other(x) for x in range(n))


def _support_inverse(sup: FiniteSupport) -> Callable[[int], object]:
    table_inv = {v: x for x, v in enumerate(sup.table) if v is not None}

    def inv(y: int):
        if y in table_inv:
            return table_inv[y]
        pre = sup.tail.preimage(y, sup.m)
        return pre[0] if pre else UNDEF

    return inv


def finitary(table: Iterable, tail: Tail = IDENTITY_TAIL, family: Optional[str] = None,
             name: Optional[str] = None) -> ComputableElement:
    """Element given by a finite table plus a tail rule; metadata is derived."""
    sup = FiniteSupport(tuple(table), tail)
    total = None not in sup.table and tail.kind != "undefined"
    inj = sup.is_injective()
    coim = sup.coimage()
    if family is None:
        if total and inj:
            family = "Permutation" if coim == CardinalTag(0) else "Injection"
        elif total:
            family = "Transformation"
        elif inj:
            family = "PartialBijection"
        else:
            family = "PartialMap"
    if family in ("Injection", "Permutation", "PartialBijection") and not inj:
        raise ValueError(f"{family} requested but table is not injective")
    if family in ("Injection", "Permutation", "Transformation", "Surjection") and not total:
        raise ValueError(f"{family} requested but map is partial")
    if family == "Surjection" and coim != CardinalTag(0):
        raise ValueError("Surjection requested but co-image is nonempty")
    return ComputableElement(family, fn=sup, inv=_support_inverse(sup) if inj else None,
                             coimage=coim, fiber=sup.fiber, support=sup,
                             name=name or str(sup))


def element_from_finite(a: FiniteElement) -> ComputableElement:
    """View a finite element on 0..n-1 as an element over N (undefined beyond)."""
    if isinstance(a, FiniteTransformation):
        return finitary(a.images, UNDEFINED_TAIL, "PartialMap", name=str(a))
    if isinstance(a, FinitePartialMap):
        return finitary(a.images, UNDEFINED_TAIL, "PartialMap", name=str(a))
    if isinstance(a, FinitePartialBijection):
        m = a.mapping
        n = max([a.degree] + [x + 1 for x in m])
        return finitary([m.get(x) for x in range(n)], UNDEFINED_TAIL, "PartialBijection",
                        name=str(a))
    if isinstance(a, FiniteBinaryRelation):
        return relation_element(a.pairs, name=str(a))
    raise TypeError(f"cannot lift {type(a).__name__}")


def relation_element(pairs: Iterable[tuple[int, int]], name: Optional[str] = None) -> ComputableElement:
    """A finite relation on N."""
    g = frozenset(pairs)
    img = frozenset(b for _, b in g)
    return ComputableElement("Relation", member=lambda x, y: (x, y) in g,
                             image_member=img.__contains__, graph=g,
                             name=name or "{" + ",".join(f"({a},{b})" for a, b in sorted(g)) + "}")


def partial_bijection_element(pairs: Iterable[tuple[int, int]],
                              tail: Tail = UNDEFINED_TAIL) -> ComputableElement:
    m = dict(pairs)
    n = max([x + 1 for x in m] + [0])
    if tail.kind != "undefined":
        n = max([n] + [v + 1 for v in m.values()])
    return finitary([m.get(x) for x in range(n)], tail,
                    "PartialBijection" if tail.kind == "undefined" else None)


# -- composition and inversion --------------------------------------------------

def compose(a, b):
    """Product ab: first a, then b."""
    if isinstance(a, ComputableElement) or isinstance(b, ComputableElement):
        if not (isinstance(a, ComputableElement) and isinstance(b, ComputableElement)):
            raise TypeError("cannot mix finite and computable elements")
        return _compose_computable(a, b)
    if type(a) is not type(b):
        raise TypeError(f"family mismatch: {type(a).__name__} vs {type(b).__name__}")
    if isinstance(a, Bipartition):
        return bipartition_product(a, b)[0]
    if a.degree != b.degree:
        raise ValueError(f"degree mismatch: {a.degree} vs {b.degree}")
    if isinstance(a, FiniteTransformation):
        return FiniteTransformation(tuple(b.images[v] for v in a.images))
    if isinstance(a, FinitePartialMap):
        return FinitePartialMap(tuple(None if v is None else b.images[v] for v in a.images))
    if isinstance(a, FinitePartialBijection):
        bm = b.mapping
        return FinitePartialBijection(a.degree, frozenset((x, bm[y]) for x, y in a.pairs if y in bm))
    if isinstance(a, FiniteBinaryRelation):
        succ: dict[int, set[int]] = {}
        for z, y in b.pairs:
            succ.setdefault(z, set()).add(y)
        return FiniteBinaryRelation(a.degree, frozenset((x, y) for x, z in a.pairs
                                                        for y in succ.get(z, ())))
    raise TypeError(f"cannot compose {type(a).__name__}")


def _compose_relations(a: ComputableElement, b: ComputableElement) -> ComputableElement:
    name = f"({a.name};{b.name})"
    if a.family != "Relation":
        fa = a.fn
        mb = b.member

        def member(x, y):
            z = fa(x)
            return z is not UNDEF and mb(z, y)
    elif b.family != "Relation":
        if b.inv is None or b.family not in ("Permutation", "Injection", "PartialBijection"):
            raise TypeError("relation times function needs an injective function with an inverse")
        ib, ma = b.inv, a.member

        def member(x, y):
            z = ib(y)
            return z is not UNDEF and ma(x, z)
    elif a.graph is not None:
        rows: dict = {}
        for x, z in a.graph:
            rows.setdefault(x, []).append(z)
        mb = b.member

        def member(x, y):
            return any(mb(z, y) for z in rows.get(x, ()))
    elif b.graph is not None:
        cols: dict = {}
        for z, y in b.graph:
            cols.setdefault(y, []).append(z)
        ma = a.member

        def member(x, y):
            return any(ma(x, z) for z in cols.get(y, ()))
    else:
        raise TypeError("product of two infinite relations is not decidable")
    graph = None
    if a.graph is not None and b.graph is not None:
        graph = frozenset((x, y) for x, z in a.graph for z2, y in b.graph if z == z2)
        return relation_element(graph, name=name)
    return ComputableElement("Relation", member=member, name=name)


def _compose_computable(a: ComputableElement, b: ComputableElement) -> ComputableElement:
    if "Relation" in (a.family, b.family):
        return _compose_relations(a, b)
    fam = _family_of_composite(a.family, b.family)
    fa, fb = a.fn, b.fn

    def fn(x):
        v = fa(x)
        return UNDEF if v is UNDEF else fb(v)

    inv = None
    if a.inv is not None and b.inv is not None:
        ia, ib = a.inv, b.inv

        def inv(y):
            v = ib(y)
            return UNDEF if v is UNDEF else ia(v)

    sup = None
    if a.support is not None and b.support is not None:
        sup = compose_supports(a.support, b.support)
    coim = None
    fiber = None
    if sup is not None:
        coim = sup.coimage()
        fiber = sup.fiber
    elif fam in ("Injection", "Permutation") and a.coimage is not None and b.coimage is not None:
        # |N \ im(ab)| = |N \ im(a)| + |N \ im(b)| for injections
        coim = a.coimage + b.coimage
    elif fam == "Surjection" and a.fiber is not None and b.fiber is not None and b.inv is None:
        pass
    return ComputableElement(fam, fn=fn, inv=inv, coimage=coim, fiber=fiber, support=sup,
                             name=f"({a.name};{b.name})")


def invert(a):
    if isinstance(a, FiniteBinaryRelation):
        return FiniteBinaryRelation(a.degree, frozenset((y, x) for x, y in a.pairs))
    if isinstance(a, FinitePartialBijection):
        return FinitePartialBijection(a.degree, frozenset((y, x) for x, y in a.pairs))
    if isinstance(a, FiniteTransformation):
        if sorted(a.images) != list(range(a.degree)):
            raise TypeError("transformation is not a permutation")
        out = [0] * a.degree
        for x, y in enumerate(a.images):
            out[y] = x
        return FiniteTransformation(tuple(out))
    if isinstance(a, ComputableElement):
        if a.family == "Relation":
            if a.graph is not None:
                return relation_element(((y, x) for x, y in a.graph), name=f"{a.name}^-1")
            m = a.member
            return ComputableElement("Relation", member=lambda x, y: m(y, x), name=f"{a.name}^-1")
        if a.inv is None:
            raise TypeError(f"{a.family} element has no inverse evaluator")
        fam = {"Injection": "PartialBijection", "Surjection": "PartialMap"}.get(a.family, a.family)
        return ComputableElement(fam, fn=a.inv, inv=a.fn, name=f"{a.name}^-1")
    raise TypeError(f"{type(a).__name__} has no inverse")


def identity(kind: type, n: int):
    if kind is FiniteTransformation:
        return FiniteTransformation(tuple(range(n)))
    if kind is FinitePartialMap:
        return FinitePartialMap(tuple(range(n)))
    if kind is FinitePartialBijection:
        return FinitePartialBijection(n, frozenset((x, x) for x in range(n)))
    if kind is FiniteBinaryRelation:
        return FiniteBinaryRelation(n, frozenset((x, x) for x in range(n)))
    if kind is Bipartition:
        return identity_bipartition(n)
    raise TypeError(kind)


# -- bipartition product -----------------------------------------------------------

class UnionFind:
    def __init__(self, items: Iterable):
        self.parent = {x: x for x in items}

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)

    def classes(self) -> list[list]:
        out: dict = {}
        for x in self.parent:
            out.setdefault(self.find(x), []).append(x)
        return list(out.values())


@dataclass
class PathCertificates:
    """Alternating s/t chains in X x {0,1,2} joining points of each product block.

    A step is tagged "s" when both ends lie in one block of s (rows 0 and 1) and
    "t" when both lie in one block of t (rows 1 and 2).
    """

    degree: int
    trees: dict = field(default_factory=dict)     # anchor -> {point: (parent, tag)}
    anchor_of: dict = field(default_factory=dict)

    def _to_anchor(self, p) -> list:
        tree = self.trees[self.anchor_of[p]]
        path = [p]
        while tree[path[-1]] is not None:
            path.append(tree[path[-1]][0])
        return path

    def path(self, a: Point, b: Point) -> list[tuple[int, int]]:
        """Chain of X x {0,1,2} points from product point a to product point b."""
        pa, pb = _lift(a), _lift(b)
        if self.anchor_of[pa] != self.anchor_of[pb]:
            raise KeyError(f"{a} and {b} lie in different blocks")
        up = self._to_anchor(pa)
        down = self._to_anchor(pb)[::-1]
        return up + down[1:]

    def pairs(self) -> Iterator[tuple[Point, Point]]:
        groups: dict = {}
        for p, anc in self.anchor_of.items():
            if p[1] != 1:
                groups.setdefault(anc, []).append(_lower(p))
        for pts in groups.values():
            pts.sort(key=lambda q: (q[1], q[0]))
            for i in range(len(pts)):
                for j in range(i + 1, len(pts)):
                    yield pts[i], pts[j]


def _lift(p: Point) -> tuple[int, int]:
    return (p[0], 0) if p[1] == 0 else (p[0], 2)


def _lower(q: tuple[int, int]) -> Point:
    return (q[0], 0) if q[1] == 0 else (q[0], 1)


def bipartition_product(s: Bipartition, t: Bipartition) -> tuple[Bipartition, PathCertificates]:
    if s.degree != t.degree:
        raise ValueError(f"degree mismatch: {s.degree} vs {t.degree}")
    n = s.degree
    pts = [(x, r) for r in range(3) for x in range(n)]
    adj: dict = {p: [] for p in pts}
    uf = UnionFind(pts)
    for blocks, shift, tag in ((s.blocks, 0, "s"), (t.blocks, 1, "t")):
        for b in blocks:
            lifted = sorted((x, r + shift) for x, r in b)
            for i, p in enumerate(lifted):
                for q in lifted[i + 1:]:
                    adj[p].append((q, tag))
                    adj[q].append((p, tag))
                uf.union(lifted[0], p)
    cert = PathCertificates(n)
    for cls in uf.classes():
        anchor = min(cls, key=lambda q: (q[1] == 1, q[1], q[0]))
        tree = {anchor: None}
        dq = deque([anchor])
        while dq:
            p = dq.popleft()
            for q, tag in adj[p]:
                if q not in tree:
                    tree[q] = (p, tag)
                    dq.append(q)
        cert.trees[anchor] = tree
        for p in cls:
            cert.anchor_of[p] = anchor
    blocks = []
    for cls in uf.classes():
        outer = [_lower(q) for q in cls if q[1] != 1]
        if outer:
            blocks.append(frozenset(outer))
    return Bipartition(n, frozenset(blocks)), cert


def check_certificate(s: Bipartition, t: Bipartition, path: list[tuple[int, int]]) -> bool:
    """Each consecutive step must stay inside one block of s or one block of t."""
    sb, tb = s.block_of(), t.block_of()

    def same_s(p, q):
        return p[1] <= 1 and q[1] <= 1 and sb[p] is sb[q]

    def same_t(p, q):
        return p[1] >= 1 and q[1] >= 1 and tb[(p[0], p[1] - 1)] is tb[(q[0], q[1] - 1)]

    return all(same_s(p, q) or same_t(p, q) for p, q in zip(path, path[1:]))


# -- cardinal data -----------------------------------------------------------------

@dataclass(frozen=True)
class CardinalData:
    coimage: Union[CardinalTag, Unknown]
    fiber: Callable[[int], Union[CardinalTag, Unknown]]


def cardinal_data(a: ComputableElement, window: int = 64) -> CardinalData:
    """Co-image size and fibers, from metadata or the finite-support descriptor."""
    if a.coimage is not None:
        coim = a.coimage
    elif a.support is not None:
        coim = a.support.coimage()
    else:
        coim = Unknown(f"{a.name}: no declared co-image and no finite support")
    if a.fiber is not None:
        fib = a.fiber
    elif a.support is not None:
        fib = a.support.fiber
    elif a.inv is not None and a.family in ("Injection", "Permutation", "PartialBijection"):
        inv = a.inv
        fib = lambda y: CardinalTag(0 if inv(y) is UNDEF else 1)
    else:
        fib = lambda y: Unknown(f"{a.name}: fibers not decidable")
    return CardinalData(coim, fib)


# -- text syntax -------------------------------------------------------------------

class ParseError(ValueError):
    def __init__(self, msg: str, text: str, pos: int):
        super().__init__(f"{msg} at position {pos}: {text!r}")
        self.text = text
        self.pos = pos


_PAIR_RE = re.compile(r"\(\s*(\d+)\s*,\s*(\d+)\s*\)")


def parse_pairs(text: str) -> list[tuple[int, int]]:
    t = text.strip()
    if not (t.startswith("{") and t.endswith("}")):
        raise ParseError("expected '{...}'", text, 0)
    body = t[1:-1].strip()
    if not body:
        return []
    out = []
    pos = 0
    while pos < len(body):
        m = _PAIR_RE.match(body, pos)
        if not m:
            raise ParseError("expected '(a,b)'", text, pos + 1)
        out.append((int(m.group(1)), int(m.group(2))))
        pos = m.end()
        while pos < len(body) and body[pos] in " ,":
            pos += 1
    return out


def _parse_point(tok: str, text: str) -> Point:
    tok = tok.strip()
    if tok.endswith("'"):
        return (int(tok[:-1]), 1)
    if not tok.isdigit():
        raise ParseError(f"bad point {tok!r}", text, text.find(tok))
    return (int(tok), 0)


def parse_bipartition(text: str, degree: Optional[int] = None) -> Bipartition:
    t = text.strip()
    if not (t.startswith("[[") and t.endswith("]]")):
        raise ParseError("expected '[[...],...]'", text, 0)
    blocks = []
    for m in re.finditer(r"\[([^\[\]]*)\]", t[1:-1]):
        toks = [x for x in m.group(1).split(",") if x.strip()]
        blocks.append(frozenset(_parse_point(x, text) for x in toks))
    n = degree
    if n is None:
        n = 1 + max((x for b in blocks for x, _ in b), default=-1)
    return Bipartition(n, frozenset(blocks))


_RULES = ("identity", "shift", "double", "pairing", "table")


def parse_rule(text: str) -> ComputableElement:
    m = re.fullmatch(r"rule:\s*(\w+)\s*(?:\((.*)\))?\s*", text.strip())
    if not m:
        raise ParseError("expected 'rule:<name>(args)'", text, 0)
    name, args = m.group(1), (m.group(2) or "").strip()
    if name == "identity":
        return finitary([], IDENTITY_TAIL, name="identity")
    if name == "shift":
        k = int(args or 1)
        return finitary([], shift_tail(k), name=f"shift({k})")
    if name == "double":
        return finitary([], Tail("affine", 2, 0), name="double")
    if name == "pairing":
        return ComputableElement("Injection", fn=lambda x: pair(x, x),
                                 inv=lambda y: (lambda ab: ab[0] if ab[0] == ab[1] else UNDEF)(unpair(y)),
                                 coimage=ALEPH0, name="pairing")
    if name == "table":
        tm = re.fullmatch(r"\[(.*?)\]\s*(?:,\s*(.+))?", args)
        if not tm:
            raise ParseError("expected table([..],tail)", text, text.find("("))
        vals = [None if v.strip() == "-" else int(v) for v in tm.group(1).split(",") if v.strip()]
        tail_txt = (tm.group(2) or "identity").strip()
        return finitary(vals, parse_tail(tail_txt, text))
    raise ParseError(f"unknown rule {name!r}; known: {', '.join(_RULES)}", text, 5)


def parse_tail(t: str, text: str = "") -> Tail:
    if t == "identity":
        return IDENTITY_TAIL
    if t == "undefined":
        return UNDEFINED_TAIL
    m = re.fullmatch(r"(shift|affine|div)\(([-\d,\s]+)\)", t)
    if not m:
        raise ParseError(f"bad tail {t!r}", text or t, 0)
    nums = [int(v) for v in m.group(2).split(",")]
    if m.group(1) == "shift":
        return shift_tail(nums[0])
    if m.group(1) == "affine":
        return Tail("affine", *nums)
    a, c, b = (nums + [0, 0])[:3]
    return Tail("div", a, b, c)


def parse_element(text: str, as_family: Optional[str] = None):
    """Parse the element text syntax.

    "[2,0,1]" transformation, "[2,-,1]" partial map, "{(0,1)}" relation
    (or partial bijection with ``as_family="PartialBijection"``),
    "[[0,1'],[1,0']]" bipartition, "rule:shift(1)" computable element.
    """
    t = text.strip()
    if t.startswith("rule:"):
        return parse_rule(t)
    if t.startswith("[["):
        return parse_bipartition(t)
    if t.startswith("{"):
        pairs = parse_pairs(t)
        n = 1 + max((max(a, b) for a, b in pairs), default=-1)
        if as_family == "PartialBijection":
            return FinitePartialBijection(n, frozenset(pairs))
        return FiniteBinaryRelation(n, frozenset(pairs))
    if t.startswith("[") and t.endswith("]"):
        toks = [x.strip() for x in t[1:-1].split(",")] if t[1:-1].strip() else []
        vals = []
        for i, x in enumerate(toks):
            if x == "-":
                vals.append(None)
            elif x.isdigit():
                vals.append(int(x))
            else:
                raise ParseError(f"bad image {x!r}", text, t.find(x))
        if None in vals or as_family == "PartialMap":
            return FinitePartialMap(tuple(vals))
        return FiniteTransformation(tuple(vals))
    raise ParseError("unrecognised element syntax", text, 0)
