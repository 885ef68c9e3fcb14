"""Named subbasic sets on the countable classical monoids.

Membership is three-valued: True, False, or an ``Unknown`` carrying the reason
the question could not be settled from the element's evaluator and metadata.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional, Union

from .elements import (ALEPH0, UNDEF, CardinalTag, ComputableElement, FiniteSupport, ParseError,
                       Tail, Unknown, cardinal_data, finitary, UNDEFINED_TAIL)

Verdict = Union[bool, Unknown]


# -- finite-or-cofinite subsets of N --------------------------------------------------

@dataclass(frozen=True)
class FinCof:
    """A finite set, or (``cofinite``) the complement of one."""

    points: frozenset[int]
    cofinite: bool = False

    def __contains__(self, x: int) -> bool:
        return (x in self.points) != self.cofinite

    def __str__(self) -> str:
        body = "{" + ",".join(map(str, sorted(self.points))) + "}"
        return "cof" + body if self.cofinite else body

    @classmethod
    def parse(cls, text: str) -> "FinCof":
        t = text.strip()
        if t in ("N", "all"):
            return cls(frozenset(), True)
        cof = t.startswith("cof")
        if cof:
            t = t[3:].strip()
        if not (t.startswith("{") and t.endswith("}")):
            raise ParseError("expected '{..}' or 'cof{..}'", text, 0)
        pts = frozenset(int(v) for v in t[1:-1].split(",") if v.strip())
        return cls(pts, cof)


ALL = FinCof(frozenset(), True)


# -- named sets ------------------------------------------------------------------------

@dataclass(frozen=True)
class NamedSet:
    """One subbasic set.  ``kind`` selects the formula; ``args`` are its parameters.

    U(x,y)      (x)h = y, i.e. (x,y) in h
    W(x)        x not in dom(h)
    Winv(y)     y not in im(h)
    V(x,y)      (x,y) not in h
    VYZ(Y,Z)    (Y)h is contained in Z
    F(k)        |N \\ im(h)| = k
    UF(k,x)     |(x)h^-1| = k
    Sym         h is a permutation
    Down(x), Up(x), B(x,U)   on (Z, max): y < x, y > x, and y > x with y in U
    """

    kind: str
    args: tuple = ()

    def __str__(self) -> str:
        if not self.args:
            return self.kind
        return f"{self.kind}(" + ",".join(str(a) for a in self.args) + ")"


_KINDS = {"U": 2, "W": 1, "Winv": 1, "V": 2, "VYZ": 2, "F": 1, "UF": 2, "Sym": 0,
          "Down": 1, "Up": 1, "B": 2}


def parse_named_set(text: str) -> NamedSet:
    t = text.strip()
    m = re.fullmatch(r"(\w+)\s*(?:\((.*)\))?", t)
    if not m or m.group(1) not in _KINDS:
        raise ParseError(f"unknown set; expected one of {', '.join(_KINDS)}", text, 0)
    kind, body = m.group(1), (m.group(2) or "")
    if kind in ("VYZ", "B"):
        parts = _split_top(body)
        if len(parts) != 2:
            raise ParseError(f"{kind} takes two arguments", text, t.find("("))
        if kind == "VYZ":
            return NamedSet(kind, (FinCof.parse(parts[0]), FinCof.parse(parts[1])))
        x = parts[0].strip()
        return NamedSet(kind, (_int_or_one(x), FinCof.parse(parts[1])))
    vals = [v.strip() for v in body.split(",") if v.strip()]
    if len(vals) != _KINDS[kind]:
        raise ParseError(f"{kind} takes {_KINDS[kind]} argument(s)", text, t.find("("))
    if kind in ("F",):
        return NamedSet(kind, (CardinalTag.parse(vals[0]),))
    if kind == "UF":
        return NamedSet(kind, (CardinalTag.parse(vals[0]), int(vals[1])))
    if kind in ("Down", "Up"):
        return NamedSet(kind, (_int_or_one(vals[0]),))
    return NamedSet(kind, tuple(int(v) for v in vals))


ONE = "one"     # the adjoined identity of (Z, max), below every integer


def _int_or_one(x: str):
    return ONE if x == ONE else int(x)


def _split_top(body: str) -> list[str]:
    out, depth, cur = [], 0, ""
    for ch in body:
        if ch == "{":
            depth += 1
        elif ch == "}":
            depth -= 1
        if ch == "," and depth == 0:
            out.append(cur)
            cur = ""
        else:
            cur += ch
    out.append(cur)
    return [p.strip() for p in out]


def _in_image(e: ComputableElement, y: int) -> Verdict:
    if e.family == "Relation":
        if e.image_member is not None:
            return e.image_member(y)
        return Unknown(f"{e.name}: image of a relation not declared")
    if e.inv is not None and e.family in ("Injection", "Permutation", "PartialBijection"):
        return e.inv(y) is not UNDEF
    if e.support is not None:
        return bool(e.support.preimages(y))
    if e.image_member is not None:
        return e.image_member(y)
    return Unknown(f"{e.name}: image membership not decidable")


def _pair_in(e: ComputableElement, x: int, y: int) -> bool:
    if e.family == "Relation":
        return e.member(x, y)
    return e(x) == y


def member(e, s: NamedSet) -> Verdict:
    """Decide e in s, or return Unknown with a reason."""
    k, a = s.kind, s.args
    if k in ("Down", "Up", "B"):
        if not isinstance(e, int):
            raise TypeError("max-chain sets take integers")
        x = a[0]
        if k == "Down":
            return x != ONE and e < x
        above = True if x == ONE else e > x
        if k == "Up":
            return above
        return above and e in a[1]
    if not isinstance(e, ComputableElement):
        raise TypeError("expected a computable element")
    if k == "U":
        return _pair_in(e, *a)
    if k == "V":
        return not _pair_in(e, *a)
    if k == "W":
        if e.family == "Relation":
            return Unknown("domain of a relation is not decidable from membership")
        return e(a[0]) is UNDEF
    if k == "Winv":
        r = _in_image(e, a[0])
        return r if isinstance(r, Unknown) else not r
    if k == "VYZ":
        return _member_vyz(e, *a)
    if k == "F":
        c = cardinal_data(e).coimage
        return c if isinstance(c, Unknown) else c == a[0]
    if k == "UF":
        f = cardinal_data(e).fiber(a[1])
        return f if isinstance(f, Unknown) else f == a[0]
    if k == "Sym":
        if e.family == "Permutation":
            return True
        if e.support is not None:
            sup = e.support
            return sup.is_injective() and sup.coimage() == CardinalTag(0) and \
                sup.undefined_points() == []
        return Unknown(f"{e.name}: invertibility not decidable")
    raise ValueError(f"unknown set kind {k}")


def _member_vyz(e: ComputableElement, Y: FinCof, Z: FinCof) -> Verdict:
    if e.family == "Relation" and e.graph is not None:
        return all(y in Z for x, y in e.graph if x in Y)
    if not Z.cofinite:
        if Y.cofinite:
            return Unknown("VYZ with cofinite Y and finite Z needs the whole image")
        if e.family == "Relation":
            return Unknown("rows of an infinite relation are not enumerable")
        return all(e(y) is UNDEF or e(y) in Z for y in Y.points)
    bad = Z.points
    if not Y.cofinite:
        return all(not _pair_in(e, y, z) for y in Y.points for z in bad)
    if Y.points:
        return Unknown("VYZ with proper cofinite Y is not decidable from metadata")
    verdicts = [_in_image(e, z) for z in bad]
    for v in verdicts:
        if isinstance(v, Unknown):
            return v
    return not any(verdicts)


# -- the R_{k,Y,Z} basis ----------------------------------------------------------------

@dataclass(frozen=True)
class BasicRSet:
    """{f : k is contained in f, Y misses dom f, Z misses im f}; ``empty`` marks the empty set."""

    k: frozenset = frozenset()
    Y: frozenset = frozenset()
    Z: frozenset = frozenset()
    empty: bool = False

    def __str__(self) -> str:
        if self.empty:
            return "Empty"
        f = lambda s: "{" + ",".join(map(str, sorted(s))) + "}"
        kk = "{" + ",".join(f"({a},{b})" for a, b in sorted(self.k)) + "}"
        return f"R({kk}, {f(self.Y)}, {f(self.Z)})"

    def member(self, e: ComputableElement) -> Verdict:
        if self.empty:
            return False
        if any(e(x) != y for x, y in self.k):
            return False
        if any(e(y) is not UNDEF for y in self.Y):
            return False
        for z in self.Z:
            r = _in_image(e, z)
            if isinstance(r, Unknown):
                return r
            if r:
                return False
        return True


EMPTY = BasicRSet(empty=True)


def make_rset(k, Y=(), Z=()) -> BasicRSet:
    k, Y, Z = frozenset(k), frozenset(Y), frozenset(Z)
    dom = [a for a, _ in k]
    img = [b for _, b in k]
    if len(set(dom)) != len(dom) or len(set(img)) != len(img):
        return EMPTY
    if set(dom) & Y or set(img) & Z:
        return EMPTY
    return BasicRSet(k, Y, Z)


def normalize_I4(sets) -> BasicRSet:
    k, Y, Z = set(), set(), set()
    for s in sets:
        if isinstance(s, str):
            s = parse_named_set(s)
        if s.kind == "U":
            k.add(tuple(s.args))
        elif s.kind == "W":
            Y.add(s.args[0])
        elif s.kind == "Winv":
            Z.add(s.args[0])
        else:
            raise ValueError(f"{s} is not a subbasic set of the I4 topology")
    return make_rset(k, Y, Z)


# -- metrics ---------------------------------------------------------------------------

METRICS = ("d_I1", "d1", "d2", "d4", "d_inj")
SCAN_LIMIT = 1 << 20


def _support(e: ComputableElement) -> FiniteSupport:
    if e.support is None:
        raise ValueError(f"{e.name}: metric needs a finite-support descriptor")
    if e.support.tail.kind == "div":
        raise ValueError(f"{e.name}: metric needs an affine or undefined tail")
    return e.support


def inverse_support(sup: FiniteSupport) -> FiniteSupport:
    """Descriptor of the inverse of an injective descriptor with a slope-1 or undefined tail."""
    if not sup.is_injective():
        raise ValueError("descriptor is not injective")
    t = sup.tail
    if t.kind == "affine" and t.a != 1:
        raise ValueError("inverse of a non-unit slope tail is not finitary")
    top = max([v + 1 for v in sup.table if v is not None] + [0])
    if t.kind == "undefined":
        M = top
        new_tail = UNDEFINED_TAIL
    else:
        M = max(top, sup.m + t.b, 0)
        new_tail = Tail("affine", 1, -t.b)
    table = []
    for y in range(M):
        pre = sup.preimages(y)
        table.append(pre[0] if pre else None)
    return FiniteSupport(tuple(table), new_tail)


def _first_difference(f: FiniteSupport, g: FiniteSupport) -> Optional[int]:
    M = max(f.m, g.m)
    for x in range(M):
        if f(x) != g(x):
            return x
    if f.tail == g.tail:
        return None
    for x in range(M, M + SCAN_LIMIT):
        if f(x) != g(x):
            return x
    raise ValueError("no difference found within the scan limit")


def _graph_index(f: FiniteSupport, g: FiniteSupport) -> Optional[int]:
    """Least n with (n x n) meeting f and g differently."""
    best = None
    M = max(f.m, g.m)
    limit = M if f.tail == g.tail else M + SCAN_LIMIT
    x = 0
    while x < limit and (best is None or x < best):
        a, b = f(x), g(x)
        if a != b:
            for v in (a, b):
                if v is not UNDEF:
                    c = max(x, v) + 1
                    best = c if best is None else min(best, c)
        x += 1
    if best is None and f.tail != g.tail:
        raise ValueError("no difference found within the scan limit")
    return best


def metric(mid: str, f: ComputableElement, g: ComputableElement) -> Fraction:
    if mid not in METRICS:
        raise ValueError(f"unknown metric {mid}")
    sf, sg = _support(f), _support(g)
    if mid == "d_I1":
        m = _graph_index(sf, sg)
        return Fraction(0) if m is None else Fraction(1, m + 1)
    if mid == "d1":
        m = _first_difference(sf, sg)
        return Fraction(0) if m is None else Fraction(1, m + 1)
    if mid == "d2":
        m = _first_difference(inverse_support(sf), inverse_support(sg))
        return Fraction(0) if m is None else Fraction(1, m + 1)
    if mid == "d4":
        a = _first_difference(sf, sg)
        b = _first_difference(inverse_support(sf), inverse_support(sg))
        ms = [v for v in (a, b) if v is not None]
        return Fraction(0) if not ms else Fraction(1, min(ms) + 1)
    # d_inj
    if sf.coimage() != sg.coimage():
        return Fraction(1)
    m = _graph_index(sf, sg)
    return Fraction(0) if m is None else Fraction(1, m + 1)


def ball_to_basic(f: ComputableElement, m: int) -> BasicRSet:
    """The basic set of all g agreeing with f, and with f^-1, on 0..m-1.

    This is the closed ball {g : d4(f, g) <= 1/(m+1)}, equivalently the open
    ball of radius 1/m.
    """
    sf = _support(f)
    inv = inverse_support(sf)
    k = set()
    for x in range(m):
        v = sf(x)
        if v is not UNDEF:
            k.add((x, v))
        w = inv(x)
        if w is not UNDEF:
            k.add((w, x))
    Y = {x for x in range(m) if sf(x) is UNDEF}
    Z = {y for y in range(m) if inv(y) is UNDEF}
    return make_rset(k, Y, Z)


# -- named topologies: subbasis enumerators ----------------------------------------------

TOPOLOGIES = ("Pointwise", "P", "B1", "B2", "I1", "I2", "I3", "I4", "J", "S1", "S2",
              "MaxChainOrder", "MaxChainFM")


def _pairs() -> Iterator[tuple[int, int]]:
    for s in itertools.count():
        for x in range(s + 1):
            yield x, s - x


def _small_fincof(s: int) -> Iterator[FinCof]:
    for r in range(s + 1):
        for pts in itertools.combinations(range(s), r):
            yield FinCof(frozenset(pts), False)
            yield FinCof(frozenset(pts), True)


def subbasis(tid: str) -> Iterator[NamedSet]:
    """Enumerate a subbasis of the named topology (infinite stream)."""
    if tid not in TOPOLOGIES:
        raise ValueError(f"unknown topology {tid}")
    for x, y in _pairs():
        if tid in ("Pointwise", "B1", "I2", "I3", "I4", "J", "S1", "S2", "P", "B2", "I1"):
            yield NamedSet("U", (x, y))
        if tid == "I1":
            yield NamedSet("V", (x, y))
        if tid in ("P", "I2", "I4") and y == 0:
            yield NamedSet("W", (x,))
        if tid in ("I3", "I4", "J") and y == 0:
            yield NamedSet("Winv", (x,))
        if tid == "J" and y == 0:
            yield NamedSet("F", (CardinalTag(x),))
            if x == 0:
                yield NamedSet("F", (ALEPH0,))
        if tid == "S1" and x == 0 and y == 0:
            yield NamedSet("Sym")
        if tid == "S2":
            yield NamedSet("UF", (CardinalTag(x), y))
            if x == 0:
                yield NamedSet("UF", (ALEPH0, y))
        if tid == "B2":
            s = x + y
            if x == 0:
                for Y in _small_fincof(s):
                    for Z in _small_fincof(s):
                        yield NamedSet("VYZ", (Y, Z))
        if tid == "MaxChainOrder":
            for v in (x - y, y - x):
                yield NamedSet("Down", (v,))
                yield NamedSet("Up", (v,))
        if tid == "MaxChainFM":
            yield NamedSet("B", (x - y, FinCof(frozenset(range(-y, y)), True)))


# -- separation witnesses -------------------------------------------------------------------

@dataclass
class WitnessBundle:
    case: str
    center: object
    target: str
    checks: list

    @property
    def ok(self) -> bool:
        return bool(self.checks) and all(c["ok"] for c in self.checks)

    def to_json(self) -> dict:
        return {"case": self.case, "center": str(self.center), "target": self.target,
                "verdict": "pass" if self.ok else "fail", "n_checked": len(self.checks),
                "checks": self.checks[:5]}


def _check(info: dict, in_nbhd, in_target) -> dict:
    info.update(in_nbhd=in_nbhd, in_target=in_target, ok=in_nbhd is True and in_target is False)
    return info


def winv_witness(x: int, Y) -> ComputableElement:
    b = min(set(range(len(Y) + 2)) - set(Y) - {x})
    return finitary([None] * b + [x], UNDEFINED_TAIL, "PartialBijection")


def zariski_witness(x: int, h) -> ComputableElement:
    used = {a for a, _ in h} | {b for _, b in h} | {x}
    y = min(set(range(len(used) + 1)) - used)
    table = [None] * (max(x, y) + 1)
    table[x], table[y] = y, x
    return finitary(table, UNDEFINED_TAIL, "PartialBijection")


def _square_fixes(e: ComputableElement, x: int) -> bool:
    """Is {(x,x)} e^2 = {(x,x)}?"""
    v = e(x)
    return v is not UNDEF and e(v) == x


def separation_witness(case: str, x: int = 0, bound: int = 4, m: int = 6) -> WitnessBundle:
    """Exhibit, for every basic neighbourhood of the centre up to ``bound``, a point
    of the neighbourhood outside the target set."""
    empty = finitary([], UNDEFINED_TAIL, "PartialBijection", name="empty")
    checks = []
    if case == "Winv_not_in_I2":
        if bound < 1:
            raise ValueError("bound too small")
        for r in range(bound + 1):
            for Y in itertools.combinations(range(bound), r):
                w = winv_witness(x, Y)
                nb = make_rset((), Y, ())
                checks.append(_check({"Y": list(Y), "witness": w.name}, nb.member(w),
                                     member(w, NamedSet("Winv", (x,)))))
        return WitnessBundle(case, empty, f"Winv({x})", checks)
    if case == "ZariskiSet_not_I1":
        pts = [(a, b) for a in range(bound) for b in range(bound)]
        for r in range(3):
            for combo in itertools.combinations(pts, r):
                h = [p for p in combo]
                if len({a for a, _ in h}) != len(h) or len({b for _, b in h}) != len(h):
                    continue
                w = zariski_witness(x, h)
                in_nbhd = all(member(w, NamedSet("V", p)) for p in h)
                checks.append(_check({"h": h, "witness": w.name}, in_nbhd,
                                     not _square_fixes(w, x)))
        return WitnessBundle(case, empty, f"{{s : {{({x},{x})}}s^2 != {{({x},{x})}}}}", checks)
    if case == "B2_antichain":
        fams = [antichain_relation(i) for i in range(m)]
        for i, f in enumerate(fams):
            for j in range(m):
                v = member(f, NamedSet("VYZ", (ALL, FinCof(frozenset({j}), True))))
                # f_i lies in its own set V(N, X_i) and in no other
                checks.append({"i": i, "j": j, "member": v, "ok": v is (i == j)})
        return WitnessBundle(case, f"{m} relations", "antichain", checks)
    if case == "MaxChain_FM_vs_HM":
        target = NamedSet("Down", (x,))
        for a in range(x - bound, x):
            for r in range(3):
                for F in itertools.combinations(range(x - bound, x + bound), r):
                    U = FinCof(frozenset(F), True)
                    centre = next(c for c in range(a + 1, x + 2 * bound) if c in U)
                    if centre >= x:
                        continue
                    y = next(c for c in itertools.count(max(x, a + 1)) if c in U)
                    nb = NamedSet("B", (a, U))
                    checks.append(_check({"a": a, "U": str(U), "centre": centre, "witness": y},
                                         member(y, nb) and member(centre, nb),
                                         member(y, target)))
        return WitnessBundle(case, f"points below {x}", str(target), checks)
    raise ValueError(f"unknown case {case}")


def antichain_relation(i: int) -> ComputableElement:
    """The identity relation with i removed; its image is N minus {i}."""
    return ComputableElement("Relation", member=lambda a, b: a == b != i,
                             image_member=lambda z: z != i, name=f"id-{{{i}}}")


def v_as_i2_union(x: int, y: int, e: ComputableElement, window: int) -> tuple[bool, bool]:
    """Evaluate the two candidate I2 expressions for V(x,y) at e on a window.

    Returns (W_x or some U_{x,z} with z != y, W_x or some U_{z,y} with z != x).
    """
    a = e(x) is UNDEF or any(e(x) == z for z in range(window) if z != y)
    b = e(x) is UNDEF or any(e(z) == y for z in range(window) if z != x)
    return a, b
