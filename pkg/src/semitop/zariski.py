"""Zariski topologies of finite semigroups, computed from word functions.

A word function sends s to t0 s^e0 t1 s^e1 ... t_{k-1} s^e_{k-1} with k >= 1 and
every t_i in S^1.  The set of induced maps is found by a fixed-point closure
over maps S -> S, keeping a shortest witness word for each.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

from .elements import UNDEF, ComputableElement, Unknown
from .fintop import FiniteSemigroup, FiniteTopology, bits, generate_topology, members

MODES = ("semigroup", "inverse")
WORDS = ("strict", "with_constants")

Letter = tuple[int, int]          # (coefficient index in S^1, exponent +1/-1)


@dataclass(frozen=True)
class WordFunction:
    """An induced map S -> S with one shortest word producing it.

    ``word`` is a tuple of letters (t, e), read as t s^e; a constant map has
    ``const`` set and an empty word.
    """

    induced: tuple[int, ...]
    word: tuple[Letter, ...]
    const: Optional[int] = None

    def show(self, one: Optional[int] = None) -> str:
        if self.const is not None:
            return f"const({self.const})"
        parts = []
        for t, e in self.word:
            if t != one:
                parts.append(str(t))
            parts.append("s" if e == 1 else "s^-1")
        return " ".join(parts)


@dataclass(frozen=True)
class _Context:
    S: FiniteSemigroup
    ext: FiniteSemigroup        # S^1
    one: int                    # index of the identity of S^1
    inv: Optional[tuple[int, ...]]
    letters: tuple[Letter, ...]


def _context(S: FiniteSemigroup, mode: str, adjoin_identity: bool) -> _Context:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    inv = None
    if mode == "inverse":
        inv = S.inverse
        if inv is None:
            raise ValueError("inverse mode needs an inverse semigroup")
    ext, one = S.with_identity(force=adjoin_identity)
    exps = (1, -1) if mode == "inverse" else (1,)
    letters = tuple((t, e) for t in range(ext.order) for e in exps)
    return _Context(S, ext, one, inv, letters)


def evaluate_word(ctx: _Context, word: Sequence[Letter], s: int) -> int:
    tab = ctx.ext.table
    acc = None
    for t, e in word:
        v = s if e == 1 else ctx.inv[s]
        piece = tab[t][v]
        acc = piece if acc is None else tab[acc][piece]
    return acc


def _extend(ctx: _Context, phi: tuple[int, ...], letter: Letter) -> tuple[int, ...]:
    tab = ctx.ext.table
    t, e = letter
    if e == 1:
        return tuple(tab[tab[phi[s]][t]][s] for s in range(ctx.S.order))
    return tuple(tab[tab[phi[s]][t]][ctx.inv[s]] for s in range(ctx.S.order))


def word_functions(S: FiniteSemigroup, mode: str = "semigroup", words: str = "with_constants",
                   adjoin_identity: bool = False) -> list[WordFunction]:
    """All induced maps of words, by breadth-first closure (so witnesses are shortest)."""
    if words not in WORDS:
        raise ValueError(f"words must be one of {WORDS}")
    ctx = _context(S, mode, adjoin_identity)
    found: dict[tuple[int, ...], tuple[Letter, ...]] = {}
    dq: deque = deque()
    for letter in ctx.letters:
        phi = tuple(evaluate_word(ctx, (letter,), s) for s in range(S.order))
        if phi not in found:
            found[phi] = (letter,)
            dq.append(phi)
    while dq:
        phi = dq.popleft()
        for letter in ctx.letters:
            psi = _extend(ctx, phi, letter)
            if psi not in found:
                found[psi] = found[phi] + (letter,)
                dq.append(psi)
    out = [WordFunction(phi, w) for phi, w in found.items()]
    if words == "with_constants":
        for u in range(S.order):
            c = (u,) * S.order
            if c not in found:
                out.append(WordFunction(c, (), const=u))
    out.sort(key=lambda w: (w.const is not None, len(w.word), w.induced))
    return out


def word_functions_by_enumeration(S: FiniteSemigroup, mode: str = "semigroup",
                                  words: str = "with_constants", adjoin_identity: bool = False,
                                  max_length: int = 12) -> set[tuple[int, ...]]:
    """Independent check: evaluate every literal word, length by length.

    Stops at the first length whose words add no new map.  That is enough: the
    maps of length L+1 are one-letter extensions of those of length L, so once
    a level is covered every later level is too.
    """
    ctx = _context(S, mode, adjoin_identity)
    seen: set[tuple[int, ...]] = set()
    for length in range(1, max_length + 1):
        level = set()
        for word in itertools.product(ctx.letters, repeat=length):
            level.add(tuple(evaluate_word(ctx, word, s) for s in range(S.order)))
        if level <= seen:
            break
        seen |= level
    else:
        raise RuntimeError(f"no stabilisation up to length {max_length}")
    if words == "with_constants":
        seen |= {(u,) * S.order for u in range(S.order)}
    return seen


@dataclass(frozen=True)
class ElementaryAlgebraicFamily:
    n: int
    sets: dict = field(default_factory=dict)    # bitmask -> (WordFunction, WordFunction)

    @property
    def masks(self) -> frozenset[int]:
        return frozenset(self.sets)

    def check(self) -> bool:
        return all(bits(s for s in range(self.n) if p.induced[s] == q.induced[s]) == m
                   for m, (p, q) in self.sets.items())


def elementary_sets_from_maps(maps: Iterable[tuple[int, ...]], n: int) -> frozenset[int]:
    maps = list(maps)
    return frozenset(bits(s for s in range(n) if p[s] == q[s]) for p in maps for q in maps)


def elementary_algebraic(S: FiniteSemigroup, mode: str = "semigroup",
                         words: str = "with_constants",
                         adjoin_identity: bool = False) -> ElementaryAlgebraicFamily:
    wfs = word_functions(S, mode, words, adjoin_identity)
    sets: dict = {}
    for p in wfs:
        for q in wfs:
            m = bits(s for s in range(S.order) if p.induced[s] == q.induced[s])
            if m not in sets:
                sets[m] = (p, q)
    return ElementaryAlgebraicFamily(S.order, sets)


def zariski_topology(S: FiniteSemigroup, mode: str = "semigroup", words: str = "with_constants",
                     adjoin_identity: bool = False) -> FiniteTopology:
    fam = elementary_algebraic(S, mode, words, adjoin_identity)
    full = (1 << S.order) - 1
    return generate_topology([full & ~m for m in fam.masks], S.order)


def max_chain_case_table(n: int, adjoin_identity: bool = False) -> dict:
    """Predicted V_{a,b} and W_{a,b} for ({0..n-1}, max), a, b ranging over S^1.

    An adjoined identity behaves as a new bottom element.
    """
    size = n + 1 if adjoin_identity else n
    rank = lambda a: -1 if a == n else a
    X = range(n)
    out = {}
    for a in range(size):
        for b in range(size):
            ra, rb = rank(a), rank(b)
            if ra == rb:
                V, W = set(X), {x for x in X if x <= ra}
            elif ra < rb:
                V, W = {x for x in X if x >= rb}, {rb}
            else:
                V, W = {x for x in X if x >= ra}, set()
            out[(a, b)] = (bits(V), bits(W))
    return out


# -- pointwise hypotheses on a window -------------------------------------------

@dataclass
class PointwiseReport:
    ok: bool
    checks: dict
    failures: list

    def to_json(self) -> dict:
        return {"verdict": "pass" if self.ok else "fail", "checks": self.checks,
                "failures": self.failures}


def _in_image(c: ComputableElement, x: int, window: int):
    if c.inv is not None:
        return c.inv(x) is not UNDEF
    if c.support is not None:
        return bool(c.support.preimages(x))
    for y in range(window):
        if c(y) == x:
            return True
    return Unknown(f"{c.name}: no preimage of {x} below {window}")


def _preimage(s: ComputableElement, y: int):
    if s.inv is not None and s.family in ("Injection", "Permutation", "PartialBijection"):
        z = s.inv(y)
        return [] if z is UNDEF else [z]
    if s.support is not None:
        return s.support.preimages(y)
    return Unknown(f"{s.name}: preimages not decidable")


def check_pointwise_hypotheses(x: int, a: ComputableElement, b: ComputableElement,
                               cs: Sequence[ComputableElement],
                               samples: Sequence[ComputableElement], window: int = 64,
                               monoid: str = "Inj") -> PointwiseReport:
    """Check the three conditions on ``window`` for the sampled elements ``samples``."""
    failures = []
    checks = {"i": True, "ii": True, "iii": True, "window": window, "monoid": monoid}
    for y in range(window):
        if (a(y) == b(y)) != (y != x):
            failures.append({"condition": "i", "y": y})
            checks["i"] = False
            break
    for i, c in enumerate(cs):
        r = _in_image(c, x, window)
        if isinstance(r, Unknown):
            failures.append({"condition": "ii", "c": i, "reason": r.reason})
            checks["ii"] = "unknown"
        elif not r:
            failures.append({"condition": "ii", "c": i})
            checks["ii"] = False
    for j, s in enumerate(samples):
        sx = s(x)
        for y in range(window):
            if y == sx:
                continue
            pre = _preimage(s, y)
            if isinstance(pre, Unknown):
                failures.append({"condition": "iii", "sample": j, "reason": pre.reason})
                checks["iii"] = "unknown"
                break
            good = False
            for c in cs:
                hit = False
                for z in pre:
                    r = _in_image(c, z, window)
                    if isinstance(r, Unknown) or r:
                        hit = True
                        break
                if not hit:
                    good = True
                    break
            if not good:
                failures.append({"condition": "iii", "sample": j, "y": y})
                checks["iii"] = False
                break
    ok = all(checks[k] is True for k in ("i", "ii", "iii"))
    return PointwiseReport(ok, checks, failures)

