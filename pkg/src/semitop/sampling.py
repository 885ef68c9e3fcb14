"""Seeded generators of finitary elements for tests, suites and the CLI."""
from __future__ import annotations

import random
from typing import Optional

from .elements import (ComputableElement, FiniteBinaryRelation, Bipartition, FinitePartialBijection,
                       Tail, UNDEFINED_TAIL, IDENTITY_TAIL, finitary, shift_tail)


def partial_bijection(rng: random.Random, m: int, span: Optional[int] = None,
                      density: float = 0.6) -> ComputableElement:
    """Finite partial bijection of N: undefined from m on, values below ``span``."""
    span = m if span is None else span
    table: list = [None] * m
    free = list(range(span))
    rng.shuffle(free)
    for x in range(m):
        if free and rng.random() < density:
            table[x] = free.pop()
    return finitary(table, UNDEFINED_TAIL, "PartialBijection")


def partial_bijection_with_tail(rng: random.Random, m: int) -> ComputableElement:
    """Partial bijection with an undefined, identity or shift tail."""
    kind = rng.choice(["undefined", "identity", "shift"])
    if kind == "undefined":
        return partial_bijection(rng, m, m + rng.randint(0, 3))
    k = 0 if kind == "identity" else rng.randint(1, 3)
    vals = list(range(m + k))
    rng.shuffle(vals)
    table = [vals[x] if rng.random() < 0.7 else None for x in range(m)]
    return finitary(table, shift_tail(k))


def injection(rng: random.Random, m: int, infinite: Optional[bool] = None) -> ComputableElement:
    """Total injection: a shuffled table, then x -> x+k (finite co-image) or x -> 2x+c."""
    if infinite is None:
        infinite = rng.random() < 0.25
    if infinite:
        c = rng.randint(0, 1)
        tail = Tail("affine", 2, c)
        # the tail hits 2x+c for x >= m; keep table values off that set
        pool = [v for v in range(2 * m + 2) if not (v >= 2 * m + c and (v - c) % 2 == 0)]
    else:
        k = rng.randint(0, 3)
        tail = shift_tail(k)
        pool = list(range(m + k))
    rng.shuffle(pool)
    return finitary(pool[:m], tail)


def surjection(rng: random.Random, m: int) -> ComputableElement:
    """Total surjection whose table covers everything below the tail threshold."""
    if rng.random() < 0.5:
        k = rng.randint(0, min(3, m))
        tail = shift_tail(-k)
    else:
        a = rng.randint(2, 3)
        c = rng.randint(0, a - 1)
        tail = Tail("div", a, 0, c)
    thr = tail.image_threshold(m)
    need = list(range(thr))
    table = need + [rng.randrange(thr + 3) for _ in range(m - thr)]
    rng.shuffle(table)
    return finitary(table, tail, "Surjection")


def transformation(rng: random.Random, m: int) -> ComputableElement:
    table = [rng.randrange(m + 2) for _ in range(m)]
    return finitary(table, IDENTITY_TAIL, "Transformation")


def finite_relation(rng: random.Random, n: int, density: float = 0.3) -> FiniteBinaryRelation:
    return FiniteBinaryRelation(n, frozenset((a, b) for a in range(n) for b in range(n)
                                             if rng.random() < density))


def finite_partial_bijection(rng: random.Random, n: int) -> FinitePartialBijection:
    dom = rng.sample(range(n), rng.randint(0, n))
    img = rng.sample(range(n), len(dom))
    return FinitePartialBijection(n, frozenset(zip(dom, img)))


def bipartition(rng: random.Random, n: int) -> Bipartition:
    pts = [(x, r) for r in (0, 1) for x in range(n)]
    rng.shuffle(pts)
    blocks: list[list] = []
    for p in pts:
        if blocks and rng.random() < 0.5:
            rng.choice(blocks).append(p)
        else:
            blocks.append([p])
    return Bipartition(n, frozenset(frozenset(b) for b in blocks))
