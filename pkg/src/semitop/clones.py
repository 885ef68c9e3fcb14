"""Function clones: composition, projections, the star product, and Horn operations.

Coordinates are numbered from 1, as in I-sets.  Finite operations store their
table with x1 as the most significant digit.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence, Union

from .elements import ALEPH0, UNDEF, CardinalTag, Unknown, card, finitary, pair_tuple, shift_tail, \
    unpair_tuple, Tail, IDENTITY_TAIL

TABLE_CAP = 1 << 16


@dataclass(frozen=True)
class FiniteOperation:
    q: int
    arity: int
    table: tuple

    def __post_init__(self):
        if self.arity < 1:
            raise ValueError("nullary operations are not allowed")
        if self.q ** self.arity > TABLE_CAP:
            raise ValueError(f"table of size {self.q}^{self.arity} exceeds the cap")
        if len(self.table) != self.q ** self.arity:
            raise ValueError("table has the wrong length")
        if any(not 0 <= v < self.q for v in self.table):
            raise ValueError("table value out of range")

    def index(self, xs: Sequence[int]) -> int:
        i = 0
        for x in xs:
            i = i * self.q + x
        return i

    def __call__(self, xs: Sequence[int]) -> int:
        if len(xs) != self.arity:
            raise ValueError(f"expected {self.arity} arguments")
        return self.table[self.index(xs)]

    def points(self) -> Iterable[tuple]:
        return itertools.product(range(self.q), repeat=self.arity)

    def to_json(self) -> dict:
        return {"q": self.q, "arity": self.arity, "table": list(self.table)}

    @classmethod
    def from_json(cls, d: dict) -> "FiniteOperation":
        return cls(int(d["q"]), int(d["arity"]), tuple(int(v) for v in d["table"]))

    @classmethod
    def from_function(cls, q: int, arity: int, fn: Callable[[tuple], int]) -> "FiniteOperation":
        return cls(q, arity, tuple(fn(xs) for xs in itertools.product(range(q), repeat=arity)))


def projection(q: int, n: int, i: int) -> FiniteOperation:
    """pi^n_i, with 1 <= i <= n."""
    if not 1 <= i <= n:
        raise ValueError("projection index out of range")
    return FiniteOperation.from_function(q, n, lambda xs: xs[i - 1])


@dataclass(frozen=True)
class WindowOperation:
    """An n-ary operation on N known through its evaluator and optional metadata.

    ``I`` is the Horn I-set, ``coimage`` the size of N minus the image, and
    ``preimage`` sends z to some tuple mapped to z, or None.
    """

    arity: int
    fn: Callable[[tuple], int]
    I: Optional[frozenset] = None
    coimage: Optional[CardinalTag] = None
    injective: Optional[bool] = None
    preimage: Optional[Callable[[int], Optional[tuple]]] = None
    name: str = "op"

    def __post_init__(self):
        if self.arity < 1:
            raise ValueError("nullary operations are not allowed")
        if self.I is not None:
            I = frozenset(self.I)
            if not I or not I <= set(range(1, self.arity + 1)):
                raise ValueError(f"I-set {sorted(I)} is not a non-empty subset of 1..{self.arity}")
            object.__setattr__(self, "I", I)

    def __call__(self, xs: Sequence[int]) -> int:
        return self.fn(tuple(xs))


Operation = Union[FiniteOperation, WindowOperation]


def clone_compose(fs: Sequence[Operation], g: Operation) -> Operation:
    """(x)((f_1..f_m) o g) = ((x)f_1, ..., (x)f_m)g."""
    fs = list(fs)
    if len(fs) != g.arity:
        raise ValueError(f"g has arity {g.arity} but {len(fs)} inner operations were given")
    if not fs:
        raise ValueError("need at least one inner operation")
    n = fs[0].arity
    if any(f.arity != n for f in fs):
        raise ValueError("inner operations must share one arity")
    if all(isinstance(f, FiniteOperation) for f in fs) and isinstance(g, FiniteOperation):
        q = g.q
        if any(f.q != q for f in fs):
            raise ValueError("operations live on different sets")
        return FiniteOperation.from_function(q, n, lambda xs: g(tuple(f(xs) for f in fs)))
    return WindowOperation(n, lambda xs: g(tuple(f(xs) for f in fs)),
                           name=f"({','.join(getattr(f, 'name', 'f') for f in fs)})o{getattr(g, 'name', 'g')}")


def star(f: Operation, g: Operation) -> Operation:
    """(x)f*g = ((x)f, ..., (x)f)g; the arity is that of f."""
    if isinstance(f, FiniteOperation) and isinstance(g, FiniteOperation):
        return FiniteOperation.from_function(f.q, f.arity, lambda xs: g((f(xs),) * g.arity))
    return WindowOperation(f.arity, lambda xs: g((f(xs),) * g.arity),
                           name=f"{getattr(f, 'name', 'f')}*{getattr(g, 'name', 'g')}")


def clone_generate(gens: Iterable[FiniteOperation], arity_cap: int, q: int,
                   limit: int = 100_000) -> dict[int, set[FiniteOperation]]:
    """The least family containing gens and the projections of arity <= arity_cap,
    closed under o_{m,n} for m, n <= arity_cap.  Keyed by arity."""
    ops: dict[int, set[FiniteOperation]] = {n: {projection(q, n, i) for i in range(1, n + 1)}
                                            for n in range(1, arity_cap + 1)}
    for g in gens:
        if g.q != q:
            raise ValueError("generator on a different set")
        if g.arity > arity_cap:
            raise ValueError(f"generator arity {g.arity} exceeds arity_cap")
        ops[g.arity].add(g)
    changed = True
    while changed:
        changed = False
        for n in range(1, arity_cap + 1):
            inner = sorted(ops[n], key=lambda o: o.table)
            for m in range(1, arity_cap + 1):
                for g in sorted(ops[m], key=lambda o: o.table):
                    for fs in itertools.product(inner, repeat=m):
                        h = clone_compose(fs, g)
                        if h not in ops[n]:
                            ops[n].add(h)
                            changed = True
                            if sum(len(v) for v in ops.values()) > limit:
                                raise OverflowError(f"closure exceeds {limit} operations")
    return ops


# -- Horn operations --------------------------------------------------------------------

def horn_op(n: int, I: Iterable[int], h, name: Optional[str] = None) -> WindowOperation:
    """x -> (code of x restricted to I)h, for an injective unary h with an inverse.

    Such an operation is in the Horn clone with I-set I, and its co-image is that of h.
    """
    I = tuple(sorted(set(I)))
    if h.inv is None:
        raise ValueError("h needs an inverse evaluator")
    k = len(I)

    def fn(xs):
        return h(pair_tuple(tuple(xs[i - 1] for i in I)))

    def preimage(z):
        c = h.inv(z)
        if c is UNDEF:
            return None
        vals = dict(zip(I, unpair_tuple(c, k)))
        return tuple(vals.get(i, 0) for i in range(1, n + 1))

    return WindowOperation(n, fn, frozenset(I), h.coimage, len(I) == n, preimage,
                           name or f"h{list(I)}")


@dataclass(frozen=True)
class HornComposite:
    op: WindowOperation
    case: str


def _coim(op, what: str) -> CardinalTag:
    if op.coimage is None:
        raise ValueError(f"missing co-image of {what}")
    return op.coimage


def horn_compose(fs: Sequence[WindowOperation], g: WindowOperation) -> HornComposite:
    """Compose and propagate the I-set and co-image by the four-case analysis."""
    if g.I is None or any(f.I is None for f in fs):
        raise ValueError("every operation needs an I-set")
    comp = clone_compose(fs, g)
    Ig = sorted(g.I)
    I = frozenset().union(*(fs[i - 1].I for i in Ig))
    if len(Ig) == 1:
        case = "alpha"
        kappa = _coim(g, "g") + _coim(fs[Ig[0] - 1], f"f{Ig[0]}")
    elif any(fs[i - 1].I & fs[j - 1].I for i, j in itertools.combinations(Ig, 2)):
        case, kappa = "beta", ALEPH0
    else:
        known = [fs[i - 1].coimage for i in Ig]
        if any(c is not None and c != card(0) for c in known):
            case, kappa = "delta", ALEPH0
        elif any(c is None for c in known):
            raise ValueError("missing co-image of an essential inner operation")
        else:
            case, kappa = "gamma", _coim(g, "g")

    pre = None
    if g.preimage is not None and all(fs[i - 1].preimage is not None for i in Ig):
        n = fs[0].arity

        def pre(z):
            y = g.preimage(z)
            if y is None:
                return None
            want: dict[int, int] = {}
            for i in Ig:
                x = fs[i - 1].preimage(y[i - 1])
                if x is None:
                    return None
                for c in fs[i - 1].I:
                    if want.setdefault(c, x[c - 1]) != x[c - 1]:
                        return None
            xs = tuple(want.get(c, 0) for c in range(1, n + 1))
            return xs if comp(xs) == z else None

    op = WindowOperation(comp.arity, comp.fn, I, kappa, None, pre, comp.name)
    return HornComposite(op, case)


def detect_I(op: Operation, bound: int, cap: int = 1 << 14) -> Union[frozenset, Unknown]:
    """Least non-empty S with (x)op = (y)op iff x, y agree on S, over [0, bound)^n."""
    n = op.arity
    if bound ** n > cap:
        raise ValueError(f"grid {bound}^{n} exceeds the cap {cap}")
    pts = list(itertools.product(range(bound), repeat=n))
    vals = {p: op(p) for p in pts}
    for size in range(1, n + 1):
        for S in itertools.combinations(range(1, n + 1), size):
            seen: dict = {}
            back: dict = {}
            ok = True
            for p in pts:
                key = tuple(p[i - 1] for i in S)
                v = vals[p]
                if seen.setdefault(key, v) != v or back.setdefault(v, key) != key:
                    ok = False
                    break
            if ok:
                return frozenset(S)
    return Unknown(f"no coordinate set explains {getattr(op, 'name', 'op')} below {bound}")


def detect_coimage(op: WindowOperation, window: int = 64, factor: int = 4) -> Union[CardinalTag, Unknown]:
    """Count non-image points below W and factor*W by exact inversion; growth means infinite."""
    if op.preimage is None:
        return Unknown("no preimage evaluator")
    low = sum(op.preimage(z) is None for z in range(window))
    high = sum(op.preimage(z) is None for z in range(factor * window))
    return card(low) if low == high else ALEPH0


# -- the sets W_{S,n} and P_{T,y,n} ----------------------------------------------------

def in_W(op: Operation, S: Iterable[int], n: int) -> bool:
    """I_op = S, read off the pairs x_i, y_i that differ only in coordinate i."""
    if op.arity != n:
        return False
    S = set(S)
    zero = (0,) * n
    for i in range(1, n + 1):
        e = tuple(1 if c == i else 0 for c in range(1, n + 1))
        if (op(zero) != op(e)) != (i in S):
            return False
    return True


def in_P(op: WindowOperation, T: Optional[Sequence[Optional[int]]], y: int, n: int) -> bool | Unknown:
    """(y)op^-1 = T, where T is None (empty) or a product: an int fixes a coordinate, None frees it."""
    if op.arity != n:
        return False
    if T is None:
        if op.preimage is None:
            return Unknown("image membership not decidable")
        return op.preimage(y) is None
    x = tuple(0 if t is None else t for t in T)
    S = [i + 1 for i, t in enumerate(T) if t is not None]
    return op(x) == y and in_W(op, S, n)


# -- random structured instances -------------------------------------------------------

def _unary(rng: random.Random, kind: str):
    m = rng.randint(3, 8)
    if kind == "perm":
        vals = list(range(m))
        rng.shuffle(vals)
        return finitary(vals, IDENTITY_TAIL)
    if kind == "finite":
        k = rng.randint(1, 3)
        pool = list(range(m + k))
        rng.shuffle(pool)
        return finitary(pool[:m], shift_tail(k))
    c = rng.randint(0, 1)
    pool = [v for v in range(2 * m + 2) if not (v >= 2 * m + c and (v - c) % 2 == 0)]
    rng.shuffle(pool)
    return finitary(pool[:m], Tail("affine", 2, c))


def random_horn(rng: random.Random, n: int, I: Iterable[int], kind: Optional[str] = None) -> WindowOperation:
    kind = kind or rng.choice(["perm", "finite", "infinite"])
    h = _unary(rng, kind)
    return horn_op(n, I, h, f"h{sorted(set(I))}:{kind}")


def _subset(rng, n, size=None):
    size = size or rng.randint(1, n)
    return frozenset(rng.sample(range(1, n + 1), size))


def random_case_instance(rng: random.Random, case: str) -> tuple[list, WindowOperation]:
    """Inner operations fs and outer g whose composite falls under ``case``."""
    n = rng.randint(2, 3)
    if case == "alpha":
        m = rng.randint(1, 3)
        Ig = _subset(rng, m, 1)
        fs = [random_horn(rng, n, _subset(rng, n)) for _ in range(m)]
        return fs, random_horn(rng, m, Ig, rng.choice(["perm", "finite"]))
    m = rng.randint(2, 3)
    Ig = _subset(rng, m, rng.randint(2, m))
    order = sorted(Ig)
    if case == "beta":
        shared = rng.randint(1, n)
        sets = {i: _subset(rng, n) | {shared} for i in order}
    else:
        coords = list(range(1, n + 1))
        rng.shuffle(coords)
        if len(order) > n:
            order = order[:n]
            Ig = frozenset(order)
        sets = {}
        for idx, i in enumerate(order):
            sets[i] = frozenset([coords[idx]])
        for c in coords[len(order):]:
            i = rng.choice(order)
            sets[i] = sets[i] | {c}
    fs = []
    for i in range(1, m + 1):
        I = sets.get(i, _subset(rng, n))
        if case == "gamma" and i in Ig:
            kind = "perm"
        elif case == "delta" and i == order[0]:
            kind = rng.choice(["finite", "infinite"])
        else:
            kind = None
        fs.append(random_horn(rng, n, I, kind))
    return fs, random_horn(rng, m, Ig, rng.choice(["perm", "finite"]))


@dataclass
class HornCheck:
    case: str
    ok: bool
    declared: dict
    detected: dict

    def to_json(self) -> dict:
        return {"case": self.case, "verdict": "pass" if self.ok else "fail",
                "declared": self.declared, "detected": self.detected}


def check_horn_instance(fs, g, bound: int = 5, window: int = 64) -> HornCheck:
    res = horn_compose(fs, g)
    I = detect_I(res.op, bound)
    k = detect_coimage(res.op, window)
    declared = {"I": sorted(res.op.I), "coimage": str(res.op.coimage)}
    detected = {"I": sorted(I) if isinstance(I, frozenset) else I.reason, "coimage": str(k)}
    return HornCheck(res.case, declared == detected, declared, detected)
