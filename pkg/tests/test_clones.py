from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from semitop.clones import (FiniteOperation, WindowOperation, check_horn_instance, clone_compose,
                            clone_generate, detect_coimage, detect_I, horn_compose, horn_op, in_P, in_W,
                            projection, random_case_instance, random_horn, star)
from semitop.elements import ALEPH0, IDENTITY_TAIL, Unknown, card, finitary, pair, shift_tail


def finite_ops(q, n):
    return st.lists(st.integers(0, q - 1), min_size=q ** n, max_size=q ** n).map(
        lambda t: FiniteOperation(q, n, tuple(t)))


NAND = FiniteOperation.from_function(2, 2, lambda xs: 1 - (xs[0] & xs[1]))


def test_table_layout_and_json():
    f = FiniteOperation.from_function(3, 2, lambda xs: xs[0])
    assert f.table == (0, 0, 0, 1, 1, 1, 2, 2, 2)
    assert FiniteOperation.from_json(f.to_json()) == f
    with pytest.raises(ValueError):
        FiniteOperation(2, 2, (0, 1, 2, 0))
    with pytest.raises(ValueError):
        projection(2, 2, 3)


@settings(max_examples=40)
@given(finite_ops(3, 2))
def test_projections_are_units(f):
    assert clone_compose([projection(3, 2, 1), projection(3, 2, 2)], f) == f
    for i in (1, 2):
        assert clone_compose([f, projection(3, 2, 1)], projection(3, 2, i)) == (f if i == 1 else projection(3, 2, 1))


@settings(max_examples=40)
@given(finite_ops(2, 2), finite_ops(2, 2), finite_ops(2, 2), finite_ops(2, 2), finite_ops(2, 2))
def test_composition_is_associative(a, b, c, d, g):
    inner = [a, b]
    mid = [c, d]
    left = clone_compose([clone_compose(inner, c), clone_compose(inner, d)], g)
    right = clone_compose(inner, clone_compose(mid, g))
    assert left == right


@settings(max_examples=40)
@given(finite_ops(3, 2), finite_ops(3, 2))
def test_star_is_diagonal_composition(f, g):
    assert star(f, g) == clone_compose([f, f], g)


def test_nand_generates_everything_binary():
    ops = clone_generate([NAND], 2, 2)
    assert len(ops[2]) == 16 and len(ops[1]) == 4


def test_generated_family_is_closed():
    ops = clone_generate([FiniteOperation.from_function(3, 2, lambda xs: max(xs))], 2, 3)
    for n in (1, 2):
        assert all(projection(3, n, i) in ops[n] for i in range(1, n + 1))
        for m in (1, 2):
            for g in ops[m]:
                for fs in itertools.product(ops[n], repeat=m):
                    assert clone_compose(fs, g) in ops[n]


def test_generation_limit():
    with pytest.raises(OverflowError):
        clone_generate([NAND], 2, 2, limit=10)


def test_window_operation_validation():
    with pytest.raises(ValueError):
        WindowOperation(2, lambda xs: 0, I={3})
    with pytest.raises(ValueError):
        WindowOperation(0, lambda xs: 0)


def test_pairing_has_full_I_set():
    pairing = WindowOperation(2, lambda xs: pair(*xs))
    assert detect_I(pairing, 5) == frozenset({1, 2})
    first = WindowOperation(3, lambda xs: xs[0])
    assert detect_I(first, 4) == frozenset({1})
    assert isinstance(detect_I(WindowOperation(2, lambda xs: 0), 3), Unknown)


def test_horn_op_metadata():
    h = finitary([0, 1, 2], shift_tail(2))
    op = horn_op(3, [1, 3], h)
    assert op.I == frozenset({1, 3}) and op.coimage == card(2)
    assert detect_I(op, 4) == op.I
    assert detect_coimage(op) == card(2)
    assert in_W(op, [1, 3], 3) and not in_W(op, [1], 3)
    z = op((2, 5, 1))
    assert in_P(op, (2, None, 1), z, 3) is True
    gap = next(y for y in range(64) if op.preimage(y) is None)
    assert in_P(op, None, gap, 3) is True


@pytest.mark.parametrize("case", ["alpha", "beta", "gamma", "delta"])
def test_horn_cases(case):
    rng = random.Random(hash(case) & 0xffff)
    for _ in range(20):
        fs, g = random_case_instance(rng, case)
        chk = check_horn_instance(fs, g)
        assert chk.case == case
        assert chk.ok, chk.to_json()


@settings(max_examples=30)
@given(st.integers(0, 10 ** 6))
def test_composite_preimage_is_exact(seed):
    rng = random.Random(seed)
    fs, g = random_case_instance(rng, rng.choice(["alpha", "beta", "gamma", "delta"]))
    res = horn_compose(fs, g)
    for z in range(64):
        x = res.op.preimage(z)
        if x is not None:
            assert res.op(x) == z


def test_gamma_keeps_outer_coimage():
    p = finitary([1, 0], IDENTITY_TAIL)
    fs = [horn_op(2, [1], p), horn_op(2, [2], p)]
    g = horn_op(2, [1, 2], finitary([0], shift_tail(3)))
    res = horn_compose(fs, g)
    assert res.case == "gamma" and res.op.coimage == card(3)
    fs[1] = horn_op(2, [2], finitary([0], shift_tail(1)))
    assert horn_compose(fs, g).op.coimage == ALEPH0


def test_random_horn_declares_I():
    rng = random.Random(1)
    op = random_horn(rng, 3, [2])
    assert detect_I(op, 5) == frozenset({2})
