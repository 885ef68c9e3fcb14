from __future__ import annotations

import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from semitop import cantor
from semitop.cantor import (IDENTITY, ZERO, DyadicInterval, ModulusError, check_tree, const, cylinder,
                            diagonal_tree, dinf_estimate, finite, fixed_bits, flip, graph_tree, image_tree,
                            interleave, mill_extend, padded, parse_map, pm_compose, random_map, retract,
                            verify_mill, verify_witness, whole, xor_mask, cantor_propx_witness)


def _inputs(m, rng, limit=1 << 12):
    if 2 ** m <= limit:
        return itertools.product((0, 1), repeat=m)
    return (tuple(rng.randrange(2) for _ in range(m)) for _ in range(512))


def test_identity_composition():
    rng = random.Random(0)
    for _ in range(10):
        f = random_map(rng)
        g = pm_compose(IDENTITY, f)
        m = f.modulus(10)
        for w in _inputs(m, rng):
            assert g.ev(w, 10) == f.ev(w, 10)


def test_pair_codec():
    codec = interleave()
    assert codec.split((1, 0, 1, 0, 1, 0)) == ((1, 1, 1), (0, 0, 0))
    for w in itertools.product((0, 1), repeat=12):
        assert codec.merge(*codec.split(w)) == w


@settings(max_examples=25)
@given(st.integers(0, 10_000))
def test_modulus_is_honest_and_refines(seed):
    """k output bits from m(k) input bits never read further, and agree with longer inputs."""
    rng = random.Random(seed)
    f = random_map(rng)
    for k in range(1, 11):
        m = f.modulus(k)
        for w in _inputs(m, rng, 1 << 10):
            short = f.ev(w, k)
            longer = f.ev(w + (1, 0, 1), k)
            assert short == longer
            assert f.ev(w, k)[:k - 1] == f.ev(w, k - 1) if k > 1 else True


def test_finite_streams_refuse_overreads():
    with pytest.raises(ModulusError):
        finite((0, 1))[2]
    with pytest.raises(ValueError):
        flip(0).ev((0,), 3)


def test_dsl():
    f = parse_map("compose(flip(0), shift(2), xor(11))")
    x = padded((0, 1, 1, 0, 1))
    assert f(x).prefix(4) == (0, 1, 1, 0)
    assert parse_map("interleave")(padded((1, 0))).prefix(4) == (1, 1, 0, 0)
    with pytest.raises(ValueError):
        parse_map("bogus(1)")


def test_retract_examples():
    w = padded((0, 1, 0, 1, 1))
    assert retract(whole())(w).prefix(6) == w.prefix(6)
    assert retract(cylinder([1]))(w).prefix(6) == (1, 0, 0, 0, 0, 0)
    with pytest.raises(ValueError):
        retract(cantor.ClosedTree(lambda w: False))


@settings(max_examples=30)
@given(st.integers(0, 10_000))
def test_retract_fixes_and_lands_in_f(seed):
    rng = random.Random(seed)
    F = fixed_bits({i: rng.randrange(2) for i in rng.sample(range(8), 3)}) if rng.random() < 0.5 \
        else cylinder([rng.randrange(2) for _ in range(3)])
    g = retract(F)
    for _ in range(20):
        x = cantor.random_point(rng, 24)
        out = g(x).prefix(16)
        assert out in F
        inside = g(x)                      # a point of F
        assert g(inside).prefix(16) == out


def test_closed_trees_are_pruned():
    for F in (whole(), cylinder([0, 1]), fixed_bits({1: 1, 4: 0}), diagonal_tree(),
              graph_tree(flip(0)), image_tree(cylinder([0]), xor_mask([1]))):
        assert check_tree(F, 8)


def test_dinf_examples():
    assert dinf_estimate(IDENTITY, IDENTITY, 16) == DyadicInterval(Fraction(0), Fraction(1, 2 ** 16))
    d = dinf_estimate(IDENTITY, flip(0), 16)
    assert d.lower == Fraction(1, 2) and d.upper == Fraction(1, 2) + Fraction(1, 2 ** 16)
    rng = random.Random(2)
    for _ in range(5):
        f, g = random_map(rng, 2), random_map(rng, 2)
        try:
            assert dinf_estimate(f, g, 8) == dinf_estimate(g, f, 8)
        except ValueError:
            pass                              # modulus above the cap


def test_dyadic_intervals():
    with pytest.raises(ValueError):
        DyadicInterval(Fraction(1, 3), Fraction(1, 2))
    with pytest.raises(ValueError):
        DyadicInterval(Fraction(1, 2), Fraction(1, 4))
    assert DyadicInterval(Fraction(1, 4), Fraction(3, 4)).to_json() == {"lower": "1/2^2", "upper": "3/2^2"}


def test_mill_identity_extension():
    A = cylinder([0, 1])
    ext = mill_extend(A, A, IDENTITY, IDENTITY, Fraction(1, 8))
    rng = random.Random(0)
    g = retract(A)
    for _ in range(50):
        a = g(cantor.random_point(rng, 32))
        out = ext.forward(a, ZERO)
        assert out[0].prefix(16) == a.prefix(16) and out[1].prefix(16) == (0,) * 16


def test_mill_disjoint_cylinders():
    A, B = cylinder([0, 0]), cylinder([1, 1])
    phi = xor_mask([1, 1])
    eps = Fraction(7, 8)
    ext = mill_extend(A, B, phi, phi, eps, depth=16)
    rep = verify_mill(ext, A, phi, depth=16, samples=100)
    assert rep.ok, rep.failure
    assert rep.rho.upper < eps and rep.rho.lower <= rep.rho.upper


def test_mill_rejects_small_eps():
    with pytest.raises(ValueError):
        mill_extend(cylinder([0]), cylinder([1]), flip(0), flip(0), Fraction(1, 4))


@pytest.mark.parametrize("text", ["id", "const()", "flip(0)", "compose(flip(2),shift(1))", "interleave",
                                  "evens", "or(1)"])
def test_witness_identity(text):
    s = parse_map(text)
    w = cantor_propx_witness(s, depth=12)
    rep = verify_witness(s, w, depth=12)
    assert rep.ok, rep.failure


def test_random_mill_instances_and_maps():
    rng = random.Random(4)
    for i in range(3):
        A, B, phi, phi_inv, eps = cantor.random_mill_instance(rng)
        ext = mill_extend(A, B, phi, phi_inv, eps)
        assert verify_mill(ext, A, phi, samples=30, seed=i).ok
