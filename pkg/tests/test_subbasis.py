from __future__ import annotations

import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from semitop.elements import ALEPH0, UNDEF, CardinalTag, ParseError, finitary, partial_bijection_element, \
    shift_tail, IDENTITY_TAIL, UNDEFINED_TAIL, compose
from semitop.sampling import injection, partial_bijection_with_tail
from semitop.subbasis import (EMPTY, METRICS, NamedSet, antichain_relation, ball_to_basic, make_rset, member,
                              metric, normalize_I4, parse_named_set, separation_witness, subbasis,
                              v_as_i2_union, winv_witness, zariski_witness)

F01 = partial_bijection_element([(0, 1)])
EMPTY_MAP = partial_bijection_element([])
F00 = partial_bijection_element([(0, 0)])


def test_membership_examples():
    assert member(F01, parse_named_set("U(0,1)")) is True
    assert member(F01, parse_named_set("W(0)")) is False
    assert member(F01, parse_named_set("W(5)")) is True
    assert member(F01, parse_named_set("F(inf)")) is True
    assert member(F01, parse_named_set("Winv(1)")) is False
    assert member(F01, parse_named_set("V(0,1)")) is False


def test_named_set_syntax():
    for text in ["U(0,1)", "W(2)", "Winv(3)", "V(0,1)", "VYZ({0,1},cof{2})", "F(inf)", "UF(3,0)", "Sym"]:
        assert str(parse_named_set(text)).replace(" ", "") == text
    with pytest.raises(ParseError):
        parse_named_set("Q(1)")
    with pytest.raises(ParseError):
        parse_named_set("U(1)")


def test_cofinite_and_fiber_sets():
    shift = finitary([], shift_tail(1))
    assert member(shift, parse_named_set("F(1)")) is True
    assert member(shift, parse_named_set("UF(0,0)")) is True
    assert member(shift, parse_named_set("UF(1,5)")) is True
    assert member(finitary([1, 0]), NamedSet("Sym")) is True
    assert member(shift, NamedSet("Sym")) is False
    assert member(F01, parse_named_set("VYZ({0},{1,2})")) is True
    assert member(F01, parse_named_set("VYZ({0},cof{1})")) is False


def test_normalize_examples():
    assert str(normalize_I4(["U(0,1)", "W(2)", "Winv(3)"])) == "R({(0,1)}, {2}, {3})"
    assert normalize_I4(["U(0,1)", "W(0)"]) == EMPTY
    assert normalize_I4(["U(0,1)", "U(0,2)"]) == EMPTY
    assert normalize_I4(["U(0,1)", "U(2,1)"]) == EMPTY
    assert normalize_I4(["U(0,1)", "Winv(1)"]) == EMPTY
    with pytest.raises(ValueError):
        normalize_I4(["V(0,1)"])


@given(st.randoms(use_true_random=False), st.lists(st.tuples(st.sampled_from(["U", "W", "Winv"]),
                                                            st.integers(0, 6), st.integers(0, 6)), max_size=4))
def test_normalize_preserves_membership(rnd, entries):
    e = partial_bijection_with_tail(rnd, rnd.randint(1, 6))
    sets = [NamedSet(k, (x, y)) if k == "U" else NamedSet(k, (x,)) for k, x, y in entries]
    assert normalize_I4(sets).member(e) == all(member(e, s) for s in sets)


def test_metric_examples():
    assert metric("d4", F01, F01) == 0
    assert metric("d_I1", EMPTY_MAP, F00) == Fraction(1, 2)
    assert metric("d1", EMPTY_MAP, F00) == Fraction(1)
    assert metric("d2", EMPTY_MAP, F00) == Fraction(1)
    assert metric("d1", finitary([0, 1, 5], UNDEFINED_TAIL), finitary([0, 1, 6], UNDEFINED_TAIL)) == Fraction(1, 3)


def test_metric_of_injections_with_different_coimages():
    assert metric("d_inj", finitary([], shift_tail(1)), finitary([], IDENTITY_TAIL)) == 1


def _gen(mid, rnd):
    return injection(rnd, rnd.randint(1, 5)) if mid == "d_inj" else partial_bijection_with_tail(rnd, rnd.randint(1, 5))


@pytest.mark.parametrize("mid", METRICS)
@given(rnd=st.randoms(use_true_random=False))
def test_metric_axioms(mid, rnd):
    f, g, h = (_gen(mid, rnd) for _ in range(3))
    d = lambda a, b: metric(mid, a, b)
    assert d(f, f) == 0
    assert d(f, g) == d(g, f)
    assert d(f, h) <= d(f, g) + d(g, h)
    assert isinstance(d(f, g), Fraction)
    same = f.support.tail == g.support.tail and all(f(x) == g(x) for x in range(12))
    assert (d(f, g) == 0) == same


@given(st.randoms(use_true_random=False))
def test_d4_is_the_max(rnd):
    f, g = partial_bijection_with_tail(rnd, 5), partial_bijection_with_tail(rnd, 5)
    assert metric("d4", f, g) == max(metric("d1", f, g), metric("d2", f, g))


def test_ball_examples():
    assert str(ball_to_basic(F00, 2)) == "R({(0,0)}, {1}, {1})"
    assert str(ball_to_basic(F00, 0)) == "R({}, {}, {})"


@given(st.randoms(use_true_random=False), st.integers(0, 8))
def test_ball_predicate(rnd, m):
    f = partial_bijection_with_tail(rnd, rnd.randint(1, 6))
    if rnd.random() < 0.5:
        g = partial_bijection_with_tail(rnd, rnd.randint(1, 6))
    else:
        r = rnd.randint(0, 6)
        tail = list(range(r, r + 3))
        rnd.shuffle(tail)
        g = compose(f, finitary(list(range(r)) + tail))
    assert ball_to_basic(f, m).member(g) == (metric("d4", f, g) <= Fraction(1, m + 1))


def test_make_rset_contradictions():
    assert make_rset([(0, 1)], Y=[0]) == EMPTY
    assert make_rset([(0, 1), (2, 1)]) == EMPTY


# -- V(x,y) as a union of I2 sets ---------------------------------------------------------------

@given(st.randoms(use_true_random=False), st.integers(0, 4), st.integers(0, 4))
def test_v_is_a_union_of_i2_sets(rnd, x, y):
    e = partial_bijection_with_tail(rnd, rnd.randint(1, 6))
    in_v = member(e, NamedSet("V", (x, y)))
    by_domain = e(x) is UNDEF or any(e(x) == z for z in range(64) if z != y)
    by_image = e(x) is UNDEF or any(e(z) == y for z in range(64) if z != x) or \
        member(e, NamedSet("Winv", (y,)))
    assert in_v == by_domain == by_image


def test_v_as_i2_union_first_form_matches_and_literal_form_fails():
    """The union over U_{z,y} with W_x misses h = {(x, w)}, w != y."""
    x, y, w = 0, 1, 2
    h = partial_bijection_element([(x, w)])
    assert member(h, NamedSet("V", (x, y)))
    first, second = v_as_i2_union(x, y, h, 64)
    assert first and not second


# -- separation witnesses ----------------------------------------------------------------------

def test_winv_witness_example():
    w = winv_witness(0, {1, 2})
    assert w(3) == 0 and all(w(x) is UNDEF for x in range(3))
    b = separation_witness("Winv_not_in_I2", x=0, bound=4)
    assert b.ok


def test_zariski_witness_example():
    w = zariski_witness(0, [(5, 5)])
    assert (w(0), w(1)) == (1, 0)
    assert separation_witness("ZariskiSet_not_I1", x=0, bound=4).ok


def test_antichain():
    b = separation_witness("B2_antichain", m=6)
    assert b.ok and len(b.checks) == 36
    assert member(antichain_relation(2), NamedSet("Winv", (2,))) is True


def test_max_chain_witness():
    assert separation_witness("MaxChain_FM_vs_HM", x=3, bound=3).ok


def test_subbasis_streams():
    first = list(itertools.islice(subbasis("I4"), 12))
    assert {s.kind for s in first} == {"U", "W", "Winv"}
    assert NamedSet("Sym") in list(itertools.islice(subbasis("S1"), 5))
    with pytest.raises(ValueError):
        next(subbasis("nope"))
