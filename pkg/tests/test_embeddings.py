from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given, strategies as st

from semitop.elements import FinitePartialMap, FiniteTransformation
from semitop.embeddings import (RightCongruence, enumerate_right_congruences, identity_congruence,
                                inverse_submonoid, is_right_congruence, is_vagner_preston, luke1_embed,
                                natural_embed, natural_unembed, right_congruences_by_joins,
                                right_regular_representation, surjection_sigma, universal_congruence,
                                vp_congruences_from_action, vp_embed)
from semitop.fintop import max_chain, semigroup_library, symmetric_inverse_monoid, transformation_semigroup

I1, I1_ELEMS = symmetric_inverse_monoid(1)
I2, I2_ELEMS = symmetric_inverse_monoid(2)
I3, I3_ELEMS = symmetric_inverse_monoid(3)


def test_trivial_right_congruences():
    S = max_chain(3)
    assert is_right_congruence(S, identity_congruence(S))[0]
    assert is_right_congruence(S, universal_congruence(S))[0]


def test_t2_constants_partition():
    T2 = transformation_semigroup([(0, 1), (1, 0), (0, 0), (1, 1)], "T2")
    # brute-force the verdict from the definition
    elems = [(0, 1), (1, 0), (0, 0), (1, 1)]
    lab = tuple(int(len(set(e)) == 1) for e in elems)
    rho = RightCongruence(lab)
    expected = all(lab[_mul(T2, a, c)] == lab[_mul(T2, b, c)]
                   for a in range(4) for b in range(4) if lab[a] == lab[b] for c in range(4))
    assert is_right_congruence(T2, rho)[0] == expected


def _mul(S, a, b):
    return S.table[a][b]


def test_enumeration_counts():
    assert len(list(enumerate_right_congruences(max_chain(1)))) == 1
    chain = list(enumerate_right_congruences(max_chain(2)))
    assert {r.labels for r in chain} == {(0, 1), (0, 0)}
    assert set(enumerate_right_congruences(I1)) == right_congruences_by_joins(I1)


@pytest.mark.parametrize("S", semigroup_library()[:40], ids=lambda s: s.name or str(s.table))
def test_enumeration_matches_join_closure(S):
    assert set(enumerate_right_congruences(S)) == right_congruences_by_joins(S)


def test_vagner_preston_examples():
    ok, cert = is_vagner_preston(I1, identity_congruence(I1))
    assert ok
    empty = next(i for i, e in enumerate(I1_ELEMS) if not e)
    ident = next(i for i, e in enumerate(I1_ELEMS) if e)
    assert "a" in cert.branches[ident] and "b" in cert.branches[empty]
    assert is_vagner_preston(I1, universal_congruence(I1))[0]
    bad = [r for r in enumerate_right_congruences(I2) if not is_vagner_preston(I2, r)[0]]
    assert bad
    ok, cert = is_vagner_preston(I2, bad[0])
    assert not ok and cert.violation is not None


def test_luke1_identity_congruence_is_right_regular():
    for M in [S for S in semigroup_library() if S.identity is not None][:10]:
        rep = luke1_embed(M, [identity_congruence(M)])
        assert [im.images for im in rep.images] == [im.images for im in right_regular_representation(M)]
        assert rep.ok


def test_luke1_two_chain():
    S = max_chain(2)
    rep = luke1_embed(S, list(enumerate_right_congruences(S)))
    assert rep.homomorphism and rep.injective
    assert len(rep.points) == 3           # 0 is already an identity; lands in T_3


def test_luke1_universal_is_not_injective():
    S = max_chain(3)
    rep = luke1_embed(S, [universal_congruence(S)])
    assert not rep.injective and rep.checks["injective_iff_separating"]


def test_natural_embedding():
    assert natural_embed(FinitePartialMap((None, 1))).images == (2, 1, 2)
    assert natural_embed(FinitePartialMap((0, 1))).images == (0, 1, 2)


@given(st.lists(st.one_of(st.none(), st.integers(0, 4)), min_size=5, max_size=5))
def test_natural_round_trip(vals):
    f = FinitePartialMap(tuple(vals))
    assert natural_unembed(natural_embed(f)) == f


def test_vp_round_trip_small():
    for S, elems, n in ((I1, I1_ELEMS, 1), (I2, I2_ELEMS, 2), (I3, I3_ELEMS, 3)):
        rhos = vp_congruences_from_action(S, elems, n)
        rep = vp_embed(S, rhos)
        assert rep.homomorphism and rep.injective and rep.checks["preserves_inversion"]


def test_vp_i1_identity_lands_in_i2():
    rep = vp_embed(I1, [identity_congruence(I1)])
    assert rep.ok and len(rep.points) == 2


def test_vp_universal_is_flagged():
    rep = vp_embed(I2, [universal_congruence(I2)])
    assert not rep.injective and not rep.checks["separating"]


def test_vp_rhos_on_i1_and_trivial():
    rho = vp_congruences_from_action(I1, I1_ELEMS, 1)[0]
    assert sorted(map(len, rho.classes())) == [1, 1]
    S, elems = inverse_submonoid([], 2)
    assert S.order == 1
    assert all(r.n_classes == 1 for r in vp_congruences_from_action(S, elems, 2))


@given(st.randoms(use_true_random=False))
def test_vp_round_trip_random_submonoids(rnd):
    gens = []
    for _ in range(rnd.randint(1, 3)):
        dom = rnd.sample(range(3), rnd.randint(0, 3))
        gens.append(dict(zip(dom, rnd.sample(range(3), len(dom)))))
    S, elems = inverse_submonoid(gens, 3)
    rhos = vp_congruences_from_action(S, elems, 3)
    rep = vp_embed(S, rhos)
    assert rep.homomorphism and rep.injective and rep.checks["preserves_inversion"]


def test_vp_selector_is_a_translate_of_a_class_union():
    """{f : a ~ a f f^-1} is {f : af in U} with U = {f : f f^-1 ~ 1} a union of classes."""
    e, inv, t = I2.identity, I2.inverse, I2.table
    for rho in vp_congruences_from_action(I2, I2_ELEMS, 2):
        U = {f for f in range(I2.order) if rho.same(t[f][inv[f]], e)}
        for cl in rho.classes():
            assert set(cl) <= U or not set(cl) & U
        for a in range(I2.order):
            if rho.same(t[a][inv[a]], e):
                sel = {f for f in range(I2.order) if rho.same(a, t[a][t[f][inv[f]]])}
                assert sel == {f for f in range(I2.order) if t[a][f] in U}


def test_vp_selector_itself_need_not_be_a_class_union():
    rho = vp_congruences_from_action(I2, I2_ELEMS, 2)[0]
    e, inv, t = I2.identity, I2.inverse, I2.table
    a = I2_ELEMS.index({0: 1})
    sel = {f for f in range(I2.order) if rho.same(a, t[a][t[f][inv[f]]])}
    empty = I2_ELEMS.index({})
    cls = next(c for c in rho.classes() if empty in c)
    assert sel & set(cls) and not set(cls) <= sel


def test_surjection_sigma():
    for n in (2, 3):
        S, sigma = surjection_sigma(n)
        assert is_right_congruence(S, sigma)[0]
