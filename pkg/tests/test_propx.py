from __future__ import annotations

import random
import threading

import pytest
from hypothesis import given, settings, strategies as st

from semitop import propx
from semitop.elements import UNDEF, ComputableElement, finitary, relation_element, shift_tail, UNDEFINED_TAIL
from semitop.propx import (BasicNbhdDescriptor, CoFinite, DecidableSet, LazyPerm, NaryMap, ResidueSet,
                           RankPiece, check_permutation, check_transfer, random_element, run_suite,
                           verify_identity, witness)
from semitop.subbasis import NamedSet


def test_decidable_sets():
    evens = DecidableSet(lambda x: x % 2 == 0, name="evens")
    assert [evens.nth(i) for i in range(4)] == [0, 2, 4, 6]
    assert evens.rank(6) == 3
    small = DecidableSet(lambda x: x in (3, 5), bound=10)
    with pytest.raises(IndexError):
        small.nth(2)
    r = ResidueSet(3, 1, excluded={4})
    assert [r.nth(i) for i in range(4)] == [1, 7, 10, 13]
    assert r.rank(10) == 2
    c = CoFinite({0, 2})
    assert [c.nth(i) for i in range(3)] == [1, 3, 4]


def test_lazy_perm_by_rank_pieces():
    t = LazyPerm({0: 5}, [RankPiece(CoFinite({0}), CoFinite({5}))])
    e = t.element()
    assert [e(x) for x in range(6)] == [5, 0, 1, 2, 3, 4]
    assert check_permutation(e, 64) is None
    with pytest.raises(ValueError):
        LazyPerm({0: 1, 2: 1}, [])


def test_check_permutation_detects_non_bijections():
    shift = finitary([], shift_tail(1))
    assert check_permutation(shift, 16) is not None


def test_xx_constant():
    s = ComputableElement("Transformation", fn=lambda x: 0, name="const0")
    b = witness("XX", s)
    assert all(b.g(b.t_s(b.f(x))) == 0 for x in range(64))
    assert verify_identity(b, window=64).ok


def test_xx_random_wide_window():
    rng = random.Random(5)
    for _ in range(5):
        s = random_element("XX", rng)
        assert verify_identity(witness("XX", s), window=128).ok


def test_injx_uses_s_and_identities():
    s = finitary([3, 0], shift_tail(2))
    b = witness("InjX", s)
    assert all(b.f(x) == s(x) and b.t_s(x) == x and b.g(x) == x for x in range(64))
    assert verify_identity(b).ok


def test_bx_single_pair():
    s = relation_element({(0, 0)})
    b = witness("BX", s)
    certified, seen = propx.bx_conjugate_pairs(b.t_s, 16)
    assert {p for p in certified if p[0] < 16 and p[1] < 16} == {(0, 0)}
    assert verify_identity(b, window=64).ok


def test_ix_empty():
    assert verify_identity(witness("IX", finitary([], UNDEFINED_TAIL, "PartialBijection"))).ok


def test_corrupted_bundle_is_reported():
    rng = random.Random(1)
    s = random_element("XX", rng)
    b = witness("XX", s)
    bad = propx.WitnessBundle(b.monoid, b.s, b.f, ComputableElement("Transformation", fn=lambda c: 0),
                              b.t_builder, b.transfer_fn, t_s=b.t_s)
    rep = verify_identity(bad)
    assert not rep.ok and "point" in rep.failure


def test_xx_transfer_from_four_fixed_points():
    rng = random.Random(2)
    s = random_element("XX", rng)
    b = witness("XX", s)
    B = BasicNbhdDescriptor("XX", tuple(NamedSet("U", (x, b.t_s(x))) for x in range(4)))
    U, _ = propx.transfer(b, B)
    ks = [b.k_sampler(U, rng, 64) for _ in range(10)]
    assert check_transfer(b, B, ks).ok


def test_injx_transfer_shape():
    s = finitary([2, 0], shift_tail(1))
    b = witness("InjX", s)
    B = BasicNbhdDescriptor("InjX", tuple(NamedSet("U", (y, y)) for y in (0, 1, 3)))   # 1 is not in im s
    U, _ = propx.transfer(b, B)
    kinds = sorted({c.kind for c in U.constraints})
    assert "F" in kinds and "U" in kinds and "Winv" in kinds
    rng = random.Random(3)
    assert check_transfer(b, B, [b.k_sampler(U, rng, 64) for _ in range(10)]).ok


def test_ix_transfer_shape():
    s = finitary([1, None, 0], UNDEFINED_TAIL, "PartialBijection")
    b = witness("IX", s)
    B = BasicNbhdDescriptor("IX", tuple(NamedSet("U", (x, b.t_s(x))) for x in range(6)))
    U, _ = propx.transfer(b, B)
    assert {c.kind for c in U.constraints} <= {"U", "W", "Winv"}
    rng = random.Random(4)
    assert check_transfer(b, B, [b.k_sampler(U, rng, 64) for _ in range(10)]).ok


def test_off_centre_neighbourhood_is_rejected():
    s = finitary([1, 0])
    b = witness("XX", s)
    B = BasicNbhdDescriptor("XX", (NamedSet("U", (0, b.t_s(0) + 1)),))
    assert not check_transfer(b, B, []).ok


def test_full_clone_witness():
    rng = random.Random(6)
    for n in (1, 2, 3):
        s = propx.random_operation(rng, n)
        b = witness(f"FullClone({n})", s)
        assert verify_identity(b, window=64).ok
        f_vals = {b.f(propx.unpair_tuple(c, n)) for c in range(200)}
        assert len(f_vals) == 200                               # f is injective
        assert len({b.g(v) for v in range(400)}) < 400                # g is far from injective


def test_px_over_xx_chain():
    rep = run_suite("PX/XX", samples=5, seed=3)
    assert rep.ok, rep.failures


@pytest.mark.parametrize("monoid", ["XX", "PX", "IX", "InjX", "BX", "FullClone"])
def test_suite_small(monoid):
    rep = run_suite(monoid, samples=3, seed=11)
    assert rep.ok, rep.failures
    assert rep.checks > 0


@settings(max_examples=10)
@given(st.sampled_from(["XX", "PX", "IX", "InjX", "BX"]), st.integers(0, 10_000))
def test_identity_and_transfer_property(monoid, seed):
    rep = run_suite(monoid, samples=1, seed=seed, nbhds=2, ks=3)
    assert rep.ok, rep.failures


def test_suite_is_deterministic():
    a = run_suite("IX", samples=3, seed=9).to_json()
    b = run_suite("IX", samples=3, seed=9).to_json()
    assert a == b


def test_concurrent_probing():
    rng = random.Random(8)
    b = witness("IX", random_element("IX", rng))
    results, errors = [], []

    def probe():
        try:
            results.append(verify_identity(b, window=96).ok)
        except Exception as e:          # pragma: no cover - reported below
            errors.append(e)

    threads = [threading.Thread(target=probe) for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert not errors and all(results) and len(results) == 8


def test_unknown_monoid():
    with pytest.raises(ValueError):
        witness("Nope", None)
