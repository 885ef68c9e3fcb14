from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from semitop.fintop import (FiniteSemigroup, FiniteTopology, all_semigroups, bits, check_semigroup_topology,
                            count_topologies_via_preorders, discrete, enumerate_topologies, free_semilattice,
                            generate_topology, indiscrete, intersect_topologies, max_chain, right_zero,
                            semigroup_library, separation)


def opens(t):
    return set(map(tuple, t.sorted_opens()))


def test_generate_small_cases():
    assert opens(generate_topology([], 2)) == {(), (0, 1)}
    assert len(generate_topology([{0}, {1}, {2}], 3).opens) == 8
    assert opens(generate_topology([{0}, {1}], 3)) == {(), (0,), (1,), (0, 1), (0, 1, 2)}


@given(st.integers(1, 4).flatmap(lambda n: st.tuples(st.just(n), st.lists(st.integers(0, (1 << n) - 1), max_size=5))))
def test_generated_families_are_topologies(arg):
    n, sub = arg
    t = generate_topology(sub, n)
    for u in sub:
        assert t.is_open(u)
    FiniteTopology(t.n, t.opens)      # re-validates the invariants


def test_separation_axioms():
    s = separation(discrete(4))
    assert s.T0 and s.T1 and s.T2
    s = separation(indiscrete(2))
    assert not (s.T0 or s.T1 or s.T2)
    sier = FiniteTopology(2, frozenset({0, 0b01, 0b11}))
    s = separation(sier)
    assert s.T0 and not s.T1 and not s.T2


def test_invalid_topology_rejected():
    with pytest.raises(ValueError):
        FiniteTopology(3, frozenset({0, 0b001, 0b010, 0b111}))


def test_right_zero_every_topology_is_a_semigroup_topology():
    S = right_zero(3)
    for t in enumerate_topologies(3):
        assert check_semigroup_topology(S, t).topological


def test_discrete_is_always_a_semigroup_topology():
    for S in all_semigroups(3):
        assert check_semigroup_topology(S, discrete(3)).topological


def test_two_chain_with_top_open():
    t = FiniteTopology(2, frozenset({0, 0b10, 0b11}))
    assert check_semigroup_topology(max_chain(2), t).topological


def test_counts():
    assert [sum(1 for _ in enumerate_topologies(n)) for n in (1, 2, 3)] == [1, 4, 29]
    assert [count_topologies_via_preorders(n) for n in (1, 2, 3, 4)] == [1, 4, 29, 355]


def test_enumeration_cap(monkeypatch):
    with pytest.raises(ValueError):
        list(enumerate_topologies(5))
    monkeypatch.setenv("SEMITOP_CAP", "2")
    with pytest.raises(ValueError):
        list(enumerate_topologies(3))


def test_intersection():
    t = generate_topology([{0}], 2)
    assert intersect_topologies([t, t]) == t
    assert intersect_topologies([discrete(3), indiscrete(3)]) == indiscrete(3)


def test_meet_of_t0_semigroup_topologies_on_two_chain():
    S = max_chain(2)
    ts = [t for t in enumerate_topologies(2)
          if check_semigroup_topology(S, t).topological and separation(t).T0]
    # derived by hand: the two Sierpinski topologies and the discrete one
    assert len(ts) == 3
    assert intersect_topologies(ts) == indiscrete(2)


@pytest.mark.parametrize("S", list(all_semigroups(2)) + list(all_semigroups(3)) + [free_semilattice(2)],
                         ids=lambda s: s.name)
def test_min_t1_semitopological_is_discrete(S):
    for t in enumerate_topologies(S.order):
        r = check_semigroup_topology(S, t)
        if separation(t).T1 and r.left_semitopological and r.right_semitopological:
            assert t == discrete(S.order)


def test_semilattice_needs_m_basis_members():
    for k in (1, 2):
        S = free_semilattice(k)
        m = S.order
        t1 = [t for t in enumerate_topologies(m) if separation(t).T1]
        assert t1 == [discrete(m)]
        # any basis of the discrete topology contains every singleton
        assert all(t.is_open(1 << x) for t in t1 for x in range(m))


def test_semigroup_validation_and_library():
    with pytest.raises(ValueError):
        FiniteSemigroup(((0, 0), (0, 0), (1, 1)))
    with pytest.raises(ValueError):
        FiniteSemigroup(((1, 0), (0, 0)))        # not associative
    lib = semigroup_library()
    assert len(lib) >= 50 and max(S.order for S in lib) <= 4
    assert [len(all_semigroups(n)) for n in (1, 2, 3)] == [1, 5, 24]


def test_cayley_json_round_trip():
    S = max_chain(3)
    assert FiniteSemigroup.from_json(S.to_json()).table == S.table
    with pytest.raises(ValueError):
        FiniteSemigroup.from_json({**S.to_json(), "identity": 2})


def test_bits():
    assert bits([0, 2]) == 5
