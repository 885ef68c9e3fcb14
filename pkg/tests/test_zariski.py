from __future__ import annotations

import itertools
import random

import pytest

from semitop.elements import Tail, finitary, shift_tail
from semitop.fintop import (all_semigroups, bits, check_semigroup_topology, cyclic_group, discrete, is_continuous,
                            klein_four, max_chain, right_zero, semigroup_library, symmetric_inverse_monoid)
from semitop.sampling import injection
from semitop.zariski import (_context, _extend, check_pointwise_hypotheses, elementary_algebraic,
                             elementary_sets_from_maps, max_chain_case_table, word_functions,
                             word_functions_by_enumeration, zariski_topology)

LIB = semigroup_library()


def induced(S, **kw):
    return {w.induced for w in word_functions(S, **kw)}


def test_right_zero_words_collapse_to_the_variable():
    assert induced(right_zero(2), words="strict") == {(0, 1)}


def test_two_chain_words():
    assert induced(max_chain(2), words="strict") == {(0, 1), (1, 1)}
    assert elementary_algebraic(max_chain(2), words="strict").masks == {0b11, 0b10}


def test_group_inverse_mode_contains_inversion():
    for G in (cyclic_group(3), cyclic_group(4), klein_four()):
        assert G.inverse in induced(G, mode="inverse")


def test_inverse_mode_rejects_non_inverse_semigroups():
    with pytest.raises(ValueError):
        word_functions(right_zero(2), mode="inverse")


def test_two_chain_topologies():
    t = zariski_topology(max_chain(2), words="strict")
    assert t.sorted_opens() == [[], [0], [0, 1]]
    assert zariski_topology(max_chain(2)) == discrete(2)


def test_witness_words_realise_their_maps():
    for S in LIB[:30]:
        ctx = _context(S, "semigroup", False)
        for w in word_functions(S):
            if w.const is None:
                from semitop.zariski import evaluate_word
                assert tuple(evaluate_word(ctx, w.word, s) for s in range(S.order)) == w.induced


@pytest.mark.parametrize("S", LIB, ids=lambda s: s.name or str(s.table))
def test_closure_is_a_fixed_point(S):
    for mode in (["semigroup", "inverse"] if S.inverse else ["semigroup"]):
        ctx = _context(S, mode, False)
        maps = induced(S, mode=mode, words="strict")
        for phi, letter in itertools.product(maps, ctx.letters):
            assert _extend(ctx, phi, letter) in maps


def test_equalizer_of_a_map_with_itself_is_everything():
    for S in LIB[:20]:
        assert bits(range(S.order)) in elementary_algebraic(S).masks


@pytest.mark.parametrize("S", LIB, ids=lambda s: s.name or str(s.table))
def test_automorphisms_preserve_the_family_and_topology(S):
    masks = elementary_algebraic(S).masks
    t = zariski_topology(S)
    for p in S.automorphisms():
        assert {bits(p[x] for x in range(S.order) if m >> x & 1) for m in masks} == masks
    for p in S.automorphisms() + S.anti_automorphisms():
        assert t.image(p) == t


@pytest.mark.parametrize("S", LIB, ids=lambda s: s.name or str(s.table))
def test_semitopological_and_inversion(S):
    t = zariski_topology(S)
    r = check_semigroup_topology(S, t)
    assert r.left_semitopological and r.right_semitopological
    if S.inverse is not None:
        assert is_continuous(S.inverse, t)


def test_oracle_equivalence_order_three():
    for n in (1, 2, 3):
        for S in all_semigroups(n):
            for words in ("strict", "with_constants"):
                maps = word_functions_by_enumeration(S, words=words)
                assert induced(S, words=words) == maps
                assert elementary_algebraic(S, words=words).masks == elementary_sets_from_maps(maps, n)


@pytest.mark.parametrize("n", range(2, 7))
@pytest.mark.parametrize("adjoin", [False, True])
def test_max_chain_case_table(n, adjoin):
    S = max_chain(n)
    size = n + 1 if adjoin else n
    mul = lambda a, x: x if a == n else max(a, x)
    pred = max_chain_case_table(n, adjoin)
    masks = elementary_algebraic(S, words="with_constants", adjoin_identity=adjoin).masks
    for a in range(size):
        for b in range(size):
            V = bits(x for x in range(n) if mul(a, x) == mul(b, x))
            W = bits(x for x in range(n) if mul(a, x) == b)
            assert pred[(a, b)] == (V, W)
            assert V in masks and W in masks


def test_case_table_spot_values():
    pred = max_chain_case_table(5)
    assert pred[(1, 3)] == (bits([3, 4]), bits([3]))
    assert pred[(3, 1)] == (bits([3, 4]), 0)
    assert pred[(2, 2)] == (bits(range(5)), bits([0, 1, 2]))


def test_symmetric_inverse_monoid_semitopological():
    S, _ = symmetric_inverse_monoid(2)
    t = zariski_topology(S, mode="inverse")
    assert is_continuous(S.inverse, t)


# -- pointwise hypotheses --------------------------------------------------------------------

A = finitary([0], shift_tail(2))
B = finitary([1], shift_tail(2))
C0 = finitary([], Tail("affine", 2, 0))
C1 = finitary([0], Tail("affine", 2, 1))


def test_pointwise_hypotheses_hold():
    rng = random.Random(0)
    samples = [injection(rng, rng.randint(1, 5)) for _ in range(10)]
    rep = check_pointwise_hypotheses(0, A, B, [C0, C1], samples, window=64)
    assert rep.ok, rep.failures


def test_pointwise_condition_i_fails():
    rep = check_pointwise_hypotheses(0, A, A, [C0, C1], [], window=64)
    assert not rep.ok and rep.checks["i"] is False


def test_pointwise_condition_ii_fails():
    rep = check_pointwise_hypotheses(1, finitary([0, 1], shift_tail(2)), finitary([0, 2], shift_tail(2)),
                                     [C0], [], window=64)
    assert rep.checks["ii"] is False
