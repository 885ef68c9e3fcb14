"""Zariski topologies of a few small semigroups.

For each semigroup we list the elementary algebraic sets (solution sets of word
equations), the open sets they generate, the separation axioms, and whether
translations and multiplication are continuous.
"""
from __future__ import annotations

from semitop.fintop import check_semigroup_topology, max_chain, members, separation, symmetric_inverse_monoid
from semitop.zariski import elementary_algebraic, max_chain_case_table, zariski_topology


def show(S, mode="semigroup"):
    fam = elementary_algebraic(S, mode)
    t = zariski_topology(S, mode)
    rep = check_semigroup_topology(S, t)
    sep = separation(t)
    print(f"{S.name or 'S'} (order {S.order}, {mode})")
    if S.order <= 4:
        print("  closed basis:", sorted((members(m) for m in fam.masks), key=lambda s: (len(s), s)))
        print("  open sets:   ", t.sorted_opens())
    else:
        print(f"  {len(fam.masks)} elementary algebraic sets, {len(t.opens)} open sets")
    print(f"  T0={sep.T0} T1={sep.T1} T2={sep.T2}")
    print(f"  semitopological={rep.left_semitopological and rep.right_semitopological}"
          f" topological={rep.topological}")


if __name__ == "__main__":
    show(max_chain(3))
    show(symmetric_inverse_monoid(2)[0], "inverse")

    # On a max-chain every V and W set is forced into one of three shapes.
    print("\nmax-chain of size 3 with an identity adjoined: (a, b) -> (V, W)")
    for (a, b), (V, W) in sorted(max_chain_case_table(3, True).items()):
        print(f"  a={a} b={b}  V={members(V)}  W={members(W)}")
