"""Extending a homeomorphism between closed subsets of Cantor space.

A closed set A is moved onto B by a map phi close to the identity; the mill
extends phi to a homeomorphism of the product with Cantor space, and the
distance bound is certified with exact dyadic intervals.
"""
from __future__ import annotations

from fractions import Fraction

from semitop import cantor

if __name__ == "__main__":
    A, B = cantor.cylinder([0, 0]), cantor.cylinder([1, 1])
    phi = cantor.xor_mask([1, 1])
    ext = cantor.mill_extend(A, B, phi, phi, Fraction(7, 8), depth=16)
    rep = cantor.verify_mill(ext, A, phi, depth=16, samples=50)
    print("mill:", rep.to_json())

    for text in ("id", "flip(0)", "compose(flip(2),shift(1))", "interleave"):
        s = cantor.parse_map(text)
        w = cantor.cantor_propx_witness(s, depth=12)
        r = cantor.verify_witness(s, w, depth=12)
        print(f"witness for {text:28s} {'pass' if r.ok else 'fail'} on {r.probes} probes")
