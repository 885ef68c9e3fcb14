"""Clone closure on a two-element set, and Horn composition on N.

NAND alone generates every binary Boolean operation.  For Horn operations the
declared I-set and co-image of a composite are compared with what a brute-force
detector finds on a grid.
"""
from __future__ import annotations

import random

from semitop import clones

if __name__ == "__main__":
    nand = clones.FiniteOperation.from_function(2, 2, lambda xs: 1 - (xs[0] & xs[1]))
    ops = clones.clone_generate([nand], arity_cap=2, q=2)
    print("generated by NAND:", {n: len(v) for n, v in ops.items()})

    rng = random.Random(5)
    for case in ("alpha", "beta", "gamma", "delta"):
        fs, g = clones.random_case_instance(rng, case)
        chk = clones.check_horn_instance(fs, g)
        print(f"{case:6s} declared {chk.declared}  detected {chk.detected}")
