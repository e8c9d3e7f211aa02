"""Cubes, cube sums and additive systems on small product spaces.

    python3 demos/additive_systems.py
"""
import numpy as np

from negpell_lab import combi

if __name__ == "__main__":
    space = combi.ProductSpace(((5, 13, 17), (29, 37, 41)), frozenset({0, 1}))
    print(f"|Cube(X, S)| = {space.cube_size()}, dim Add(X, S) = {combi.add_dim(space)}")

    x = ((5, 13), (29, 41))
    print(f"corners of {x}: {sorted(combi.subcube(space, x, ()))}")

    sys_ = combi.legendre_system(space)
    print(f"Legendre system valid: {bool(combi.validate_additive_system(sys_))}")
    chk = combi.acceptance_density_check(sys_)
    print(f"  accepted density {float(chk.density):.4f} >= bound {float(chk.bound):.2e}")

    rng = np.random.default_rng(0)
    worst = None
    for _ in range(500):
        sp = combi.ProductSpace.of_sizes(rng.integers(1, 5, size=3).tolist(), {0, 1, 2})
        c = combi.acceptance_density_check(combi.random_additive_system(sp, rng, a=4), a=4)
        ratio = c.density / c.bound if c.bound else None
        if ratio is not None and (worst is None or ratio < worst):
            worst = ratio
    print(f"500 random systems with |S| = 3: smallest density / bound = {float(worst):.3g}")

    Y = rng.random((12, 12)) < 0.6
    box = combi.find_box(combi.ProductSpace.of_sizes([12, 12]), Y, 3)
    print(f"a 3 x 3 box inside a random 60% subset of 12 x 12: {box}")

    sm = combi.permutation_second_moment([5, 13, 17, 29, 37], (), 0, 1, 5)
    print(f"second moment: {sm.lhs} <= {sm.rhs}: {sm.passed}")
