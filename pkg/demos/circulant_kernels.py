"""Kernels of the circulant matrices attached to accompanying vectors.

Run: python demos/circulant_kernels.py
"""

import numpy as np

from treegroups import AccompanyingVector, circulant_from_alpha, kernel_basis


def show(p, values):
    vec = AccompanyingVector(p, values)
    M = circulant_from_alpha(vec)
    basis = kernel_basis(M)
    print(f"p={p} alpha={values} periodic={vec.is_periodic} symmetric={vec.is_symmetric}")
    print(f"  rank {M.rank()}, kernel dimension {len(basis)}")
    for v in basis:
        print(f"  {tuple(v)}  coordinate sum {sum(v) % p}")


show(3, (1, 2))
show(5, (1, 2, 3, 4))
show(5, (1, 2, 2, 1))

# a non-periodic vector gives an invertible matrix here
show(3, (1, 1))

# random periodic vectors for p = 7: every kernel vector sums to zero
rng = np.random.default_rng(0)
worst = 0
for _ in range(200):
    head = list(rng.integers(0, 7, size=5))
    values = tuple(int(x) for x in head + [(-sum(head)) % 7])
    if not any(values):
        continue
    for v in kernel_basis(circulant_from_alpha(AccompanyingVector(7, values))):
        worst = max(worst, sum(v) % 7)
print("largest coordinate sum residue over 200 periodic vectors, p=7:", worst)
