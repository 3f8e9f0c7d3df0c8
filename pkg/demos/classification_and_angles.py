"""
Symplectic types and Kahler angles of random subspaces.

A generic k-plane has the smallest isotropic kernel allowed by its
dimension; the symplectic group cannot change the type, only the angles.
The energy splits as n0 plus 2 sin^2 over the Kahler angles, which is
checked here against the direct trace formula.
"""

import math
from collections import Counter

from sympgrass import (
    classify,
    construct_subspace_of_type,
    energy,
    energy_bounds,
    kahler_spectrum,
    make_standard_space,
    random_subspace,
    signatures,
)
from sympgrass.darboux import random_symplectic
from sympgrass.oracles import pairing_rank_classifier
from sympgrass.symplectic_core import subspace_from_spanning

sp = make_standard_space(3)

print("types of 200 random subspaces of R^6, by dimension:")
for k in range(1, 6):
    counts = Counter(str(classify(random_subspace(sp, k, 1000 * k + i))) for i in range(200))
    print(f"  k = {k}: {dict(counts)}")

print("\nall types in R^6 with k = 3:", [str(s) for s in signatures(3) if s.k == 3])

W = construct_subspace_of_type(sp, (1, 1, 1), mode="randomized", seed=4)
spec = kahler_spectrum(W)
decomposed = spec.n0 + sum(2 * math.sin(t) ** 2 for t in spec.angles)
print(f"\n(1,1,1) sample: angles {[round(t, 6) for t in spec.angles]}")
print(f"  f = {energy(W):.12f}, n0 + sum 2 sin^2 = {decomposed:.12f}")
print(f"  bounds (lower, upper, strict): {energy_bounds(classify(W))}")
print(f"  rank-of-pairing classifier agrees: {pairing_rank_classifier(W, 0) == classify(W)}")

# a symplectic move changes the angles but not the type
g = random_symplectic(sp, 7, scale=0.5)
V = subspace_from_spanning(sp, g @ W.basis)
print(f"  after a symplectic move: type {classify(V)}, angles {[round(t, 6) for t in kahler_spectrum(V).angles]}")
