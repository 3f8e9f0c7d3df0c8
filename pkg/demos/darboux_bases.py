"""
Darboux bases adapted to a subspace.

Three constructions: the relative basis built from a splitting of W into
its isotropic kernel and two symplectic pieces, the orthonormal basis of a
J-compatible subspace, and the angle-scaled basis of a totally real
half-dimensional subspace.  Each is checked for the symplectic pairing.
"""

from sympgrass import (
    construct_subspace_of_type,
    darboux_check,
    j_compatible_darboux,
    kahler_spectrum,
    make_standard_space,
    random_subspace,
    relative_darboux_basis,
    totally_real_darboux,
)

sp = make_standard_space(4)

W = construct_subspace_of_type(sp, (2, 1, 1), mode="randomized", seed=3)
b = relative_darboux_basis(W)
print(f"relative basis for a randomized (2,1,1): blocks {b.n0, b.nplus, b.nminus}, "
      f"deviation {darboux_check(b).max_deviation:.1e}")

W = construct_subspace_of_type(sp, (1, 2, 1))
b = j_compatible_darboux(W)
print(f"J-compatible (1,2,1): deviation {darboux_check(b).max_deviation:.1e}")

W = random_subspace(sp, 4, 11)
b = totally_real_darboux(W, include_complement=True)
print(f"totally real 4-plane: angles {[round(t, 6) for t in b.angles]} "
      f"(spectrum {[round(t, 6) for t in kahler_spectrum(W).angles]}), "
      f"deviation {darboux_check(b).max_deviation:.1e}")
