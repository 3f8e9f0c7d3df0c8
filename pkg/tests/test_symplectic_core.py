import math

import numpy as np
import pytest

from sympgrass.darboux import construct_subspace_of_type, random_symplectic
from sympgrass.errors import (
    ClassificationUnstable,
    InconsistentSignature,
    NotApplicable,
    RankDeficient,
)
from sympgrass.oracles import worked_example_family
from sympgrass.symplectic_core import (
    Tolerances,
    TypeSignature,
    check_signature,
    classify,
    coordinate_subspace,
    intersect,
    is_J_compatible,
    isotropic_kernel,
    kahler_spectrum,
    make_standard_space,
    max_complex_subspace,
    min_complex_check,
    omega_gram,
    orthogonal_complement,
    projection_distance,
    random_subspace,
    signatures,
    subspace_from_basis,
    subspace_from_spanning,
    symplectic_complement,
)

from conftest import all_types


def test_standard_model_identities():
    sp = make_standard_space(3)
    J, om = sp.J, sp.omega
    assert np.array_equal(J @ J, -np.eye(6))
    assert np.array_equal(om.T, -om)
    rng = np.random.default_rng(0)
    u, v = rng.standard_normal(6), rng.standard_normal(6)
    # g(u, v) = omega(u, J v) is the dot product
    assert sp.inner(u, v) == pytest.approx(u @ v)
    assert sp.form(sp.e(2), sp.f(2)) == 1.0
    assert sp.form(sp.f(2), sp.e(2)) == -1.0
    assert sp.form(sp.e(1), sp.f(2)) == 0.0


def test_space_rejects_bad_n():
    with pytest.raises(ValueError):
        make_standard_space(0)
    with pytest.raises(ValueError):
        make_standard_space(1.5)


def test_subspace_requires_orthonormal_basis():
    sp = make_standard_space(2)
    with pytest.raises(ValueError):
        subspace_from_basis(sp, np.array([[1.0], [1.0], [0.0], [0.0]]))
    W = subspace_from_basis(sp, np.array([[1.0], [1.0], [0.0], [0.0]]), reorthonormalize=True)
    assert np.allclose(W.basis[:, 0], [2 ** -0.5, 2 ** -0.5, 0, 0])


def test_spanning_is_orthonormalized(rng):
    sp = make_standard_space(3)
    W = subspace_from_spanning(sp, rng.standard_normal((6, 4)))
    assert np.max(np.abs(W.basis.T @ W.basis - np.eye(4))) < 1e-12
    P = W.projection
    assert np.allclose(P @ P, P) and np.allclose(P, P.T)


def test_rank_deficient_spanning_set():
    sp = make_standard_space(2)
    M = np.array([[1.0, 2.0], [0.0, 0.0], [1.0, 2.0], [0.0, 0.0]])
    with pytest.raises(RankDeficient):
        subspace_from_spanning(sp, M)


def test_zero_dimensional_subspace():
    sp = make_standard_space(2)
    W = subspace_from_spanning(sp, np.zeros((4, 0)))
    assert W.k == 0
    assert classify(W) == (0, 0, 2)
    assert is_J_compatible(W).compatible


def test_projection_is_read_only(rng):
    W = random_subspace(make_standard_space(2), 2, rng)
    with pytest.raises(ValueError):
        W.projection[0, 0] = 3.0


def test_signature_parsing_and_checks():
    assert TypeSignature.parse("1, 1,1") == (1, 1, 1)
    assert str(TypeSignature(2, 0, 1)) == "(2,0,1)"
    assert TypeSignature(1, 2, 0).k == 5
    with pytest.raises(InconsistentSignature):
        TypeSignature.parse("1,2")
    with pytest.raises(InconsistentSignature):
        check_signature((4, 0, 0), n=2)
    with pytest.raises(InconsistentSignature):
        check_signature((1, 0, 1), k=2)
    with pytest.raises(InconsistentSignature):
        check_signature((-1, 2, 1))


def test_signature_enumeration():
    assert signatures(2, k=2) == [(2, 0, 0), (0, 1, 1)]
    assert signatures(3, k=3) == [(3, 0, 0), (1, 1, 1)]
    # one signature per (n0, n+) with n0 + n+ <= n
    assert len(signatures(4)) == 15


@pytest.mark.parametrize("n,sig", all_types(4))
def test_classify_round_trip(n, sig):
    sp = make_standard_space(n)
    for mode in ("coordinate", "randomized"):
        W = construct_subspace_of_type(sp, sig, mode=mode, seed=n * 31 + sig.n0)
        assert classify(W) == sig


def test_classify_examples():
    sp = make_standard_space(2)
    assert classify(coordinate_subspace(sp, [0, 1])) == (2, 0, 0)  # span{e1, e2}
    assert classify(coordinate_subspace(sp, [0, 2])) == (0, 1, 1)  # span{e1, f1}
    assert classify(worked_example_family(1.0)) == (0, 1, 1)


def test_generic_random_subspace_type(rng):
    for n in (2, 3, 4):
        sp = make_standard_space(n)
        for k in range(1, 2 * n):
            sig = classify(random_subspace(sp, k, rng))
            assert sig.n0 == k % 2


def test_classify_is_symplectic_invariant(rng):
    sp = make_standard_space(3)
    for k in (2, 3, 4):
        W = random_subspace(sp, k, rng)
        g = random_symplectic(sp, rng, scale=0.8)
        assert classify(subspace_from_spanning(sp, g @ W.basis)) == classify(W)


def test_classification_near_rank_cut_is_surfaced():
    sp = make_standard_space(2)
    eps = 1e-9  # sin(eps) sits right at the rank cut
    B = np.array([[1.0, 0.0], [0.0, math.cos(eps)], [0.0, math.sin(eps)], [0.0, 0.0]])
    W = subspace_from_spanning(sp, B)
    with pytest.raises(ClassificationUnstable):
        classify(W)
    # far from the cut in either direction the answer is clean
    assert classify(W, Tolerances(rank=1e-6)) == (2, 0, 0)
    assert classify(W, Tolerances(rank=1e-12)) == (0, 1, 1)


def test_complements():
    sp = make_standard_space(3)
    W = construct_subspace_of_type(sp, (1, 1, 1), mode="randomized", seed=5)
    Wp = orthogonal_complement(W)
    assert Wp.k == 3 and np.allclose(W.basis.T @ Wp.basis, 0, atol=1e-12)
    Wo = symplectic_complement(W)
    assert Wo.k == 3
    assert np.max(np.abs(omega_gram(sp, W.basis, Wo.basis))) < 1e-12
    # (W^omega)^omega = W
    assert projection_distance(symplectic_complement(Wo), W) < 1e-12


def test_isotropic_kernel_is_intersection_with_complement():
    sp = make_standard_space(4)
    W = construct_subspace_of_type(sp, (2, 1, 1), mode="randomized", seed=11)
    W0 = isotropic_kernel(W)
    assert W0.k == 2
    assert projection_distance(W0, intersect(W, symplectic_complement(W))) < 1e-9


def test_intersect_coordinate():
    sp = make_standard_space(2)
    A = coordinate_subspace(sp, [0, 1])
    B = coordinate_subspace(sp, [1, 2])
    I = intersect(A, B)
    assert I.k == 1 and abs(abs(I.basis[1, 0]) - 1) < 1e-12


def test_kahler_spectrum_of_worked_example():
    for t in (0.25, 1.0, 2.0):
        spec = kahler_spectrum(worked_example_family(t))
        assert (spec.n0, spec.nJ, spec.ntheta) == (0, 0, 1)
        # f = 2 sin^2(theta) = 2 tanh^2(2t)
        assert math.sin(spec.angles[0]) ** 2 == pytest.approx(math.tanh(2 * t) ** 2, abs=1e-12)
    spec = kahler_spectrum(worked_example_family(0.0))
    assert (spec.nJ, spec.angles) == (1, ())


def test_kahler_spectrum_counts_sum_to_k(rng):
    for n in (2, 3, 4):
        sp = make_standard_space(n)
        for k in range(1, 2 * n):
            spec = kahler_spectrum(random_subspace(sp, k, rng))
            assert spec.k == k
            assert all(0 < a < math.pi / 2 for a in spec.angles)
            assert list(spec.angles) == sorted(spec.angles)


def test_max_complex_subspace_is_J_invariant():
    sp = make_standard_space(3)
    W = subspace_from_spanning(sp, np.column_stack([sp.e(1), sp.f(1), sp.e(2) + 0.3 * sp.f(3)]))
    C = max_complex_subspace(W)
    assert C.k == 2
    assert np.allclose(C.projection @ sp.J, sp.J @ C.projection, atol=1e-12)


def test_J_compatibility_and_residual():
    sp = make_standard_space(3)
    W = subspace_from_spanning(sp, np.column_stack([sp.e(1), sp.f(1), sp.e(2)]))
    assert is_J_compatible(W) == (True, pytest.approx(0.0, abs=1e-15))
    Wt = worked_example_family(1.0)
    comp = is_J_compatible(Wt)
    assert not comp.compatible
    assert comp.residual == pytest.approx(2 * math.tanh(2.0) ** 2, abs=1e-12)


def test_min_complex_check(rng):
    sp = make_standard_space(2)
    with pytest.raises(NotApplicable):
        min_complex_check(random_subspace(sp, 2, rng))
    for k in (3, 4):
        for _ in range(5):
            assert min_complex_check(random_subspace(sp, k, rng))
    sp3 = make_standard_space(3)
    for _ in range(5):
        assert min_complex_check(random_subspace(sp3, 5, rng))
