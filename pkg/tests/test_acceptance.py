"""
Acceptance gate: one test per criterion, at the stated tolerances.

Run on its own with ``pytest tests/test_acceptance.py`` or
``python tests/test_acceptance.py``; either way a PASS/FAIL line per
criterion is printed at the end of the session.
"""

import math
import sys

import numpy as np
import pytest

from sympgrass.darboux import construct_subspace_of_type
from sympgrass.energy_flow import (
    FlowConfig,
    energy,
    energy_bounds,
    flow_run,
    hessian_at_critical,
    hessian_report,
    riemannian_gradient,
    stabilizer_dimension_oracle,
)
from sympgrass.oracles import (
    fd_directional_derivative,
    fd_hessian,
    oracle_frame,
    worked_example_family,
)
from sympgrass.suites import flow_starts, sample_rng, suite_darboux
from sympgrass.symplectic_core import (
    classify,
    is_J_compatible,
    isotropic_kernel,
    kahler_spectrum,
    make_standard_space,
    random_subspace,
    signatures,
)

SEED = 0


def all_types(nmax):
    return [(n, s) for n in range(1, nmax + 1) for s in signatures(n)]


def mixed_subspace(i):
    """Even i: uniformly random subspace; odd i: random symplectic image of some type."""
    rng = sample_rng(SEED, 100_000 + i)
    n = int(rng.integers(1, 5))
    sp = make_standard_space(n)
    if i % 2 == 0:
        return random_subspace(sp, int(rng.integers(1, 2 * n)), rng)
    sigs = [s for s in signatures(n) if 0 < s.k < 2 * n]
    return construct_subspace_of_type(sp, sigs[int(rng.integers(len(sigs)))], mode="randomized", seed=rng)


@pytest.mark.criterion(1, "worked example: f = 2 tanh^2(2t), [P,J]^2 = tanh^2(2t) I, t=20 kernel rank 2")
def test_worked_example():
    for i in range(13):
        t = 0.25 * i
        W = worked_example_family(t)
        assert abs(energy(W) - 2 * math.tanh(2 * t) ** 2) < 1e-10
        P, J = W.projection, W.space.J
        C = P @ J - J @ P
        assert np.max(np.abs(C @ C - math.tanh(2 * t) ** 2 * np.eye(4))) < 1e-10
    assert isotropic_kernel(worked_example_family(20.0)).k == 2


@pytest.mark.criterion(2, "gradient vs central differences (h=1e-5), 200 subspaces x 10 directions, rel < 1e-6")
def test_gradient_fd():
    worst = 0.0
    for i in range(200):
        rng = sample_rng(SEED, i)
        n = int(rng.choice([2, 3, 4]))
        k = int(rng.integers(1, 2 * n))
        W = random_subspace(make_standard_space(n), k, rng)
        G = riemannian_gradient(W)
        scale = max(G.norm(), 1.0)
        Bp, _ = oracle_frame(W)
        for _ in range(10):
            Y = rng.standard_normal((2 * n - k, k))
            M = Bp @ Y @ W.basis.T
            X = M + M.T
            fd = fd_directional_derivative(W, Y, 1e-5, Bp)
            worst = max(worst, abs(fd - G.inner(X)) / (scale * np.linalg.norm(X)))
    assert worst < 1e-6, worst


@pytest.mark.criterion(3, "coordinate critical points: |f - n0| < 1e-12 and |grad| < 1e-12 for n <= 4")
def test_critical_integrality():
    for n, sig in all_types(4):
        W = construct_subspace_of_type(make_standard_space(n), sig)
        assert abs(energy(W) - sig.n0) < 1e-12
        assert riemannian_gradient(W).norm() < 1e-12


@pytest.fixture(scope="module")
def flow_runs():
    starts = flow_starts(SEED, count=50, nmax=3)
    return [(sig, W, flow_run(W, FlowConfig(max_steps=100_000))) for sig, W in starts]


@pytest.mark.criterion(4, "50 seeded flows, n <= 3: constant type, |f - n0| < 1e-6, residual < 1e-6, >= 48 converge")
def test_stable_manifolds(flow_runs):
    assert {sig for sig, _, _ in flow_runs} == {
        s for n in (1, 2, 3) for s in signatures(n) if 0 < s.k < 2 * n
    }
    converged = 0
    for sig, W, tr in flow_runs:
        assert all(s.signature == sig for s in tr.samples)
        assert not tr.invariant_violations()
        if tr.converged:
            converged += 1
            assert abs(tr.f_limit - sig.n0) < 1e-6
            assert is_J_compatible(tr.limit).residual < 1e-6
    assert converged >= 48, f"{converged}/50 converged"


@pytest.mark.criterion(5, "energy decomposition f = n0 + sum 2 sin^2(theta) within 1e-9 on 100 subspaces")
def test_energy_decomposition():
    for i in range(100):
        W = mixed_subspace(i)
        spec = kahler_spectrum(W)
        assert abs(energy(W) - (spec.n0 + sum(2 * math.sin(t) ** 2 for t in spec.angles))) < 1e-9


@pytest.mark.criterion(6, "energy bounds n0 <= f <= min(k, 2n-k), strict when n+ > max(0, k-n)")
def test_energy_bounds():
    strict_seen = 0
    for i in range(300):
        W = mixed_subspace(1000 + i)
        lo, hi, strict = energy_bounds(classify(W))
        f = energy(W)
        assert lo - 1e-12 <= f <= hi + 1e-12
        if strict:
            strict_seen += 1
            assert f < hi
    assert strict_seen > 50  # the strict branch is actually exercised


@pytest.mark.criterion(7, "Hessian: FD rel < 1e-5, kernel dim formula, complex line in R^4 has eigenvalue 4 twice")
def test_hessian():
    for n, sig in all_types(3):
        W = construct_subspace_of_type(make_standard_space(n), sig)
        rep = hessian_report(W)
        assert rep.kernel_dim == n * n - sig.n0 * (sig.n0 - 1) // 2 - sig.nplus**2 - sig.nminus**2
        H_fd, frame = fd_hessian(W)
        if not frame:
            continue
        images = [hessian_at_critical(W, E).matrix for E in frame]
        H = np.array([[np.sum(a * b) for b in images] for a in frame])
        assert np.max(np.abs(H - H_fd)) / max(np.max(np.abs(H)), 1.0) < 1e-5
    W = construct_subspace_of_type(make_standard_space(2), (0, 1, 1))
    for lam in (np.array(hessian_report(W).eigenvalues), np.linalg.eigvalsh(fd_hessian(W)[0])):
        nonzero = lam[np.abs(lam) > 1e-3]
        assert len(nonzero) == 2 and np.all(np.abs(nonzero - 4) < 1e-4)


@pytest.mark.criterion(8, "Darboux constructions n <= 4: pairing < 1e-10, adaptation distance < 1e-9")
def test_darboux():
    reports = {r.name: r for r in suite_darboux(SEED, nmax=4)}
    for name, r in reports.items():
        assert r.samples > 0, name
        tol = 1e-8 if name.endswith("angles") else 1e-9 if name.endswith("adaptation") else 1e-10
        assert r.max_abs_error < tol, (name, r.max_abs_error)


@pytest.mark.criterion(9, "stabilizer nullspace dimension equals the closed formula for n <= 4")
def test_stabilizer():
    for n, (n0, p, m) in all_types(4):
        expect = n0 * n0 + p * (2 * p + 1) + m * (2 * m + 1) + 2 * n0 * (p + m) + n0 * (n0 + 1) // 2
        for mode in ("coordinate", "randomized"):
            W = construct_subspace_of_type(make_standard_space(n), (n0, p, m), mode=mode, seed=n + 10 * n0 + 3 * p)
            assert stabilizer_dimension_oracle(W) == expect


@pytest.mark.criterion(10, "orbit incidence: n0(limit) >= n0(start), equality on converged runs")
def test_orbit_incidence(flow_runs):
    runs = [(W, tr) for _, W, tr in flow_runs]
    for i in range(10):
        rng = sample_rng(SEED, 60_000 + i)
        n = int(rng.integers(1, 4))
        W = random_subspace(make_standard_space(n), int(rng.integers(1, 2 * n)), rng)
        runs.append((W, flow_run(W)))
    for W, tr in runs:
        n0_start, n0_limit = classify(W).n0, classify(tr.limit).n0
        assert n0_limit >= n0_start
        if tr.converged:
            assert n0_limit == n0_start


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
