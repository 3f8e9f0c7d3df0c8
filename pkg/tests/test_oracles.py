import json
import math

import numpy as np
import pytest

from sympgrass.darboux import construct_subspace_of_type
from sympgrass.energy_flow import energy, hessian_report, riemannian_gradient
from sympgrass.errors import NotCritical
from sympgrass.oracles import (
    OracleReport,
    energy_from_spanning,
    fd_gradient,
    fd_hessian,
    pairing_rank_classifier,
    worked_example_energy,
    worked_example_family,
    worked_example_group,
    worked_example_projection,
)
from sympgrass.suites import SUITES, run_suite, sample_rng
from sympgrass.symplectic_core import (
    classify,
    coordinate_subspace,
    make_standard_space,
    random_subspace,
)


def test_worked_example_group_is_symplectic():
    sp = make_standard_space(2)
    for t in (-1.0, 0.3, 2.0):
        g = worked_example_group(t)
        assert np.max(np.abs(g.T @ sp.omega @ g - sp.omega)) < 1e-12 * math.cosh(t) ** 2


@pytest.mark.parametrize("t", [0.25 * i for i in range(13)])
def test_worked_example_closed_forms(t):
    W = worked_example_family(t)
    assert np.max(np.abs(W.projection - worked_example_projection(t))) < 1e-12
    assert abs(energy(W) - worked_example_energy(t)) < 1e-10
    P, J = W.projection, W.space.J
    C = P @ J - J @ P
    assert np.max(np.abs(C @ C - math.tanh(2 * t) ** 2 * np.eye(4))) < 1e-10


def test_worked_example_endpoints():
    W0 = worked_example_family(0.0)
    sp = W0.space
    assert np.allclose(W0.projection, coordinate_subspace(sp, [0, 2]).projection)
    assert energy(W0) == 0.0
    assert worked_example_energy(1.0) == pytest.approx(1.8586983502936711, abs=1e-15)
    W20 = worked_example_family(20.0)
    assert abs(energy(W20) - 2.0) < 1e-10
    assert classify(W20) == (2, 0, 0)


def test_energy_from_spanning_ignores_scaling(rng):
    sp = make_standard_space(3)
    W = random_subspace(sp, 3, rng)
    M = W.basis @ rng.standard_normal((3, 3))
    assert energy_from_spanning(M, sp.J) == pytest.approx(energy(W), abs=1e-12)


def test_fd_gradient_matches_closed_form(rng):
    for W in (worked_example_family(1.0), random_subspace(make_standard_space(3), 3, rng)):
        G = riemannian_gradient(W).matrix
        Gfd = fd_gradient(W).matrix
        assert np.linalg.norm(G - Gfd) / np.linalg.norm(G) < 1e-6


def test_fd_gradient_at_critical_point():
    W = construct_subspace_of_type(make_standard_space(3), (1, 1, 1))
    h = 1e-5
    assert np.max(np.abs(fd_gradient(W, h).matrix)) < 10 * h * h


def test_fd_gradient_step_range():
    W = worked_example_family(1.0)
    with pytest.raises(ValueError):
        fd_gradient(W, h=1e-2)


def test_fd_hessian_examples():
    H, frame = fd_hessian(coordinate_subspace(make_standard_space(1), [0]))
    assert H.shape == (1, 1) and abs(H[0, 0]) < 1e-6
    H, _ = fd_hessian(construct_subspace_of_type(make_standard_space(2), (0, 1, 1)))
    assert np.allclose(sorted(np.linalg.eigvalsh(H)), [0, 0, 4, 4], atol=1e-4)
    H, _ = fd_hessian(construct_subspace_of_type(make_standard_space(2), (2, 0, 0)))
    assert int(np.sum(np.abs(np.linalg.eigvalsh(H)) < 1e-4)) == 3


def test_fd_hessian_rejects_noncritical():
    with pytest.raises(NotCritical):
        fd_hessian(worked_example_family(1.0))


def test_fd_hessian_spectrum_matches_closed_form():
    W = construct_subspace_of_type(make_standard_space(3), (1, 1, 1))
    H, _ = fd_hessian(W)
    lam = np.sort(np.linalg.eigvalsh(H))
    assert np.allclose(lam, hessian_report(W).eigenvalues, atol=1e-5)


def test_pairing_rank_classifier_examples():
    sp = make_standard_space(2)
    assert pairing_rank_classifier(coordinate_subspace(sp, [0, 1]), 0) == (2, 0, 0)
    assert pairing_rank_classifier(worked_example_family(1.0), 0) == (0, 1, 1)


def test_pairing_rank_classifier_agrees(rng):
    for _ in range(60):
        n = int(rng.integers(1, 5))
        W = random_subspace(make_standard_space(n), int(rng.integers(0, 2 * n + 1)), rng)
        assert pairing_rank_classifier(W, rng) == classify(W)


def test_oracle_report_serialization():
    r = OracleReport("x", 1e-3, 2e-3, 5, False, 7)
    d = r.to_dict()
    assert list(d) == ["name", "max_abs_error", "max_rel_error", "samples", "pass", "seed"]
    assert json.loads(json.dumps(d))["pass"] is False


def test_sample_rng_is_counter_based():
    a = sample_rng(3, 5).standard_normal(4)
    b = sample_rng(3, 5).standard_normal(4)
    c = sample_rng(3, 6).standard_normal(4)
    assert np.array_equal(a, b) and not np.array_equal(a, c)


def test_run_suite_rejects_unknown():
    with pytest.raises(ValueError):
        run_suite("nope")


@pytest.mark.parametrize("name", ["example", "stabilizer", "classify"])
def test_suites_pass_with_other_seed(name):
    reports = SUITES[name](seed=17)
    assert reports and all(r.passed for r in reports), [r.to_dict() for r in reports if not r.passed]
