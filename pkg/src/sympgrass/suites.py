"""
Verification suites: each compares a closed-form computation with an
independent oracle over a seeded sample and returns OracleReport records.

The CLI ``verify`` command and the acceptance tests both run these, so the
thresholds below are the ones the package is held to.
"""

from __future__ import annotations

import math

import numpy as np

from .darboux import (
    Splitting,
    canonical_splitting,
    construct_subspace_of_type,
    darboux_check,
    j_compatible_darboux,
    random_symplectic,
    random_unitary,
    relative_darboux_basis,
    totally_real_darboux,
)
from .energy_flow import (
    FlowConfig,
    FlowTrajectory,
    energy,
    energy_bounds,
    expected_kernel_dim,
    flow_run,
    hessian_at_critical,
    hessian_block_formula,
    hessian_report,
    riemannian_gradient,
    stabilizer_dimension_oracle,
    stabilizer_dimensions,
)
from .oracles import (
    OracleReport,
    fd_directional_derivative,
    fd_gradient,
    fd_hessian,
    oracle_frame,
    pairing_rank_classifier,
    worked_example_energy,
    worked_example_family,
    worked_example_projection,
)
from .symplectic_core import (
    Subspace,
    TypeSignature,
    classify,
    is_J_compatible,
    isotropic_kernel,
    kahler_spectrum,
    make_standard_space,
    max_complex_subspace,
    projection_distance,
    random_subspace,
    signatures,
    subspace_from_spanning,
)

__all__ = ["SUITES", "run_suite", "sample_rng", "sample_seed", "flow_starts"]


def sample_seed(seed: int, i: int) -> np.random.SeedSequence:
    """Seed for sample i of a run with master seed ``seed``; independent of the other samples."""
    return np.random.SeedSequence([int(seed), int(i)])


def sample_rng(seed: int, i: int) -> np.random.Generator:
    return np.random.default_rng(sample_seed(seed, i))


def _report(name, abs_errs, rel_errs, tol, seed, detail="", use_abs=False, passed=None):
    a = max(abs_errs, default=0.0)
    r = max(rel_errs, default=0.0)
    if passed is None:
        passed = (a if use_abs else r) < tol
    return OracleReport(name, float(a), float(r), len(abs_errs), bool(passed), seed, detail)


def _nontrivial(n: int) -> list[TypeSignature]:
    return [s for s in signatures(n) if 0 < s.k < 2 * n]


def _all_types(nmax: int) -> list[tuple[int, TypeSignature]]:
    return [(n, s) for n in range(1, nmax + 1) for s in signatures(n)]


def _unitary_image(W: Subspace, rng) -> Subspace:
    return subspace_from_spanning(W.space, random_unitary(W.space, rng) @ W.basis)


# ---------------------------------------------------------------------------


def suite_example(seed: int = 0) -> list[OracleReport]:
    """The hyperbolic family W(t) = g(t) span{e1, f1} in R^4."""
    ts = [0.25 * i for i in range(13)]
    e_f, e_sq, e_p = [], [], []
    for t in ts:
        W = worked_example_family(t)
        P, J = W.projection, W.space.J
        C = P @ J - J @ P
        e_f.append(abs(energy(W) - worked_example_energy(t)))
        e_sq.append(float(np.max(np.abs(C @ C - math.tanh(2 * t) ** 2 * np.eye(4)))))
        e_p.append(float(np.max(np.abs(P - worked_example_projection(t)))))
    out = [
        _report("example.energy", e_f, e_f, 1e-10, seed, use_abs=True),
        _report("example.commutator_square", e_sq, e_sq, 1e-10, seed, use_abs=True),
        _report("example.projection", e_p, e_p, 1e-12, seed, use_abs=True),
    ]
    W20 = worked_example_family(20.0)
    rank = isotropic_kernel(W20).k
    err = abs(energy(W20) - 2.0)
    out.append(
        _report(
            "example.lagrangian_limit",
            [abs(rank - 2), err],
            [abs(rank - 2), err],
            1e-10,
            seed,
            detail=f"isotropic kernel rank {rank} at t=20",
            passed=(rank == 2 and err < 1e-10),
        )
    )
    W1 = worked_example_family(1.0)
    G = riemannian_gradient(W1).matrix
    Gfd = fd_gradient(W1).matrix
    a = float(np.linalg.norm(G - Gfd))
    out.append(_report("example.gradient_fd", [a], [a / np.linalg.norm(G)], 1e-6, seed))
    traj = flow_run(W1)
    types = {s.signature for s in traj.samples}
    out.append(
        _report(
            "example.flow_to_complex",
            [traj.f_limit],
            [traj.f_limit],
            1e-8,
            seed,
            detail=f"{traj.steps} steps, types seen {sorted(map(str, types))}",
            passed=traj.converged and traj.f_limit < 1e-8 and types == {TypeSignature(0, 1, 1)},
            use_abs=True,
        )
    )
    return out


def suite_gradient(seed: int = 0, count: int = 200, directions: int = 10, h: float = 1e-5):
    """Closed-form directional derivatives against central differences.

    The relative error divides by max(|grad|, 1) |Y|: f is of order one, and
    on subspaces where f is constant (lines, for instance) the gradient is
    exactly zero.
    """
    abs_e, rel_e, tangency = [], [], []
    for i in range(count):
        rng = sample_rng(seed, i)
        n = int(rng.choice([2, 3, 4]))
        k = int(rng.integers(1, 2 * n))
        W = random_subspace(make_standard_space(n), k, rng)
        G = riemannian_gradient(W)
        R = 2 * W.projection - np.eye(2 * n)
        tangency.append(float(np.max(np.abs(R @ G.matrix + G.matrix @ R))))
        gn = max(G.norm(), 1.0)
        Bp, _ = oracle_frame(W)
        for _ in range(directions):
            Y = rng.standard_normal((2 * n - k, k))
            M = Bp @ Y @ W.basis.T
            X = M + M.T
            d = abs(fd_directional_derivative(W, Y, h, Bp) - G.inner(X))
            abs_e.append(d)
            rel_e.append(d / (gn * np.linalg.norm(X)))
    return [
        _report("gradient.directional_fd", abs_e, rel_e, 1e-6, seed),
        _report("gradient.tangency", tangency, tangency, 1e-10, seed, use_abs=True),
    ]


def _mixed_sample(seed: int, i: int, nmax: int = 4) -> Subspace:
    """Even i: a uniformly random subspace; odd i: a random symplectic image of a type."""
    rng = sample_rng(seed, i)
    n = int(rng.integers(1, nmax + 1))
    sp = make_standard_space(n)
    if i % 2 == 0:
        return random_subspace(sp, int(rng.integers(1, 2 * n)), rng)
    sigs = _nontrivial(n)
    sig = sigs[int(rng.integers(len(sigs)))]
    return construct_subspace_of_type(sp, sig, mode="randomized", seed=rng)


def suite_classify(seed: int = 0, count: int = 100) -> list[OracleReport]:
    """Pairing-rank classifier agreement and the energy decomposition f = n0 + sum 2 sin^2."""
    mism = []
    for n, sig in _all_types(4):
        for mode, s in (("coordinate", None), ("randomized", sample_seed(seed, 10_000 + len(mism)))):
            W = construct_subspace_of_type(make_standard_space(n), sig, mode=mode, seed=s)
            got = pairing_rank_classifier(W, sample_rng(seed, 20_000 + len(mism)))
            mism.append(float(got != classify(W) or got != sig))
    for i in range(count):
        W = _mixed_sample(seed, i)
        mism.append(float(pairing_rank_classifier(W, sample_rng(seed, 30_000 + i)) != classify(W)))
    dec = []
    for i in range(count):
        W = _mixed_sample(seed, 40_000 + i)
        spec = kahler_spectrum(W)
        dec.append(abs(energy(W) - (spec.n0 + sum(2 * math.sin(t) ** 2 for t in spec.angles))))
    return [
        _report("classify.pairing_rank_agreement", mism, mism, 0.5, seed, use_abs=True,
                detail=f"{int(sum(mism))} disagreements"),
        _report("classify.energy_decomposition", dec, dec, 1e-9, seed, use_abs=True),
    ]


def suite_bounds(seed: int = 0, count: int = 300) -> list[OracleReport]:
    """Integer critical values at coordinate representatives and n0 <= f <= min(k, 2n - k)."""
    e_f, e_g = [], []
    for n, sig in _all_types(4):
        W = construct_subspace_of_type(make_standard_space(n), sig)
        e_f.append(abs(energy(W) - sig.n0))
        e_g.append(riemannian_gradient(W).norm())
    out = [
        _report("bounds.critical_integrality", e_f + e_g, e_f + e_g, 1e-12, seed, use_abs=True),
    ]
    viol, strict_fail = [], 0
    for i in range(count):
        W = _mixed_sample(seed, 50_000 + i)
        sig = classify(W)
        lo, hi, strict = energy_bounds(sig)
        f = energy(W)
        viol.append(max(0.0, lo - f, f - hi))
        if strict and not f < hi:
            strict_fail += 1
    out.append(
        _report("bounds.energy_bounds", viol, viol, 1e-12, seed, use_abs=True,
                detail=f"{strict_fail} strict-bound failures",
                passed=max(viol) <= 1e-12 and strict_fail == 0)
    )
    return out


def suite_hessian(seed: int = 0, nmax: int = 3) -> list[OracleReport]:
    """Closed-form Hessian at coordinate critical points against second differences."""
    fd_abs, fd_rel, kern, block, sym = [], [], [], [], []
    bad_kernel = []
    for n, sig in _all_types(nmax):
        W = construct_subspace_of_type(make_standard_space(n), sig)
        rep = hessian_report(W)
        kern.append(abs(rep.kernel_dim - expected_kernel_dim(sig)))
        if rep.kernel_dim != rep.expected_kernel_dim:
            bad_kernel.append(str(sig))
        sym.append(rep.asymmetry)
        H_fd, frame = fd_hessian(W)
        if not frame:
            continue
        images = [hessian_at_critical(W, E).matrix for E in frame]
        H = np.array([[float(np.sum(Ea * HEb)) for HEb in images] for Ea in frame])
        a = float(np.max(np.abs(H - H_fd)))
        fd_abs.append(a)
        fd_rel.append(a / max(float(np.max(np.abs(H))), 1.0))
        # block formula on a random unitary image, so the adapted basis is not the standard one
        Wu = _unitary_image(W, sample_rng(seed, len(block)))
        for E in oracle_frame_tangents(Wu):
            block.append(float(np.max(np.abs(
                hessian_at_critical(Wu, E).matrix - hessian_block_formula(Wu, E).matrix))))
    # the complex line span{e1, f1} in R^4
    W = construct_subspace_of_type(make_standard_space(2), (0, 1, 1))
    lam = np.array(hessian_report(W).eigenvalues)
    H_fd, _ = fd_hessian(W)
    lam_fd = np.linalg.eigvalsh(H_fd)
    top = np.concatenate([np.sort(lam)[-2:], np.sort(lam_fd)[-2:]])
    line_err = np.abs(top - 4.0)
    return [
        _report("hessian.fd_agreement", fd_abs, fd_rel, 1e-5, seed),
        _report("hessian.kernel_dim", kern, kern, 0.5, seed, use_abs=True,
                detail="mismatched: " + ",".join(bad_kernel) if bad_kernel else ""),
        _report("hessian.block_formula", block, block, 1e-10, seed, use_abs=True),
        _report("hessian.symmetry", sym, sym, 1e-10, seed, use_abs=True),
        _report("hessian.complex_line_eigenvalues", list(line_err), list(line_err / 4), 1e-4, seed,
                use_abs=True, detail=f"nonzero eigenvalues {np.round(top, 8).tolist()}"),
    ]


def oracle_frame_tangents(W: Subspace) -> list[np.ndarray]:
    B = W.basis
    Bp, dirs = oracle_frame(W)
    out = []
    for Y in dirs:
        M = Bp @ Y @ B.T
        out.append(M + M.T)
    return out


def _span_dist(W: Subspace, *blocks) -> float:
    M = np.hstack(blocks)
    if M.shape[1] == 0:
        return 0.0 if W.k == 0 else math.inf
    if W.k == 0:
        return math.inf
    return projection_distance(W, subspace_from_spanning(W.space, M))


def suite_darboux(seed: int = 0, nmax: int = 4) -> list[OracleReport]:
    """The three Darboux constructions: pairing identities and adaptation to the input spans."""
    dev_rel, ad_rel = [], []
    dev_tr, ad_tr, ang_tr, full_tr = [], [], [], []
    dev_j, ad_j = [], []
    for idx, (n, sig) in enumerate(_all_types(nmax)):
        sp = make_standard_space(n)
        Wc = construct_subspace_of_type(sp, sig)
        # canonical splitting of a randomized representative
        W = construct_subspace_of_type(sp, sig, mode="randomized", seed=sample_seed(seed, idx))
        s = canonical_splitting(W)
        # a non-canonical splitting: transport the coordinate one by a symplectic matrix
        g = random_symplectic(sp, sample_rng(seed, 1000 + idx))
        Wg = subspace_from_spanning(sp, g @ Wc.basis)
        sc = canonical_splitting(Wc)

        def move(V):
            return subspace_from_spanning(sp, g @ V.basis) if V.k else V

        sg = Splitting(move(sc.Wplus), move(sc.Wminus), move(sc.W0dual))
        for Wx, sx in ((W, s), (Wg, sg)):
            b = relative_darboux_basis(Wx, sx)
            dev_rel.append(darboux_check(b).max_deviation)
            ad = [_span_dist(isotropic_kernel(Wx), b.e0)]
            if sx.W0dual.k:
                ad.append(_span_dist(sx.W0dual, b.f0))
            if sx.Wplus.k:
                ad.append(_span_dist(sx.Wplus, b.eplus, b.fplus))
            if sx.Wminus.k:
                ad.append(_span_dist(sx.Wminus, b.eminus, b.fminus))
            ad_rel.append(max(ad))
        # J-compatible: random unitary image of the coordinate representative
        Wu = _unitary_image(Wc, sample_rng(seed, 2000 + idx))
        b = j_compatible_darboux(Wu)
        dev_j.append(max(darboux_check(b).max_deviation,
                         float(np.max(np.abs(b.E.T @ b.E - np.eye(n))))))
        ad = []
        if sig.n0:
            ad.append(_span_dist(isotropic_kernel(Wu), b.e0))
        if sig.nplus:
            ad.append(_span_dist(max_complex_subspace(Wu), b.eplus, b.fplus))
        ad_j.append(max(ad, default=0.0))
        # totally real: half-dimensional symplectic subspaces with every angle in (0, pi/2)
        if n % 2 == 0 and sig == (0, n // 2, n // 2):
            for r in range(3):
                Wt = _totally_real_sample(sp, sample_rng(seed, 3000 + 10 * idx + r))
                b = totally_real_darboux(Wt)
                dev_tr.append(darboux_check(b).max_deviation)
                ad_tr.append(_span_dist(Wt, b.eplus, b.fplus))
                full_tr.append(_scaled_deviation(totally_real_darboux(Wt, include_complement=True)))
                ang = sorted(kahler_spectrum(Wt).angles)
                ang_tr.append(float(np.max(np.abs(np.array(ang) - np.array(b.angles)))))
    return [
        _report("darboux.relative.pairing", dev_rel, dev_rel, 1e-10, seed, use_abs=True),
        _report("darboux.relative.adaptation", ad_rel, ad_rel, 1e-9, seed, use_abs=True),
        _report("darboux.j_compatible.pairing", dev_j, dev_j, 1e-10, seed, use_abs=True),
        _report("darboux.j_compatible.adaptation", ad_j, ad_j, 1e-9, seed, use_abs=True),
        _report("darboux.totally_real.pairing", dev_tr, dev_tr, 1e-10, seed, use_abs=True),
        _report("darboux.totally_real.adaptation", ad_tr, ad_tr, 1e-9, seed, use_abs=True),
        _report("darboux.totally_real.angles", ang_tr, ang_tr, 1e-8, seed, use_abs=True),
        _report("darboux.totally_real.full_basis_scaled", full_tr, full_tr, 1e-12, seed, use_abs=True),
    ]


def _totally_real_sample(sp, rng, min_cos: float = 0.02) -> Subspace:
    """A random n-dimensional subspace with every Kahler angle in (0, arccos(min_cos)].

    The construction scales f_j by sec(theta_j), so absolute omega-errors grow
    like sec^2(theta_j) * eps; samples with an angle closer to pi/2 than the
    margin are redrawn to keep the absolute 1e-10 check meaningful.
    """
    while True:
        W = random_subspace(sp, sp.n, rng)
        spec = kahler_spectrum(W)
        if spec.n0 == 0 and spec.nJ == 0 and math.cos(max(spec.angles)) >= min_cos:
            return W


def _scaled_deviation(basis) -> float:
    """max |omega(a, b) - delta| / (|a| |b|) over pairs of basis vectors."""
    sp = basis.space
    E, F = basis.E, basis.F
    m = E.shape[1]
    M = np.hstack([E, F])
    target = np.zeros((2 * m, 2 * m))
    target[:m, m:] = np.eye(m)
    target[m:, :m] = -np.eye(m)
    norms = np.linalg.norm(M, axis=0)
    G = M.T @ sp.omega.T @ M
    return float(np.max(np.abs(G - target) / np.outer(norms, norms)))


def suite_stabilizer(seed: int = 0, nmax: int = 4) -> list[OracleReport]:
    """dim of the Lie algebra of Sp_W(V): closed formula against a nullspace computation."""
    errs, bad = [], []
    for idx, (n, sig) in enumerate(_all_types(nmax)):
        sp = make_standard_space(n)
        expect = stabilizer_dimensions(sig).dim_total
        for mode in ("coordinate", "randomized"):
            W = construct_subspace_of_type(sp, sig, mode=mode, seed=sample_seed(seed, idx))
            got = stabilizer_dimension_oracle(W)
            errs.append(abs(got - expect))
            if got != expect:
                bad.append(f"{sig}/{mode}: {got} != {expect}")
    return [_report("stabilizer.dimension", errs, errs, 0.5, seed, use_abs=True,
                    detail="; ".join(bad))]


# ---------------------------------------------------------------------------
# flow
# ---------------------------------------------------------------------------


def flow_starts(seed: int = 0, count: int = 50, nmax: int = 3) -> list[tuple[TypeSignature, Subspace]]:
    """Random symplectic images of every non-trivial type with n <= nmax, cycled."""
    types = [(n, s) for n in range(1, nmax + 1) for s in _nontrivial(n)]
    out = []
    for i in range(count):
        n, sig = types[i % len(types)]
        W = construct_subspace_of_type(make_standard_space(n), sig, mode="randomized",
                                       seed=sample_seed(seed, i))
        out.append((sig, W))
    return out


def flow_checks(runs: list[tuple[Subspace, FlowTrajectory]], seed: int, min_converged: int):
    const, lim_f, lim_r, incid, mono = [], [], [], [], []
    n_conv = 0
    for W0, tr in runs:
        sig0 = classify(W0)
        const.append(float(any(s.signature != sig0 for s in tr.samples)))
        mono.append(max((b.f - a.f for a, b in zip(tr.samples, tr.samples[1:])), default=0.0))
        n0_lim = classify(tr.limit).n0
        ok = n0_lim >= sig0.n0 and (n0_lim == sig0.n0 or not tr.converged)
        incid.append(float(not ok))
        if tr.converged:
            n_conv += 1
            lim_f.append(abs(tr.f_limit - sig0.n0))
            lim_r.append(is_J_compatible(tr.limit).residual)
    return [
        _report("flow.type_preservation", const, const, 0.5, seed, use_abs=True),
        _report("flow.monotone_energy", mono, mono, 1e-12, seed, use_abs=True,
                passed=max(mono) <= 1e-12),
        _report("flow.limit_energy", lim_f, lim_f, 1e-6, seed, use_abs=True),
        _report("flow.limit_residual", lim_r, lim_r, 1e-6, seed, use_abs=True),
        _report("flow.convergence", [float(len(runs) - n_conv)], [1 - n_conv / len(runs)], 0,
                seed, detail=f"{n_conv}/{len(runs)} converged",
                passed=n_conv >= min_converged),
        _report("flow.orbit_incidence", incid, incid, 0.5, seed, use_abs=True),
    ]


def suite_flow(seed: int = 0, count: int = 50, generic: int = 10, cfg: FlowConfig | None = None):
    """Seeded flow runs over every type with n <= 3 plus a few uniformly random starts."""
    cfg = cfg or FlowConfig()
    runs = [(W, flow_run(W, cfg)) for _, W in flow_starts(seed, count)]
    for i in range(generic):
        rng = sample_rng(seed, 60_000 + i)
        n = int(rng.integers(1, 4))
        W = random_subspace(make_standard_space(n), int(rng.integers(1, 2 * n)), rng)
        runs.append((W, flow_run(W, cfg)))
    need = math.ceil(0.96 * len(runs))
    return flow_checks(runs, seed, need)


SUITES = {
    "example": suite_example,
    "gradient": suite_gradient,
    "classify": suite_classify,
    "bounds": suite_bounds,
    "hessian": suite_hessian,
    "darboux": suite_darboux,
    "stabilizer": suite_stabilizer,
    "flow": suite_flow,
}


def run_suite(name: str, seed: int = 0) -> list[OracleReport]:
    try:
        fn = SUITES[name]
    except KeyError:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}") from None
    return fn(seed=seed)
