"""
The energy f(P) = 1/2 Tr([P, J]^2) on the Grassmannian and its negative gradient flow.

Points of the Grassmannian are orthogonal projections P, tangent vectors are
symmetric matrices X with {2P - I, X} = 0, and the metric is the trace
pairing <A, B> = Tr(A B^T).

The flow is integrated through the group action: the negative gradient at P
is the fundamental field of Z = -[J, [P, J]], a symmetric element of sp(V),
so each step multiplies the basis by the symplectic matrix exp(h Z).  The type
of the subspace is therefore preserved step by step, not only in the limit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
import scipy.linalg

from .darboux import j_compatible_darboux
from .errors import (
    ClassificationUnstable,
    FlavorViolation,
    NonSymmetricInput,
    NotCritical,
    StepRejected,
)
from .symplectic_core import (
    Subspace,
    Tolerances,
    TypeSignature,
    _tol,
    check_signature,
    classify,
    is_J_compatible,
    kahler_spectrum,
    orthogonal_complement,
    subspace_from_spanning,
)

__all__ = [
    "TangentVector",
    "LieAlgebraElement",
    "FlowConfig",
    "FlowSample",
    "FlowTrajectory",
    "HessianReport",
    "EnergyBounds",
    "StabilizerDimensions",
    "energy",
    "energy_trace_expansion",
    "project_to_tangent",
    "riemannian_gradient",
    "symmetry_generator",
    "fundamental_field",
    "tangent_frame",
    "hessian_at_critical",
    "hessian_block_formula",
    "hessian_matrix",
    "hessian_report",
    "expected_kernel_dim",
    "flow_step",
    "flow_run",
    "energy_bounds",
    "stabilizer_dimensions",
    "stabilizer_dimension_oracle",
]


def _comm(A, B):
    return A @ B - B @ A


def _scale(X) -> float:
    return max(1.0, float(np.max(np.abs(X), initial=0.0)))


@dataclass(frozen=True, eq=False)
class TangentVector:
    """Symmetric X at P with {2P - I, X} = 0."""

    at: Subspace
    matrix: np.ndarray

    def __post_init__(self):
        X = np.array(self.matrix, dtype=float)
        s = _scale(X)
        if np.max(np.abs(X - X.T), initial=0.0) > 1e-12 * s:
            raise NonSymmetricInput("tangent vector must be a symmetric matrix")
        R = 2 * self.at.projection - np.eye(X.shape[0])
        if np.max(np.abs(R @ X + X @ R), initial=0.0) > 1e-10 * s:
            raise ValueError("matrix does not anticommute with 2P - I; not tangent")
        X.setflags(write=False)
        object.__setattr__(self, "matrix", X)

    def norm(self) -> float:
        return float(np.linalg.norm(self.matrix))

    def inner(self, other) -> float:
        Y = other.matrix if isinstance(other, TangentVector) else np.asarray(other)
        return float(np.sum(self.matrix * Y))


@dataclass(frozen=True, eq=False)
class LieAlgebraElement:
    """xi in so(V) ("orthogonal"), sp(V) ("symplectic") or u(V, J) ("both")."""

    matrix: np.ndarray
    flavor: str = "symplectic"
    J: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        xi = np.array(self.matrix, dtype=float)
        J = self.J
        if J is None:
            n = xi.shape[0] // 2
            J = np.block([[np.zeros((n, n)), -np.eye(n)], [np.eye(n), np.zeros((n, n))]])
        s = _scale(xi)
        ok_orth = np.max(np.abs(xi + xi.T), initial=0.0) <= 1e-12 * s
        ok_symp = np.max(np.abs(xi @ J + J @ xi.T), initial=0.0) <= 1e-12 * s
        need = {"orthogonal": ok_orth, "symplectic": ok_symp, "both": ok_orth and ok_symp}
        if self.flavor not in need:
            raise ValueError(f"unknown flavor {self.flavor!r}")
        if not need[self.flavor]:
            raise FlavorViolation(f"matrix is not in the {self.flavor} Lie algebra")
        xi.setflags(write=False)
        object.__setattr__(self, "matrix", xi)
        object.__setattr__(self, "J", J)


# ---------------------------------------------------------------------------
# energy and first derivatives
# ---------------------------------------------------------------------------


def energy(W: Subspace) -> float:
    """f(W) = 1/2 Tr([P, J]^2) = 1/2 |[P, J]|_F^2."""
    C = _comm(W.projection, W.space.J)
    return 0.5 * float(np.sum(C * C))


def energy_trace_expansion(W: Subspace) -> float:
    """The same energy written as k + Tr(P J P J)."""
    PJ = W.projection @ W.space.J
    return W.k + float(np.trace(PJ @ PJ))


def project_to_tangent(W: Subspace, A) -> TangentVector:
    """pr_P(A) = [P, [P, A]] for symmetric A."""
    A = np.asarray(A, dtype=float)
    if np.max(np.abs(A - A.T), initial=0.0) > 1e-12 * _scale(A):
        raise NonSymmetricInput("project_to_tangent expects a symmetric matrix")
    P = W.projection
    X = _comm(P, _comm(P, A))
    return TangentVector(W, 0.5 * (X + X.T))


def _generator(W: Subspace) -> np.ndarray:
    P, J = W.projection, W.space.J
    return -_comm(J, _comm(P, J))


def _gradient_matrix(P, Z) -> np.ndarray:
    G = -_comm(P, _comm(P, Z))
    return 0.5 * (G + G.T)


def riemannian_gradient(W: Subspace) -> TangentVector:
    """grad f = [P, [P, [J, [P, J]]]]."""
    return TangentVector(W, _gradient_matrix(W.projection, _generator(W)))


def symmetry_generator(W: Subspace) -> LieAlgebraElement:
    """Z = -[J, [P, J]]: symmetric, in sp(V), with fundamental field -grad f."""
    Z = _generator(W)
    return LieAlgebraElement(0.5 * (Z + Z.T), "symplectic", W.space.J)


def fundamental_field(xi: LieAlgebraElement, W: Subspace) -> TangentVector:
    """Velocity of t -> exp(t xi) W as a projection: -1/2 [P, xi - xi^T] + 1/2 [P, [P, xi + xi^T]]."""
    P = W.projection
    X = xi.matrix
    V = -0.5 * _comm(P, X - X.T) + 0.5 * _comm(P, _comm(P, X + X.T))
    return TangentVector(W, 0.5 * (V + V.T))


def tangent_frame(W: Subspace) -> list[np.ndarray]:
    """Trace-orthonormal basis of T_P Gr: (u_i w_j^T + w_j u_i^T)/sqrt(2), u in W^perp, w in W."""
    Bp = orthogonal_complement(W).basis
    B = W.basis
    frame = []
    for i in range(Bp.shape[1]):
        for j in range(B.shape[1]):
            M = np.outer(Bp[:, i], B[:, j])
            frame.append((M + M.T) / math.sqrt(2.0))
    return frame


# ---------------------------------------------------------------------------
# second derivatives at critical points
# ---------------------------------------------------------------------------


def _require_critical(W: Subspace, grad_tol: float, tol: Tolerances | None) -> None:
    g = np.linalg.norm(_gradient_matrix(W.projection, _generator(W)))
    if g > grad_tol:
        raise NotCritical(f"gradient norm {g:.3g} exceeds {grad_tol:g}")
    if not is_J_compatible(W, tol).compatible:
        raise NotCritical("subspace is not J-compatible")


def _hessian_apply(P, J, Y):
    G = _comm(J, _comm(P, J))
    H = _comm(P, _comm(P, _comm(J, _comm(Y, J)))) + _comm(P, _comm(Y, G))
    return 0.5 * (H + H.T)


def hessian_at_critical(
    W: Subspace, Y, grad_tol: float = 1e-10, tol: Tolerances | None = None
) -> TangentVector:
    """Hess f(Y) = [P, [P, [J, [Y, J]]]] + [P, [Y, [J, [P, J]]]] at a critical P."""
    _require_critical(W, grad_tol, tol)
    Ym = Y.matrix if isinstance(Y, TangentVector) else np.asarray(Y, dtype=float)
    return TangentVector(W, _hessian_apply(W.projection, W.space.J, Ym))


def hessian_block_formula(
    W: Subspace, Y, grad_tol: float = 1e-10, tol: Tolerances | None = None
) -> TangentVector:
    """Hessian through the block form in a basis adapted to W0 ⊕ W+^J ⊕ JW0 ⊕ W-^J.

    With Y = (A, B, C, D) in Hom(W0, JW0) ⊕ Hom(W+^J, JW0) ⊕ Hom(W0, W-^J) ⊕
    Hom(W+^J, W-^J), the image is (2(A^T - A), 0, 0, 2(D + J_- D J_+)).
    """
    _require_critical(W, grad_tol, tol)
    basis = j_compatible_darboux(W, tol)
    J = W.space.J
    Q0 = basis.e0
    Qp = np.hstack([basis.eplus, basis.fplus])
    Qd = J @ Q0
    Qm = np.hstack([basis.eminus, basis.fminus])
    Jp = Qp.T @ J @ Qp
    Jm = Qm.T @ J @ Qm
    Ym = Y.matrix if isinstance(Y, TangentVector) else np.asarray(Y, dtype=float)
    A = Qd.T @ Ym @ Q0
    D = Qm.T @ Ym @ Qp
    Hd = Qd @ (2 * (A.T - A)) @ Q0.T + Qm @ (2 * (D + Jm @ D @ Jp)) @ Qp.T
    return TangentVector(W, Hd + Hd.T)


def hessian_matrix(
    W: Subspace, frame=None, grad_tol: float = 1e-10, tol: Tolerances | None = None
) -> np.ndarray:
    """Matrix <E_a, Hess E_b> on a tangent frame (tangent_frame(W) by default)."""
    _require_critical(W, grad_tol, tol)
    if frame is None:
        frame = tangent_frame(W)
    P, J = W.projection, W.space.J
    images = [_hessian_apply(P, J, E) for E in frame]
    return np.array([[float(np.sum(Ea * HEb)) for HEb in images] for Ea in frame]).reshape(
        len(frame), len(frame)
    )


def expected_kernel_dim(sig) -> int:
    """dim U(n) - dim(O(n0) x U(n+) x U(n-)): the dimension of the critical manifold."""
    n0, p, m = check_signature(sig)
    n = n0 + p + m
    return n * n - n0 * (n0 - 1) // 2 - p * p - m * m


@dataclass(frozen=True)
class HessianReport:
    eigenvalues: tuple[float, ...]
    kernel_dim: int
    expected_kernel_dim: int
    asymmetry: float

    @property
    def ok(self) -> bool:
        return self.kernel_dim == self.expected_kernel_dim


def hessian_report(
    W: Subspace,
    grad_tol: float = 1e-10,
    kernel_tol: float = 1e-8,
    tol: Tolerances | None = None,
) -> HessianReport:
    H = hessian_matrix(W, grad_tol=grad_tol, tol=tol)
    lam = np.linalg.eigvalsh(0.5 * (H + H.T)) if H.size else np.zeros(0)
    return HessianReport(
        eigenvalues=tuple(float(x) for x in lam),
        kernel_dim=int(np.sum(np.abs(lam) < kernel_tol)),
        expected_kernel_dim=expected_kernel_dim(classify(W, tol)),
        asymmetry=float(np.max(np.abs(H - H.T), initial=0.0)),
    )


# ---------------------------------------------------------------------------
# bounds and stabilizers
# ---------------------------------------------------------------------------


class EnergyBounds(NamedTuple):
    lower: int
    upper: int
    strict_upper: bool


def energy_bounds(sig, k: int | None = None, n: int | None = None) -> EnergyBounds:
    """n0 <= f <= min(k, 2n - k), the upper bound strict when n+ > max(0, k - n)."""
    sig = check_signature(sig, n=n, k=k)
    k, n = sig.k, sig.n
    return EnergyBounds(sig.n0, min(k, 2 * n - k), sig.nplus > max(0, k - n))


class StabilizerDimensions(NamedTuple):
    dim_H: int
    dim_Levi: int
    dim_total: int
    dim_unitary_stab: int


def stabilizer_dimensions(sig) -> StabilizerDimensions:
    n0, p, m = check_signature(sig)
    dim_H = 2 * n0 * (p + m) + n0 * (n0 + 1) // 2
    dim_levi = n0 * n0 + p * (2 * p + 1) + m * (2 * m + 1)
    return StabilizerDimensions(
        dim_H, dim_levi, dim_H + dim_levi, n0 * (n0 - 1) // 2 + p * p + m * m
    )


def stabilizer_dimension_oracle(
    W: Subspace, rank_tol: float = 1e-9, instability_factor: float = 10.0
) -> int:
    """dim {xi in sp(V) : (I - P) xi P = 0}, by a nullspace computation.

    sp(V) = {xi : xi J + J xi^T = 0} is parametrized as xi = J S with S
    symmetric, so the unknowns are the n(2n + 1) entries of S on and above
    the diagonal and the system is (I - P) J S P = 0.
    """
    d = W.space.dim
    J, P = W.space.J, W.projection
    L = (np.eye(d) - P) @ J
    cols = []
    for a in range(d):
        for b in range(a, d):
            # L (e_a e_b^T + e_b e_a^T) P without forming S
            M = np.outer(L[:, a], P[b]) + (np.outer(L[:, b], P[a]) if a != b else 0.0)
            cols.append(M.ravel())
    A = np.array(cols).T
    s = np.linalg.svd(A, compute_uv=False)
    cut = rank_tol * max(s[0], 1.0)
    near = s[(s > cut / instability_factor) & (s < cut * instability_factor)]
    if near.size:
        raise ClassificationUnstable(f"singular value {near[0]:.3g} too close to the rank cut")
    return A.shape[1] - int(np.sum(s >= cut))


# ---------------------------------------------------------------------------
# gradient flow
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FlowConfig:
    """Step-size control for flow_run.

    Starting step ``step`` is halved (``shrink``) whenever the energy goes up
    by more than ``energy_slack``, doubled after ``grow_after`` accepted steps
    in a row, and capped at ``max_step``.  A run converges when
    |grad| < grad_tol and f is within ``integrality_tol`` of an integer.
    """

    step: float = 0.1
    grad_tol: float = 1e-10
    max_steps: int = 100_000
    shrink: float = 0.5
    record_every: int = 1
    grow_after: int = 20
    max_step: float = 1.0
    min_step: float = 1e-14
    energy_slack: float = 1e-12
    integrality_tol: float = 1e-6

    def __post_init__(self):
        for name in ("step", "grad_tol", "max_steps", "shrink", "record_every", "grow_after",
                     "max_step", "min_step", "integrality_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"FlowConfig.{name} must be positive")
        if self.energy_slack < 0:
            raise ValueError("FlowConfig.energy_slack must be non-negative")
        if not self.shrink < 1:
            raise ValueError("FlowConfig.shrink must be < 1")


@dataclass(frozen=True)
class FlowSample:
    step: int
    t: float
    basis: np.ndarray = field(repr=False)
    f: float
    grad_norm: float
    signature: TypeSignature
    min_angle: float
    residual: float


@dataclass(eq=False)
class FlowTrajectory:
    samples: list[FlowSample]
    limit: Subspace
    converged: bool
    steps: int = 0
    rejected: int = 0
    reason: str = ""

    @property
    def f_limit(self) -> float:
        return self.samples[-1].f

    def invariant_violations(self, slack: float = 1e-12) -> list[str]:
        """Monotone energy and constant type along the recorded samples."""
        out = []
        for a, b in zip(self.samples, self.samples[1:]):
            if b.f > a.f + slack:
                out.append(f"energy rose from {a.f!r} to {b.f!r} at step {b.step}")
            if b.signature != a.signature:
                out.append(f"type changed from {a.signature} to {b.signature} at step {b.step}")
        return out


def _sample(W: Subspace, step: int, t: float, f: float, gnorm: float, tol) -> FlowSample:
    spec = kahler_spectrum(W, tol)
    comp = is_J_compatible(W, tol)
    return FlowSample(
        step=step,
        t=t,
        basis=W.basis,
        f=f,
        grad_norm=gnorm,
        signature=classify(W, tol),
        min_angle=min(spec.angles) if spec.angles else float("nan"),
        residual=comp.residual,
    )


def _advance(W: Subspace, Z: np.ndarray, h: float) -> Subspace:
    return subspace_from_spanning(W.space, scipy.linalg.expm(h * Z) @ W.basis)


def flow_step(W: Subspace, h: float, energy_slack: float = 1e-12) -> Subspace:
    """One Lie-Euler step W -> exp(h Z(W)) W, re-orthonormalized.

    Raises StepRejected when the energy increases by more than energy_slack.
    """
    if not h > 0:
        raise ValueError("step size must be positive")
    f0 = energy(W)
    Wn = _advance(W, _generator(W), h)
    f1 = energy(Wn)
    if f1 > f0 + energy_slack:
        raise StepRejected(f0, f1, h)
    return Wn


def flow_run(W0: Subspace, cfg: FlowConfig | None = None, tol: Tolerances | None = None) -> FlowTrajectory:
    """Integrate the negative gradient flow from W0 until |grad| < cfg.grad_tol.

    A run that hits ``max_steps`` (accepted plus rejected steps) comes back
    with ``converged=False`` and the partial trajectory.
    """
    cfg = cfg or FlowConfig()
    tol = _tol(tol)
    W = W0
    h = cfg.step
    t = 0.0
    f = energy(W)
    Z = _generator(W)
    gnorm = float(np.linalg.norm(_gradient_matrix(W.projection, Z)))
    samples = [_sample(W, 0, t, f, gnorm, tol)]
    accepted = rejected = streak = 0
    converged = False
    reason = "max_steps"
    while True:
        if gnorm < cfg.grad_tol:
            if abs(f - round(f)) < cfg.integrality_tol:
                converged, reason = True, "grad_tol"
            else:
                reason = "stalled off an integer level"
            break
        if accepted + rejected >= cfg.max_steps:
            break
        if h < cfg.min_step:
            reason = "step size underflow"
            break
        Wn = _advance(W, Z, h)
        fn = energy(Wn)
        if fn > f + cfg.energy_slack:
            rejected += 1
            streak = 0
            h *= cfg.shrink
            continue
        W, f = Wn, fn
        t += h
        accepted += 1
        streak += 1
        if streak >= cfg.grow_after:
            h = min(2.0 * h, cfg.max_step)
            streak = 0
        Z = _generator(W)
        gnorm = float(np.linalg.norm(_gradient_matrix(W.projection, Z)))
        if accepted % cfg.record_every == 0:
            samples.append(_sample(W, accepted, t, f, gnorm, tol))
    if samples[-1].step != accepted:
        samples.append(_sample(W, accepted, t, f, gnorm, tol))
    return FlowTrajectory(samples, W, converged, accepted, rejected, reason)
