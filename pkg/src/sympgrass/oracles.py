"""
Independent numerical checks for the closed-form machinery.

Nothing here calls the closed-form gradient, Hessian or classifier.  The
energy is recomputed from a spanning matrix as k + Tr(P J P J), derivatives
come from central differences along curves t -> span(B + t B_perp Y), and the
type is read off the rank of an omega-Gram matrix of a random overcomplete
spanning set.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .energy_flow import TangentVector
from .errors import NotCritical
from .symplectic_core import (
    SymplecticSpace,
    Subspace,
    TypeSignature,
    make_standard_space,
    subspace_from_spanning,
)

__all__ = [
    "OracleReport",
    "energy_from_spanning",
    "oracle_frame",
    "fd_directional_derivative",
    "fd_gradient",
    "fd_hessian",
    "pairing_rank_classifier",
    "worked_example_group",
    "worked_example_family",
    "worked_example_projection",
    "worked_example_energy",
]


@dataclass(frozen=True)
class OracleReport:
    """Outcome of one verification suite; serialized as a single JSON object."""

    name: str
    max_abs_error: float
    max_rel_error: float
    samples: int
    passed: bool
    seed: int | None = None
    detail: str = ""

    def to_dict(self) -> dict:
        d = asdict(self)
        out = {k: d[k] for k in ("name", "max_abs_error", "max_rel_error", "samples")}
        out["pass"] = d["passed"]
        out["seed"] = d["seed"]
        if d["detail"]:
            out["detail"] = d["detail"]
        return out


def _perp(B: np.ndarray) -> np.ndarray:
    Q, _ = np.linalg.qr(B, mode="complete")
    return Q[:, B.shape[1]:]


def energy_from_spanning(M, J) -> float:
    """k + Tr(P J P J) for P the orthogonal projection onto the column span of M."""
    M = np.asarray(M, dtype=float)
    P = M @ np.linalg.solve(M.T @ M, M.T)
    PJ = P @ J
    return M.shape[1] + float(np.trace(PJ @ PJ))


def oracle_frame(W: Subspace) -> tuple[np.ndarray, list[np.ndarray]]:
    """Complement basis and the coordinate directions Y_ij = e_i e_j^T / sqrt(2).

    Moving along B + t B_perp Y changes P at first order by
    B_perp Y B^T + B Y^T B_perp^T, so these Y give a trace-orthonormal frame.
    """
    B = W.basis
    Bp = _perp(B)
    dirs = []
    for i in range(Bp.shape[1]):
        for j in range(B.shape[1]):
            Y = np.zeros((Bp.shape[1], B.shape[1]))
            Y[i, j] = 1.0 / math.sqrt(2.0)
            dirs.append(Y)
    return Bp, dirs


def _lift(B, Bp, Y) -> np.ndarray:
    """Tangent matrix at P = B B^T of the curve span(B + t Bp Y)."""
    M = Bp @ Y @ B.T
    return M + M.T


def fd_directional_derivative(W: Subspace, Y, h: float = 1e-5, Bp=None) -> float:
    """Central difference of f along span(B + t B_perp Y) at t = 0."""
    B, J = W.basis, W.space.J
    Bp = _perp(B) if Bp is None else Bp
    D = Bp @ np.asarray(Y, dtype=float)
    return (energy_from_spanning(B + h * D, J) - energy_from_spanning(B - h * D, J)) / (2 * h)


def fd_gradient(W: Subspace, h: float = 1e-5) -> TangentVector:
    """Gradient assembled from central differences along an orthonormal frame."""
    if not 0 < h <= 1e-3:
        raise ValueError("finite-difference step must lie in (0, 1e-3]")
    B = W.basis
    Bp, dirs = oracle_frame(W)
    G = np.zeros((W.space.dim, W.space.dim))
    for Y in dirs:
        G += fd_directional_derivative(W, Y, h, Bp) * _lift(B, Bp, Y)
    return TangentVector(W, G)


def fd_hessian(
    W: Subspace, h: float = 1e-4, grad_tol: float = 1e-6
) -> tuple[np.ndarray, list[np.ndarray]]:
    """Second differences of f in the oracle frame.

    Returns the matrix H[a, b] and the frame as symmetric tangent matrices.
    Second differences only see the Hessian when the first derivative
    vanishes, so a finite-difference gradient above ``grad_tol`` raises
    NotCritical.
    """
    g = fd_gradient(W).norm()
    if g > grad_tol:
        raise NotCritical(f"finite-difference gradient norm {g:.3g} exceeds {grad_tol:g}")
    B, J = W.basis, W.space.J
    Bp, dirs = oracle_frame(W)
    D = [Bp @ Y for Y in dirs]
    m = len(D)
    H = np.zeros((m, m))

    def f(M):
        return energy_from_spanning(M, J)

    for a in range(m):
        for b in range(a, m):
            pp = f(B + h * (D[a] + D[b]))
            pm = f(B + h * (D[a] - D[b]))
            mp = f(B - h * (D[a] - D[b]))
            mm = f(B - h * (D[a] + D[b]))
            H[a, b] = H[b, a] = (pp - pm - mp + mm) / (4 * h * h)
    return H, [_lift(B, Bp, Y) for Y in dirs]


def pairing_rank_classifier(
    W: Subspace, rng=None, extra: int = 3, rank_tol: float = 1e-9
) -> TypeSignature:
    """Type from the rank of the omega-Gram matrix of a random spanning set.

    The spanning set is B R for a random well-conditioned k x k matrix R plus
    ``extra`` random combinations, so the computation never sees an
    orthonormal basis.  n0 = k - rank, and (n - n0 - (k - n0)/2) etc. follow
    from k and n.
    """
    rng = np.random.default_rng(rng)
    B = W.basis
    k, n = W.k, W.n
    if k == 0:
        return TypeSignature(0, 0, n)
    Q, _ = np.linalg.qr(rng.standard_normal((k, k)))
    R = Q @ np.diag(rng.uniform(0.5, 2.0, size=k))
    M = np.hstack([B @ R, B @ rng.standard_normal((k, extra))])
    G = M.T @ W.space.omega.T @ M
    s = np.linalg.svd(G, compute_uv=False)
    scale = np.linalg.norm(M, 2) ** 2
    rank = int(np.sum(s > rank_tol * scale))
    n0 = k - rank
    nplus = (k - n0) // 2
    return TypeSignature(n0, nplus, n - n0 - nplus)


# ---------------------------------------------------------------------------
# the hyperbolic family in R^4
# ---------------------------------------------------------------------------


def worked_example_group(t: float) -> np.ndarray:
    """g(t) = exp(t X) for the symmetric symplectic X swapping e1<->f2 and e2<->f1."""
    c, s = math.cosh(t), math.sinh(t)
    return np.array(
        [[c, 0, 0, s],
         [0, c, s, 0],
         [0, s, c, 0],
         [s, 0, 0, c]]
    )


def worked_example_family(t: float, space: SymplecticSpace | None = None) -> Subspace:
    """W(t) = g(t) span{e1, f1}."""
    space = space or make_standard_space(2)
    g = worked_example_group(t)
    return subspace_from_spanning(space, g[:, [0, 2]])


def worked_example_projection(t: float) -> np.ndarray:
    """Projection onto W(t) from its two orthogonal spanning vectors."""
    c, s = math.cosh(t), math.sinh(t)
    v1 = np.array([c, 0.0, 0.0, s])
    v2 = np.array([0.0, s, c, 0.0])
    return (np.outer(v1, v1) + np.outer(v2, v2)) / math.cosh(2 * t)


def worked_example_energy(t: float) -> float:
    """f(W(t)) = 2 tanh^2(2t); also [P, J]^2 = tanh^2(2t) I."""
    return 2.0 * math.tanh(2 * t) ** 2
