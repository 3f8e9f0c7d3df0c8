"""
Linear algebra of subspaces in the standard symplectic space.

The ambient space is R^{2n} with coordinates (x_1..x_n, y_1..y_n),

    omega = J = [[0, -I], [I, 0]],   omega(u, v) = v^T omega u,

so that g(u, v) = omega(u, J v) is the ordinary dot product.  Subspaces are
stored through an orthonormal basis and the orthogonal projection onto them.

Everything that depends on how W sits relative to J is read off one small
matrix: the k x k skew matrix T = B^T J B of a basis B.  Its rank gives the
isotropic kernel, and S = -T^2 = T^T T has eigenvalues cos^2 of the Kahler
angles (1 on the complex part, 0 on the isotropic kernel).
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import (
    ClassificationUnstable,
    InconsistentSignature,
    NotApplicable,
    RankDeficient,
    SpectrumPairingFailure,
)

__all__ = [
    "Tolerances",
    "DEFAULT_TOLERANCES",
    "SymplecticSpace",
    "Subspace",
    "TypeSignature",
    "KahlerSpectrum",
    "Compatibility",
    "make_standard_space",
    "subspace_from_spanning",
    "subspace_from_basis",
    "coordinate_subspace",
    "random_subspace",
    "orthogonal_complement",
    "symplectic_complement",
    "intersect",
    "isotropic_kernel",
    "max_complex_subspace",
    "classify",
    "kahler_spectrum",
    "is_J_compatible",
    "min_complex_check",
    "omega_gram",
    "projection_distance",
    "check_signature",
    "signatures",
]


@dataclass(frozen=True)
class Tolerances:
    """Numerical cuts used to turn exact notions (rank, eigenvalue 1) into decisions.

    rank : singular values of B^T J B below this count as zero.  Since B is
        orthonormal and J orthogonal these singular values lie in [0, 1], so the
        cut is absolute.
    kahler : eigenvalues of S within this distance of 1 count as complex
        directions; also the clustering tolerance for pairing eigenvalues.
    instability_factor : a singular value inside (rank / factor, rank * factor)
        makes the classification ambiguous and raises ClassificationUnstable.
    """

    rank: float = 1e-9
    kahler: float = 1e-7
    instability_factor: float = 10.0


def _tolerances_from_env() -> Tolerances:
    kw = {}
    for name, var in (("rank", "SYMPGRASS_RANK_TOL"), ("kahler", "SYMPGRASS_KAHLER_TOL")):
        if var in os.environ:
            kw[name] = float(os.environ[var])
    return Tolerances(**kw)


# read once at import
DEFAULT_TOLERANCES = _tolerances_from_env()


def _tol(tol: Tolerances | None) -> Tolerances:
    return DEFAULT_TOLERANCES if tol is None else tol


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SymplecticSpace:
    """The standard model (R^{2n}, omega, J, g)."""

    n: int
    omega: np.ndarray = field(init=False, repr=False, compare=False)
    J: np.ndarray = field(init=False, repr=False, compare=False)
    metric: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"half-dimension must be a positive integer, got {self.n!r}")
        n = int(self.n)
        object.__setattr__(self, "n", n)
        eye = np.eye(n)
        zero = np.zeros((n, n))
        omega = np.block([[zero, -eye], [eye, zero]])
        object.__setattr__(self, "omega", _frozen(omega))
        object.__setattr__(self, "J", _frozen(omega))
        object.__setattr__(self, "metric", _frozen(np.eye(2 * n)))

    @property
    def dim(self) -> int:
        return 2 * self.n

    def form(self, u, v) -> float:
        """omega(u, v) = v^T omega u."""
        return float(np.asarray(v) @ self.omega @ np.asarray(u))

    def inner(self, u, v) -> float:
        """g(u, v) = omega(u, J v)."""
        return self.form(u, self.J @ np.asarray(v))

    def e(self, i: int) -> np.ndarray:
        """Standard basis vector e_i, 1-based (i = 1..n)."""
        v = np.zeros(self.dim)
        v[i - 1] = 1.0
        return v

    def f(self, i: int) -> np.ndarray:
        """Standard basis vector f_i = J e_i, 1-based (i = 1..n)."""
        return self.J @ self.e(i)


def make_standard_space(n: int) -> SymplecticSpace:
    return SymplecticSpace(n)


@dataclass(frozen=True, eq=False)
class Subspace:
    """A k-dimensional subspace of a SymplecticSpace given by an orthonormal basis.

    The basis has shape (2n, k); k = 0 is allowed.  The orthogonal projection
    is computed once and cached.
    """

    space: SymplecticSpace
    basis: np.ndarray
    projection: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        B = np.array(self.basis, dtype=float)
        if B.ndim == 1:
            B = B.reshape(-1, 1)
        if B.ndim != 2 or B.shape[0] != self.space.dim:
            raise ValueError(
                f"basis must have shape ({self.space.dim}, k), got {np.shape(self.basis)}"
            )
        if B.shape[1] > self.space.dim:
            raise ValueError("more basis vectors than the ambient dimension")
        err = np.max(np.abs(B.T @ B - np.eye(B.shape[1])), initial=0.0)
        if err > 1e-12:
            raise ValueError(f"basis is not orthonormal (max deviation {err:.3g})")
        object.__setattr__(self, "basis", _frozen(B))
        object.__setattr__(self, "projection", _frozen(B @ B.T))

    @property
    def k(self) -> int:
        return self.basis.shape[1]

    @property
    def n(self) -> int:
        return self.space.n

    def __repr__(self):
        return f"Subspace(n={self.n}, k={self.k})"


class TypeSignature(NamedTuple):
    """Orbit invariant (n0, n+, n-) of a subspace under the symplectic group."""

    n0: int
    nplus: int
    nminus: int

    @property
    def n(self) -> int:
        return self.n0 + self.nplus + self.nminus

    @property
    def k(self) -> int:
        return self.n0 + 2 * self.nplus

    @classmethod
    def parse(cls, text: str) -> "TypeSignature":
        """Parse ``"n0,n+,n-"``."""
        parts = [p.strip() for p in str(text).replace(";", ",").split(",") if p.strip()]
        if len(parts) != 3:
            raise InconsistentSignature(f"expected three integers n0,n+,n-; got {text!r}")
        try:
            vals = [int(p) for p in parts]
        except ValueError as exc:
            raise InconsistentSignature(f"non-integer signature {text!r}") from exc
        return check_signature(cls(*vals))

    def __str__(self):
        return f"({self.n0},{self.nplus},{self.nminus})"


def check_signature(sig, n: int | None = None, k: int | None = None) -> TypeSignature:
    """Validate a signature, optionally against an ambient n and dimension k."""
    sig = TypeSignature(*(int(x) for x in sig))
    if min(sig) < 0:
        raise InconsistentSignature(f"negative entry in signature {sig}")
    if n is not None and sig.n != n:
        raise InconsistentSignature(f"signature {sig} has n0+n++n- = {sig.n}, expected n = {n}")
    if k is not None and sig.k != k:
        raise InconsistentSignature(f"signature {sig} has dimension {sig.k}, expected k = {k}")
    return sig


def signatures(n: int, k: int | None = None) -> list[TypeSignature]:
    """All signatures with n0 + n+ + n- = n, ordered by n0 descending then n+."""
    out = []
    for n0 in range(n, -1, -1):
        for nplus in range(n - n0 + 1):
            sig = TypeSignature(n0, nplus, n - n0 - nplus)
            if k is None or sig.k == k:
                out.append(sig)
    return out


@dataclass(frozen=True)
class KahlerSpectrum:
    """Decomposition of the spectrum of S = -T^2 on W.

    n0 zero eigenvalues (isotropic kernel), 2*nJ unit eigenvalues (maximal
    complex subspace) and ntheta pairs cos^2(theta_j) with theta_j in (0, pi/2),
    sorted ascending.
    """

    n0: int
    nJ: int
    ntheta: int
    angles: tuple[float, ...]

    @property
    def k(self) -> int:
        return self.n0 + 2 * self.nJ + 2 * self.ntheta


class Compatibility(NamedTuple):
    compatible: bool
    residual: float


# ---------------------------------------------------------------------------
# Construction helpers
# ---------------------------------------------------------------------------


def subspace_from_spanning(space: SymplecticSpace, M, tol: Tolerances | None = None) -> Subspace:
    """Orthonormalize the columns of M (2n x k) into a Subspace.

    Raises RankDeficient if the numerical rank of M (singular values below
    ``tol.rank * sigma_max``) is smaller than k.
    """
    tol = _tol(tol)
    M = np.asarray(M, dtype=float)
    if M.ndim == 1:
        M = M.reshape(-1, 1)
    if M.shape[0] != space.dim:
        raise ValueError(f"expected {space.dim} rows, got {M.shape[0]}")
    k = M.shape[1]
    if k == 0:
        return Subspace(space, np.zeros((space.dim, 0)))
    s = np.linalg.svd(M, compute_uv=False)
    rank = int(np.sum(s > tol.rank * s[0])) if s[0] > 0 else 0
    if rank < k:
        raise RankDeficient(f"spanning matrix has numerical rank {rank} < {k} columns")
    Q, R = np.linalg.qr(M)
    # sign convention: positive diagonal of R keeps coordinate inputs unchanged
    signs = np.sign(np.diag(R))
    signs[signs == 0] = 1.0
    return Subspace(space, Q * signs)


def subspace_from_basis(space: SymplecticSpace, basis, reorthonormalize: bool = False) -> Subspace:
    """Wrap a basis that is already orthonormal, or fix it up when asked to."""
    if reorthonormalize:
        return subspace_from_spanning(space, basis)
    return Subspace(space, basis)


def coordinate_subspace(space: SymplecticSpace, columns) -> Subspace:
    """Span of standard basis vectors given by 0-based column indices."""
    columns = list(columns)
    B = np.zeros((space.dim, len(columns)))
    for j, c in enumerate(columns):
        B[c, j] = 1.0
    return Subspace(space, B)


def random_subspace(space: SymplecticSpace, k: int, rng=None) -> Subspace:
    """Gaussian random k-dimensional subspace (generic type n0 = k mod 2)."""
    rng = np.random.default_rng(rng)
    return subspace_from_spanning(space, rng.standard_normal((space.dim, k)))


def _complement_basis(B: np.ndarray, dim: int) -> np.ndarray:
    if B.shape[1] == 0:
        return np.eye(dim)
    Q, _ = np.linalg.qr(B, mode="complete")
    return Q[:, B.shape[1]:]


def orthogonal_complement(W: Subspace) -> Subspace:
    return Subspace(W.space, _complement_basis(W.basis, W.space.dim))


def symplectic_complement(W: Subspace) -> Subspace:
    """W^omega = {v : omega(v, w) = 0 for all w in W}, i.e. (J W)^perp."""
    return Subspace(W.space, _complement_basis(W.space.J @ W.basis, W.space.dim))


def omega_gram(space: SymplecticSpace, X, Y) -> np.ndarray:
    """Matrix of pairings M[i, j] = omega(x_i, y_j) for columns of X and Y."""
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    return X.T @ space.omega.T @ Y


def projection_distance(W1: Subspace, W2: Subspace) -> float:
    """Frobenius distance between orthogonal projections."""
    return float(np.linalg.norm(W1.projection - W2.projection))


def intersect(W1: Subspace, W2: Subspace, tol: Tolerances | None = None) -> Subspace:
    """W1 ∩ W2 as the eigenvalue-2 eigenspace of P1 + P2.

    The eigenvalues of P1 + P2 are 1 ± cos(phi) over principal angles phi, so
    eigenvalue 2 marks common directions; values within ``tol.rank`` of 2 are
    accepted.
    """
    tol = _tol(tol)
    if W1.space != W2.space:
        raise ValueError("subspaces live in different ambient spaces")
    if W1.k == 0 or W2.k == 0:
        return Subspace(W1.space, np.zeros((W1.space.dim, 0)))
    lam, vec = np.linalg.eigh(W1.projection + W2.projection)
    return Subspace(W1.space, vec[:, lam > 2.0 - tol.rank])


# ---------------------------------------------------------------------------
# Classification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _PairingSVD:
    """SVD of T = B^T J B sorted by descending singular value."""

    s: np.ndarray
    V: np.ndarray  # right singular vectors (columns), coordinates in the basis
    rank: int


def _pairing_svd(W: Subspace, tol: Tolerances) -> _PairingSVD:
    B = W.basis
    if W.k == 0:
        return _PairingSVD(np.zeros(0), np.zeros((0, 0)), 0)
    T = B.T @ W.space.J @ B
    _, s, Vt = np.linalg.svd(T)
    lo, hi = tol.rank / tol.instability_factor, tol.rank * tol.instability_factor
    near = s[(s > lo) & (s < hi)]
    if near.size:
        raise ClassificationUnstable(
            f"singular value {near[0]:.3g} of the restricted form is within a factor "
            f"{tol.instability_factor:g} of the rank cut {tol.rank:g}"
        )
    rank = int(np.sum(s >= tol.rank))
    if rank % 2:
        raise ClassificationUnstable(f"restricted form has odd numerical rank {rank}")
    return _PairingSVD(s, Vt.T, rank)


def classify(W: Subspace, tol: Tolerances | None = None) -> TypeSignature:
    """Type (n0, n+, n-) of W from the numerical rank of omega restricted to W."""
    p = _pairing_svd(W, _tol(tol))
    n0 = W.k - p.rank
    nplus = p.rank // 2
    return TypeSignature(n0, nplus, W.n - n0 - nplus)


def isotropic_kernel(W: Subspace, tol: Tolerances | None = None) -> Subspace:
    """W0 = W ∩ W^omega, the null space of omega restricted to W."""
    p = _pairing_svd(W, _tol(tol))
    return Subspace(W.space, W.basis @ p.V[:, p.rank:])


@dataclass(frozen=True)
class _KahlerParts:
    svd: _PairingSVD
    # (mean eigenvalue of S, column indices into svd.V) per pair, descending eigenvalue
    pairs: list
    complex_idx: list
    theta_idx: list


def _kahler_parts(W: Subspace, tol: Tolerances) -> _KahlerParts:
    p = _pairing_svd(W, tol)
    lam = p.s[: p.rank] ** 2
    pairs, complex_idx, theta_idx = [], [], []
    for i in range(0, p.rank, 2):
        if abs(lam[i] - lam[i + 1]) > tol.kahler:
            raise SpectrumPairingFailure(
                f"eigenvalues {lam[i]:.12g} and {lam[i + 1]:.12g} of S do not pair up"
            )
        mean = 0.5 * (lam[i] + lam[i + 1])
        pairs.append((mean, [i, i + 1]))
        if 1.0 - mean < tol.kahler:
            complex_idx += [i, i + 1]
        else:
            theta_idx += [i, i + 1]
    return _KahlerParts(p, pairs, complex_idx, theta_idx)


def _angle(lam: float) -> float:
    lam = min(max(lam, 0.0), 1.0)
    return float(np.arctan2(np.sqrt(1.0 - lam), np.sqrt(lam)))


def max_complex_subspace(W: Subspace, tol: Tolerances | None = None) -> Subspace:
    """W ∩ JW: the unit-eigenvalue eigenspace of S = -T^2."""
    parts = _kahler_parts(W, _tol(tol))
    return Subspace(W.space, W.basis @ parts.svd.V[:, parts.complex_idx])


def kahler_spectrum(W: Subspace, tol: Tolerances | None = None) -> KahlerSpectrum:
    tol = _tol(tol)
    parts = _kahler_parts(W, tol)
    angles = sorted(_angle(lam) for lam, _ in parts.pairs if 1.0 - lam >= tol.kahler)
    return KahlerSpectrum(
        n0=W.k - parts.svd.rank,
        nJ=len(parts.complex_idx) // 2,
        ntheta=len(parts.theta_idx) // 2,
        angles=tuple(angles),
    )


def is_J_compatible(W: Subspace, tol: Tolerances | None = None) -> Compatibility:
    """Whether W = W0 ⊕ (W ∩ JW), with a residual that vanishes exactly when it is.

    The residual adds 2 sin^2(theta) for every Kahler pair (those within the
    clustering tolerance of 1 included) and the eigenvalues counted as zero.
    """
    tol = _tol(tol)
    parts = _kahler_parts(W, tol)
    s = parts.svd.s
    residual = float(np.sum(s[parts.svd.rank:] ** 2))
    residual += sum(2.0 * (1.0 - lam) for lam, _ in parts.pairs)
    return Compatibility(len(parts.theta_idx) == 0, residual)


def min_complex_check(W: Subspace, tol: Tolerances | None = None) -> bool:
    """For k > n, check that W contains a complex subspace of complex dimension >= k - n."""
    if W.k <= W.n:
        raise NotApplicable(f"needs k > n, got k = {W.k}, n = {W.n}")
    return kahler_spectrum(W, tol).nJ >= W.k - W.n
