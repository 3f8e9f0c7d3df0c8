"""
Darboux bases adapted to a subspace.

Three constructions are provided:

* relative_darboux_basis: any splitting (W+, W-, W^0) of W, via the pairing
  with the dual of the isotropic kernel and pivoted symplectic Gram-Schmidt;
* totally_real_darboux: e_j, f_j = sec^2(theta_j) T e_j built from the
  eigenspaces of S on a totally real symplectic W;
* j_compatible_darboux: orthonormal bases with f = J e for J-compatible W.

Plus the orthogonal block decomposition of V by Kahler angles and the
construction of subspaces with a prescribed type.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    DegeneratePairing,
    InvalidSplitting,
    NotHalfDimensional,
    NotJCompatible,
    NotTotallyReal,
)
from .symplectic_core import (
    Subspace,
    SymplecticSpace,
    Tolerances,
    _complement_basis,
    _kahler_parts,
    _tol,
    check_signature,
    classify,
    is_J_compatible,
    isotropic_kernel,
    max_complex_subspace,
    omega_gram,
    subspace_from_spanning,
    symplectic_complement,
)

__all__ = [
    "Splitting",
    "DarbouxBasis",
    "DarbouxReport",
    "KahlerBlock",
    "KahlerBlocks",
    "canonical_splitting",
    "check_splitting",
    "relative_darboux_basis",
    "totally_real_darboux",
    "j_compatible_darboux",
    "kahler_block_decomposition",
    "construct_subspace_of_type",
    "random_symplectic",
    "random_unitary",
    "darboux_check",
]

_CONTAIN_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class Splitting:
    """A triple (W+, W-, W^0) associated to a subspace W."""

    Wplus: Subspace
    Wminus: Subspace
    W0dual: Subspace

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.Wplus.k, self.Wminus.k, self.W0dual.k


@dataclass(frozen=True, eq=False)
class DarbouxBasis:
    """Vectors e_i (columns of E) and f_i (columns of F) with omega(e_i, f_j) = delta_ij.

    Columns are grouped as (0-block, +-block, --block) with sizes
    (n0, nplus, nminus).  ``angles`` is non-empty only for bases built from
    Kahler angles.
    """

    space: SymplecticSpace
    E: np.ndarray
    F: np.ndarray
    n0: int
    nplus: int
    nminus: int
    angles: tuple[float, ...] = ()

    def __post_init__(self):
        m = self.n0 + self.nplus + self.nminus
        if self.E.shape != (self.space.dim, m) or self.F.shape != (self.space.dim, m):
            raise ValueError(
                f"E and F must be ({self.space.dim}, {m}); got {self.E.shape}, {self.F.shape}"
            )

    def _block(self, M, which):
        a = {"0": 0, "+": self.n0, "-": self.n0 + self.nplus}[which]
        b = a + {"0": self.n0, "+": self.nplus, "-": self.nminus}[which]
        return M[:, a:b]

    @property
    def e0(self):
        return self._block(self.E, "0")

    @property
    def eplus(self):
        return self._block(self.E, "+")

    @property
    def eminus(self):
        return self._block(self.E, "-")

    @property
    def f0(self):
        return self._block(self.F, "0")

    @property
    def fplus(self):
        return self._block(self.F, "+")

    @property
    def fminus(self):
        return self._block(self.F, "-")

    def matrix(self) -> np.ndarray:
        """[E | F] as a 2n x 2m matrix; symplectic when the basis is complete."""
        return np.hstack([self.E, self.F])


@dataclass(frozen=True)
class DarbouxReport:
    pairing: float  # max |omega(e_i, f_j) - delta_ij|
    ee: float  # max |omega(e_i, e_j)|
    ff: float  # max |omega(f_i, f_j)|

    @property
    def max_deviation(self) -> float:
        return max(self.pairing, self.ee, self.ff)


def darboux_check(basis: DarbouxBasis) -> DarbouxReport:
    sp = basis.space
    m = basis.E.shape[1]
    pairing = omega_gram(sp, basis.E, basis.F) - np.eye(m)
    ee = omega_gram(sp, basis.E, basis.E)
    ff = omega_gram(sp, basis.F, basis.F)
    amax = lambda a: float(np.max(np.abs(a), initial=0.0))  # noqa: E731
    return DarbouxReport(amax(pairing), amax(ee), amax(ff))


@dataclass(frozen=True, eq=False)
class KahlerBlock:
    V: Subspace  # 4-dimensional, J-invariant
    W: Subspace  # W ∩ V, 2-dimensional
    theta: float


@dataclass(frozen=True, eq=False)
class KahlerBlocks:
    V0: Subspace
    VJ: Subspace
    blocks: tuple[KahlerBlock, ...]


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------


def _span(space: SymplecticSpace, *blocks) -> Subspace:
    cols = [np.asarray(b).reshape(space.dim, -1) for b in blocks]
    M = np.hstack(cols) if cols else np.zeros((space.dim, 0))
    return subspace_from_spanning(space, M)


def _complement_within(outer: np.ndarray, inner: np.ndarray) -> np.ndarray:
    """Orthonormal basis of span(outer) ∩ span(inner)^perp, span(inner) ⊆ span(outer)."""
    coords = outer.T @ inner
    return outer @ _complement_basis(coords, outer.shape[1])


def _pick_unit(Q: np.ndarray) -> np.ndarray:
    """Unit vector of span(Q) with the largest component along the lowest usable axis.

    Q has orthonormal columns.  The maximiser of x_i over unit x in span(Q) is
    the normalized projection of the i-th axis, of size |Q[i]|; axes whose
    projection is negligible are skipped.
    """
    norms = np.linalg.norm(Q, axis=1)
    i = int(np.argmax(norms > 1e-8))
    return Q @ Q[i] / norms[i]


def _symplectic_gram_schmidt(space: SymplecticSpace, U: np.ndarray):
    """Darboux pairs (E, F) for the symplectic subspace spanned by U.

    At each step the pair with the largest |omega| pairing is taken; the rest
    is made omega-orthogonal to it and re-orthonormalized.
    """
    E, F = [], []
    V = np.array(U, dtype=float)
    while V.shape[1] > 0:
        if V.shape[1] == 1:
            raise InvalidSplitting("odd-dimensional remainder in symplectic Gram-Schmidt")
        M = omega_gram(space, V, V)
        i, j = np.unravel_index(np.argmax(np.abs(M)), M.shape)
        if abs(M[i, j]) < 1e-12:
            raise InvalidSplitting("subspace is not symplectic")
        e = V[:, i]
        f = V[:, j] / M[i, j]
        rest = [c for c in range(V.shape[1]) if c not in (i, j)]
        R = V[:, rest]
        # v <- v - omega(v, f) e + omega(v, e) f
        R = R - np.outer(e, omega_gram(space, R, f[:, None])[:, 0])
        R = R + np.outer(f, omega_gram(space, R, e[:, None])[:, 0])
        if R.shape[1]:
            R, _ = np.linalg.qr(R)
        E.append(e)
        F.append(f)
        V = R
    d = space.dim
    return (np.array(E).T.reshape(d, -1), np.array(F).T.reshape(d, -1))


def _complex_unit_basis(space: SymplecticSpace, Q: np.ndarray) -> np.ndarray:
    """Orthonormal e_1..e_m of a complex subspace span(Q) with {e, Je} orthonormal."""
    es = []
    while Q.shape[1] > 0:
        e = _pick_unit(Q)
        es.append(e)
        Q = _complement_within(Q, np.column_stack([e, space.J @ e]))
    return np.array(es).T.reshape(space.dim, -1)


def _angle_pairs(W: Subspace, tol: Tolerances):
    """(e_j, f_j, theta_j) for the totally real part of W.

    Eigenvalue clusters of S are handled one at a time; inside a cluster the
    unit vector is fixed by _pick_unit and f = P J e / |P J e|^2, so that
    omega(e, f) = 1 exactly.  Returned in order of increasing angle.
    """
    parts = _kahler_parts(W, tol)
    sp, P, J = W.space, W.projection, W.space.J
    theta_pairs = [(lam, idx) for lam, idx in parts.pairs if 1.0 - lam >= tol.kahler]
    # descending lambda = ascending angle; cluster neighbours
    clusters: list[tuple[list[float], list[int]]] = []
    for lam, idx in theta_pairs:
        if clusters and abs(clusters[-1][0][-1] - lam) < tol.kahler:
            clusters[-1][0].append(lam)
            clusters[-1][1].extend(idx)
        else:
            clusters.append(([lam], list(idx)))
    es, fs, thetas = [], [], []
    for _, idx in clusters:
        Q = W.basis @ parts.svd.V[:, idx]
        while Q.shape[1] > 0:
            e = _pick_unit(Q)
            Te = P @ (J @ e)
            lam = float(Te @ Te)
            f = Te / lam
            es.append(e)
            fs.append(f)
            thetas.append(float(np.arctan2(np.sqrt(max(1.0 - lam, 0.0)), np.sqrt(lam))))
            Q = _complement_within(Q, np.column_stack([e, Te / np.sqrt(lam)]))
    d = sp.dim
    return np.array(es).T.reshape(d, -1), np.array(fs).T.reshape(d, -1), tuple(thetas)


# ---------------------------------------------------------------------------
# splittings and Darboux bases
# ---------------------------------------------------------------------------


def canonical_splitting(W: Subspace, tol: Tolerances | None = None) -> Splitting:
    """The J-determined splitting W+ = W0^perp ∩ W, W- = W0^perp ∩ W^omega, W^0 = J W0."""
    tol = _tol(tol)
    sp = W.space
    W0 = isotropic_kernel(W, tol)
    Wom = symplectic_complement(W)
    Wplus = Subspace(sp, _complement_within(W.basis, W0.basis))
    Wminus = Subspace(sp, _complement_within(Wom.basis, W0.basis))
    return Splitting(Wplus, Wminus, Subspace(sp, sp.J @ W0.basis))


def _max_abs(a) -> float:
    return float(np.max(np.abs(a), initial=0.0))


def check_splitting(W: Subspace, s: Splitting, tol: Tolerances | None = None) -> Subspace:
    """Validate that s is a splitting associated to W; returns the isotropic kernel.

    Raises InvalidSplitting (DegeneratePairing when W0 and W^0 do not pair).
    """
    tol = _tol(tol)
    sp = W.space
    sig = classify(W, tol)
    W0 = isotropic_kernel(W, tol)
    Wom = symplectic_complement(W)
    if s.dims != (2 * sig.nplus, 2 * sig.nminus, sig.n0):
        raise InvalidSplitting(f"splitting dimensions {s.dims} do not match type {sig}")
    I = np.eye(sp.dim)
    if _max_abs((I - W.projection) @ s.Wplus.basis) > _CONTAIN_TOL:
        raise InvalidSplitting("W+ is not contained in W")
    if _max_abs((I - Wom.projection) @ s.Wminus.basis) > _CONTAIN_TOL:
        raise InvalidSplitting("W- is not contained in W^omega")
    for name, part in (("W+", s.Wplus), ("W-", s.Wminus)):
        if part.k and classify(part, tol).n0 != 0:
            raise InvalidSplitting(f"{name} is not symplectic")
    D = s.W0dual.basis
    if sig.n0:
        if _max_abs(omega_gram(sp, D, D)) > _CONTAIN_TOL:
            raise InvalidSplitting("W^0 is not isotropic")
        for part in (s.Wplus, s.Wminus):
            if part.k and _max_abs(omega_gram(sp, part.basis, D)) > _CONTAIN_TOL:
                raise InvalidSplitting("W^0 is not omega-orthogonal to W+ ⊕ W-")
        smin = np.linalg.svd(omega_gram(sp, W0.basis, D), compute_uv=False)[-1]
        if smin < tol.rank:
            raise DegeneratePairing(
                f"pairing between W0 and W^0 is singular (smallest singular value {smin:.3g})"
            )
    return W0


def relative_darboux_basis(
    W: Subspace, s: Splitting | None = None, tol: Tolerances | None = None
) -> DarbouxBasis:
    """Darboux basis of V adapted to the splitting s (canonical one if omitted).

    span(e0) = W0, span(f0) = W^0, span(e+, f+) = W+, span(e-, f-) = W-.
    """
    tol = _tol(tol)
    sp = W.space
    if s is None:
        s = canonical_splitting(W, tol)
    W0 = check_splitting(W, s, tol)
    e0 = W0.basis
    D = s.W0dual.basis
    if e0.shape[1]:
        G = omega_gram(sp, e0, D)
        f0 = D @ np.linalg.inv(G)
    else:
        f0 = np.zeros((sp.dim, 0))
    ep, fp = _symplectic_gram_schmidt(sp, s.Wplus.basis)
    em, fm = _symplectic_gram_schmidt(sp, s.Wminus.basis)
    return DarbouxBasis(
        sp,
        np.hstack([e0, ep, em]),
        np.hstack([f0, fp, fm]),
        e0.shape[1],
        ep.shape[1],
        em.shape[1],
    )


def totally_real_darboux(
    W: Subspace, tol: Tolerances | None = None, include_complement: bool = False
) -> DarbouxBasis:
    """Darboux pairs (e_j, f_j) on a totally real symplectic W of half dimension.

    {e_j, cos(theta_j) f_j} is an orthonormal basis of W and
    f_j = sec^2(theta_j) P J e_j.  With ``include_complement`` the same
    construction on W^omega fills the minus block, giving a basis of V.

    Since |f_j| = sec(theta_j), absolute omega-errors of the result scale
    like sec^2(theta_j) * eps as an angle approaches pi/2.
    """
    tol = _tol(tol)
    sp = W.space
    if W.k != sp.n or sp.dim % 4:
        raise NotHalfDimensional(
            f"need dim W = n and 4 | 2n; got k = {W.k} in dimension {sp.dim}"
        )
    parts = _kahler_parts(W, tol)
    if parts.svd.rank < W.k:
        raise NotTotallyReal("W has an isotropic kernel (eigenvalue 0 of S)")
    if parts.complex_idx:
        raise NotTotallyReal("W contains a complex line (eigenvalue 1 of S)")
    E, F, angles = _angle_pairs(W, tol)
    if not include_complement:
        return DarbouxBasis(sp, E, F, 0, E.shape[1], 0, angles)
    Em, Fm, _ = _angle_pairs(symplectic_complement(W), tol)
    return DarbouxBasis(sp, np.hstack([E, Em]), np.hstack([F, Fm]), 0, E.shape[1], Em.shape[1], angles)


def j_compatible_darboux(W: Subspace, tol: Tolerances | None = None) -> DarbouxBasis:
    """Orthonormal Darboux basis with f = J e adapted to a J-compatible W."""
    tol = _tol(tol)
    sp = W.space
    if not is_J_compatible(W, tol).compatible:
        raise NotJCompatible("W is not the orthogonal sum of its isotropic kernel and W ∩ JW")
    e0 = isotropic_kernel(W, tol).basis
    ep = _complex_unit_basis(sp, max_complex_subspace(W, tol).basis)
    em = _complex_unit_basis(sp, max_complex_subspace(symplectic_complement(W), tol).basis)
    E = np.hstack([e0, ep, em])
    return DarbouxBasis(sp, E, sp.J @ E, e0.shape[1], ep.shape[1], em.shape[1])


def kahler_block_decomposition(W: Subspace, tol: Tolerances | None = None) -> KahlerBlocks:
    """V = V0 ⊕ VJ ⊕ (4-dimensional J-invariant blocks, one per Kahler angle)."""
    tol = _tol(tol)
    sp, J = W.space, W.space.J
    W0 = isotropic_kernel(W, tol)
    Wp = max_complex_subspace(W, tol)
    Wm = max_complex_subspace(symplectic_complement(W), tol)
    E, F, angles = _angle_pairs(W, tol)
    blocks = []
    for j, theta in enumerate(angles):
        e, f = E[:, j], F[:, j]
        blocks.append(KahlerBlock(_span(sp, e, f, J @ e, J @ f), _span(sp, e, f), theta))
    return KahlerBlocks(
        V0=_span(sp, W0.basis, J @ W0.basis),
        VJ=_span(sp, Wp.basis, Wm.basis),
        blocks=tuple(blocks),
    )


# ---------------------------------------------------------------------------
# representatives of a prescribed type
# ---------------------------------------------------------------------------


def random_symplectic(space: SymplecticSpace, rng=None, scale: float = 0.5) -> np.ndarray:
    """exp(J S) for a symmetric S with N(0, scale^2) entries."""
    rng = np.random.default_rng(rng)
    A = rng.standard_normal((space.dim, space.dim))
    S = scale * (np.triu(A) + np.triu(A, 1).T)
    return scipy.linalg.expm(space.J @ S)


def random_unitary(space: SymplecticSpace, rng=None) -> np.ndarray:
    """Haar-random element of U(n), realified so that it commutes with J."""
    rng = np.random.default_rng(rng)
    n = space.n
    Z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    Q, R = np.linalg.qr(Z)
    Q = Q * (np.diag(R) / np.abs(np.diag(R)))
    # J (x, y) = (-y, x) is multiplication by i on z = x + i y
    return np.block([[Q.real, -Q.imag], [Q.imag, Q.real]])


def construct_subspace_of_type(
    space: SymplecticSpace,
    sig,
    mode: str = "coordinate",
    seed=None,
    scale: float = 0.5,
) -> Subspace:
    """A subspace of type sig.

    ``mode="coordinate"`` gives span{e_1..e_n0, e_{n0+1}..e_{n0+n+}, f_{n0+1}..f_{n0+n+}};
    ``mode="randomized"`` moves it by random_symplectic(seed).
    """
    sig = check_signature(sig, n=space.n)
    n0, nplus = sig.n0, sig.nplus
    n = space.n
    cols = list(range(n0 + nplus)) + [n + j for j in range(n0, n0 + nplus)]
    B = np.zeros((space.dim, len(cols)))
    for j, c in enumerate(cols):
        B[c, j] = 1.0
    if mode == "coordinate":
        return Subspace(space, B)
    if mode == "randomized":
        g = random_symplectic(space, seed, scale)
        return subspace_from_spanning(space, g @ B)
    raise ValueError(f"unknown mode {mode!r}; expected 'coordinate' or 'randomized'")
