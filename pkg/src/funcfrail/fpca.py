"""Functional principal components on a quadrature grid.

Eigenfunctions are orthonormal in the trapezoid inner product
``<f, g> = sum_j w_j f(s_j) g(s_j)``. Near-tied eigenvalues make the
individual eigenfunctions unstable; the subspace they span is not.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .smoothing import SamplingGrid

K_MAX_CAP = 35


@dataclass(frozen=True)
class CovarianceKernel:
    matrix: np.ndarray
    grid: SamplingGrid


@dataclass(frozen=True)
class FpcaBasis:
    """Eigenpairs of a covariance kernel plus the selected truncation.

    Attributes
    ----------
    eigenvalues : ndarray
        Descending, clipped at zero.
    eigenfunctions : ndarray of shape (m, J)
        Row ``k`` is the k-th eigenfunction on the grid.
    K : int or None
        Number of retained components, set by :func:`select_truncation`.
    threshold : float or None
        Explained-variance fraction used to pick ``K``.
    scores : ndarray of shape (n, K) or None
    k_max : int
        Upper bound on ``K``.
    """

    eigenvalues: np.ndarray
    eigenfunctions: np.ndarray
    grid: SamplingGrid
    K: Optional[int] = None
    threshold: Optional[float] = None
    scores: Optional[np.ndarray] = None
    k_max: int = K_MAX_CAP

    @property
    def phi(self) -> np.ndarray:
        """The K retained eigenfunctions, shape (K, J)."""
        if self.K is None:
            raise ValueError("truncation not selected")
        return self.eigenfunctions[: self.K]


def empirical_covariance(centered: np.ndarray, grid: SamplingGrid) -> CovarianceKernel:
    X = np.asarray(centered, dtype=float)
    n = X.shape[0]
    if n < 2:
        raise ValueError("insufficient sample: need at least two curves")
    if X.shape[1] != grid.J:
        raise ValueError("curve length does not match grid")
    C = X.T @ X / n
    return CovarianceKernel(matrix=(C + C.T) / 2, grid=grid)


def _orient(phi: np.ndarray, w: np.ndarray) -> np.ndarray:
    out = phi.copy()
    for k, f in enumerate(out):
        integral = w @ f
        scale = np.sqrt(w @ (f * f))
        if abs(integral) > 1e-10 * max(scale, 1.0):
            flip = integral < 0
        else:
            nz = np.flatnonzero(np.abs(f) > 1e-12 * max(np.abs(f).max(), 1e-300))
            flip = nz.size > 0 and f[nz[0]] < 0
        if flip:
            out[k] = -f
    return out


def eigendecompose(cov: CovarianceKernel, n_samples: Optional[int] = None) -> FpcaBasis:
    """Solve the weighted eigenproblem ``C W phi = lambda phi``.

    ``W^{1/2} C W^{1/2}`` is diagonalised and its eigenvectors mapped back by
    ``W^{-1/2}``. Each eigenfunction is oriented so its integral is
    nonnegative, falling back to a positive first nonzero entry when the
    integral vanishes.
    """
    C = np.asarray(cov.matrix, dtype=float)
    if not np.all(np.isfinite(C)):
        raise ValueError("covariance contains non-finite entries")
    w = cov.grid.quad_weights
    if np.any(w <= 0):
        raise ValueError("quadrature weights must be positive")
    rw = np.sqrt(w)
    A = rw[:, None] * C * rw[None, :]
    vals, vecs = np.linalg.eigh((A + A.T) / 2)
    order = np.argsort(vals)[::-1]
    vals = np.clip(vals[order], 0.0, None)
    phi = (vecs[:, order] / rw[:, None]).T
    phi = _orient(phi, w)
    J = cov.grid.J
    k_max = min(J, K_MAX_CAP) if n_samples is None else min(n_samples - 1, J, K_MAX_CAP)
    return FpcaBasis(eigenvalues=vals, eigenfunctions=phi, grid=cov.grid, k_max=max(k_max, 1))


def select_truncation(basis: FpcaBasis, threshold: float = 0.85) -> int:
    """Smallest ``m`` whose leading eigenvalues explain ``threshold`` of the total."""
    if not 0 < threshold < 1:
        raise ValueError("threshold must lie in (0, 1)")
    lam = np.asarray(basis.eigenvalues, dtype=float)
    total = lam.sum()
    if not total > 0:
        raise ValueError("degenerate data: all eigenvalues are zero")
    ratio = np.cumsum(lam) / total
    # tolerance absorbs rounding in the cumulative sum at exact boundaries
    K = int(np.argmax(ratio >= threshold - 1e-12)) + 1
    return min(K, basis.k_max)


def compute_scores(centered: np.ndarray, basis: FpcaBasis, grid: SamplingGrid) -> np.ndarray:
    """Quadrature scores ``xi_ik = int X_i(s) phi_k(s) ds`` for the retained components."""
    X = np.atleast_2d(np.asarray(centered, dtype=float))
    return (X * grid.quad_weights) @ basis.phi.T


def fit_fpca(centered: np.ndarray, grid: SamplingGrid, threshold: float = 0.85) -> FpcaBasis:
    """Covariance, eigenpairs, truncation and scores in one call."""
    cov = empirical_covariance(centered, grid)
    basis = eigendecompose(cov, n_samples=np.shape(centered)[0])
    K = select_truncation(basis, threshold)
    basis = replace(basis, K=K, threshold=threshold)
    return replace(basis, scores=compute_scores(centered, basis, grid))
