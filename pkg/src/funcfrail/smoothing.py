"""B-spline smoothing of discretely observed, noisy curves."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.interpolate import BSpline


@dataclass(frozen=True)
class SamplingGrid:
    """Ordered abscissae with trapezoid quadrature weights.

    Parameters
    ----------
    points : ndarray of shape (J,)
        Strictly increasing grid points on ``[points[0], points[-1]]``.
    """

    points: np.ndarray
    quad_weights: np.ndarray

    @classmethod
    def from_points(cls, points) -> "SamplingGrid":
        s = np.asarray(points, dtype=float)
        if s.ndim != 1 or s.size < 4:
            raise ValueError("grid needs at least 4 points")
        if not np.all(np.isfinite(s)):
            raise ValueError("grid points must be finite")
        if np.any(np.diff(s) <= 0):
            raise ValueError("grid points must be strictly increasing")
        h = np.diff(s)
        w = np.zeros_like(s)
        w[:-1] += h / 2
        w[1:] += h / 2
        return cls(points=s, quad_weights=w)

    @classmethod
    def uniform(cls, J: int = 101, a: float = 0.0, b: float = 1.0) -> "SamplingGrid":
        return cls.from_points(np.linspace(a, b, J))

    @property
    def J(self) -> int:
        return self.points.size

    @property
    def interval(self) -> tuple[float, float]:
        return float(self.points[0]), float(self.points[-1])

    def integrate(self, values: np.ndarray) -> np.ndarray:
        """Trapezoid integral along the last axis."""
        return np.asarray(values) @ self.quad_weights


@dataclass(frozen=True)
class BSplineBasis:
    order: int
    knots: np.ndarray
    n_basis: int
    eval: np.ndarray  # (J, n_basis)


@dataclass(frozen=True)
class SmoothedCurves:
    coefficients: np.ndarray
    fitted: np.ndarray
    mean_curve: np.ndarray
    centered: np.ndarray


def build_bspline_basis(grid: SamplingGrid, order: int = 4, n_basis: int = 8) -> BSplineBasis:
    """Clamped B-spline basis with equally spaced interior knots.

    Parameters
    ----------
    grid : SamplingGrid
        Evaluation points; the basis spans ``grid.interval``.
    order : int
        Spline order (degree + 1). 4 gives cubic splines.
    n_basis : int
        Number of basis functions, ``order <= n_basis <= J``.

    Returns
    -------
    BSplineBasis
        ``eval[j, b]`` is the b-th basis function at ``grid.points[j]``.
    """
    if order < 2:
        raise ValueError("order must be >= 2")
    if n_basis < order:
        raise ValueError(f"n_basis={n_basis} < order={order}: degenerate spline space")
    if n_basis > grid.J:
        raise ValueError(f"n_basis={n_basis} exceeds grid size {grid.J}: underdetermined fit")
    a, b = grid.interval
    n_interior = n_basis - order
    interior = np.linspace(a, b, n_interior + 2)[1:-1]
    knots = np.concatenate([np.full(order, a), interior, np.full(order, b)])
    degree = order - 1
    # design_matrix runs the de Boor recursion; the right endpoint is handled
    # by the last nonempty knot span
    E = BSpline.design_matrix(grid.points, knots, degree).toarray()
    return BSplineBasis(order=order, knots=knots, n_basis=n_basis, eval=E)


def smooth_curves(raw: np.ndarray, basis: BSplineBasis, ridge: float = 1e-8) -> SmoothedCurves:
    """Ridge-stabilised least-squares fit of every row of ``raw``.

    The coefficients minimise ``||x_i - E c||^2 + ridge * ||c||^2``. The
    returned curves are already centered; see :func:`center_curves`.
    """
    X = np.asarray(raw, dtype=float)
    E = basis.eval
    if X.ndim != 2 or X.shape[1] != E.shape[0]:
        raise ValueError(f"raw curves have {X.shape[-1]} columns, grid has {E.shape[0]} points")
    if X.shape[0] < 2:
        raise ValueError("need at least two curves")
    if not np.all(np.isfinite(X)):
        raise ValueError("raw curves contain non-finite values")
    if ridge < 0:
        raise ValueError("ridge must be nonnegative")

    G = E.T @ E + ridge * np.eye(basis.n_basis)
    try:
        cho = np.linalg.cholesky(G)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError("singular normal equations: increase ridge or reduce n_basis") from exc
    if np.linalg.cond(G) > 1e14:
        raise np.linalg.LinAlgError("singular normal equations: increase ridge or reduce n_basis")
    rhs = E.T @ X.T
    coef = np.linalg.solve(cho.T, np.linalg.solve(cho, rhs)).T
    fitted = coef @ E.T
    mean = fitted.mean(axis=0)
    return center_curves(SmoothedCurves(coef, fitted, mean, fitted - mean))


def center_curves(smoothed: SmoothedCurves) -> SmoothedCurves:
    mean = smoothed.fitted.mean(axis=0)
    return replace(smoothed, mean_curve=mean, centered=smoothed.fitted - mean)


def smooth_new_curves(raw: np.ndarray, basis: BSplineBasis, mean_curve: np.ndarray,
                      ridge: float = 1e-8) -> np.ndarray:
    """Smooth curves not used to build the mean and subtract the training mean."""
    X = np.atleast_2d(np.asarray(raw, dtype=float))
    E = basis.eval
    G = E.T @ E + ridge * np.eye(basis.n_basis)
    coef = np.linalg.solve(G, E.T @ X.T).T
    return coef @ E.T - mean_curve
