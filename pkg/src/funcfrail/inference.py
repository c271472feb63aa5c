"""Coefficient-function reconstruction, evaluation metrics and bootstrap."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .fpca import FpcaBasis
from .smoothing import SamplingGrid


@dataclass(frozen=True)
class CoefficientFunction:
    grid: SamplingGrid
    values: np.ndarray


@dataclass
class MetricsRecord:
    ci_in: float
    ci_out: float
    mse_gamma: float
    imse_beta: float
    censor_rate: float

    def __post_init__(self):
        for name in ("ci_in", "ci_out", "censor_rate"):
            v = getattr(self, name)
            if not (np.isnan(v) or 0.0 <= v <= 1.0):
                raise ValueError(f"{name}={v} outside [0, 1]")
        for name in ("mse_gamma", "imse_beta"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")


def reconstruct_beta(beta_coef, basis: FpcaBasis) -> CoefficientFunction:
    """``beta(s) = sum_k beta_k phi_k(s)`` on the basis grid."""
    b = np.asarray(beta_coef, dtype=float).ravel()
    if b.size != basis.K:
        raise ValueError(f"{b.size} coefficients for K={basis.K} components")
    return CoefficientFunction(basis.grid, b @ basis.phi if b.size else np.zeros(basis.grid.J))


def mse_gamma(gamma_hat, gamma_true) -> float:
    gh, gt = np.asarray(gamma_hat, dtype=float), np.asarray(gamma_true, dtype=float)
    if gh.shape != gt.shape:
        raise ValueError("gamma vectors differ in length")
    diff = gh - gt
    return float(diff @ diff)


def imse_beta(beta_hat: CoefficientFunction, beta_true_on_grid) -> float:
    """Trapezoid integral of the squared error over the grid interval."""
    bt = np.asarray(beta_true_on_grid, dtype=float)
    if bt.shape != beta_hat.values.shape:
        raise ValueError("true coefficient is not on the estimate's grid")
    diff = beta_hat.values - bt
    return float(beta_hat.grid.quad_weights @ (diff * diff))


def concordance(time, status, risk) -> float:
    """Harrell's C for right-censored data.

    A pair is comparable when the subject with the strictly smaller observed
    time had an event. It is concordant when that subject also has the
    strictly larger risk; tied risks count one half. Equal observed times are
    never comparable.

    Raises
    ------
    ValueError
        If no pair is comparable.
    """
    t = np.asarray(time, dtype=float)
    d = np.asarray(status).astype(bool)
    r = np.asarray(risk, dtype=float)
    if not (t.shape == d.shape == r.shape):
        raise ValueError("time, status and risk must have equal lengths")
    ti, ri = t[d], r[d]
    # rows: event subjects i; cols: all subjects j with t_j > t_i
    later = t[None, :] > ti[:, None]
    comparable = int(later.sum())
    if comparable == 0:
        raise ValueError("concordance undefined: no comparable pairs")
    conc = int((later & (ri[:, None] > r[None, :])).sum())
    ties = int((later & (ri[:, None] == r[None, :])).sum())
    return (conc + 0.5 * ties) / comparable


@dataclass
class BootstrapResult:
    grid: SamplingGrid
    curves: np.ndarray  # (B_ok, J)
    replicate_ids: np.ndarray
    mean: np.ndarray
    skipped: list = field(default_factory=list)

    def percentiles(self, q=(2.5, 50, 97.5)) -> np.ndarray:
        return np.percentile(self.curves, q, axis=0)

    @property
    def variance(self) -> np.ndarray:
        return self.curves.var(axis=0, ddof=1) if len(self.curves) > 1 else np.zeros(self.grid.J)


def bootstrap_beta(dataset, fit_config=None, B: int = 500, seed: int = 0, jobs: int = 1,
                   settings=None, indices: Optional[list] = None) -> BootstrapResult:
    """Resample subjects with replacement and refit the whole pipeline.

    Replicate ``b`` draws its indices from a generator seeded by
    ``(seed, b)``, so results do not depend on ``jobs``. ``indices`` overrides
    the random draws (one index array per replicate).
    """
    from .pipeline import PipelineSettings, fit_pipeline
    from .simulation import substream

    if B < 1:
        raise ValueError("B must be >= 1")
    settings = settings or PipelineSettings()
    n = dataset.n

    def one(b):
        idx = indices[b] if indices is not None else substream(seed, b).integers(0, n, size=n)
        sub = dataset.subset(idx)
        if sub.status.sum() == 0:
            return b, None
        try:
            res = fit_pipeline(sub, settings, fit_config)
        except (ValueError, np.linalg.LinAlgError):
            return b, None
        return b, res.beta_hat.values

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            out = list(ex.map(one, range(B)))
    else:
        out = [one(b) for b in range(B)]
    kept = [(b, v) for b, v in out if v is not None]
    skipped = [b for b, v in out if v is None]
    if not kept:
        raise ValueError("every bootstrap replicate failed")
    curves = np.array([v for _, v in kept])
    return BootstrapResult(dataset.grid, curves, np.array([b for b, _ in kept]), curves.mean(axis=0), skipped)
