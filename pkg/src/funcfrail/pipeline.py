"""Smooth, project and fit: the end-to-end estimator."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from . import cox
from .fpca import FpcaBasis, compute_scores, fit_fpca
from .inference import CoefficientFunction, reconstruct_beta
from .smoothing import (BSplineBasis, SamplingGrid, SmoothedCurves, build_bspline_basis,
                        smooth_curves, smooth_new_curves)


@dataclass(frozen=True)
class SurvivalDataset:
    """Outcomes, scalar covariates and raw curves for ``n`` subjects."""

    time: np.ndarray
    status: np.ndarray
    Z: np.ndarray
    curves: np.ndarray
    grid: SamplingGrid
    group: Optional[np.ndarray] = None
    ids: Optional[np.ndarray] = None
    covariate_names: tuple = ()

    @property
    def n(self) -> int:
        return self.time.size

    def subset(self, idx) -> "SurvivalDataset":
        idx = np.asarray(idx)
        # resampled duplicates are distinct subjects with their own frailty
        group = None if self.group is None else self.group[idx]
        ids = None if self.ids is None else self.ids[idx]
        return replace(self, time=self.time[idx], status=self.status[idx], Z=self.Z[idx],
                       curves=self.curves[idx], group=group, ids=ids)


@dataclass(frozen=True)
class PipelineSettings:
    n_basis: int = 8
    order: int = 4
    ridge: float = 1e-8
    fpca_threshold: float = 0.85


@dataclass
class PipelineResult:
    spline: BSplineBasis
    smoothed: SmoothedCurves
    fpca: FpcaBasis
    design: cox.CoxDesign
    fit: cox.FrailtyFit
    beta_hat: CoefficientFunction
    settings: PipelineSettings

    def test_scores(self, curves) -> np.ndarray:
        """FPC scores of new raw curves, using the training mean and basis."""
        centered = smooth_new_curves(curves, self.spline, self.smoothed.mean_curve, self.settings.ridge)
        return compute_scores(centered, self.fpca, self.fpca.grid)

    def predict(self, Z, curves) -> np.ndarray:
        """Frailty-free linear predictor for new subjects."""
        return cox.predict_risk(self.fit, Z, self.test_scores(curves))

    def in_sample_eta(self, include_frailty: bool = True) -> np.ndarray:
        return cox.predict_risk(self.fit, self.design.Z, self.design.scores,
                                include_frailty=include_frailty and self.fit.w_hat.size > 0,
                                group_new=self.design.group)


def fit_pipeline(data: SurvivalDataset, settings: Optional[PipelineSettings] = None,
                 config: Optional[cox.FrailtyConfig] = None) -> PipelineResult:
    settings = settings or PipelineSettings()
    spline = build_bspline_basis(data.grid, settings.order, settings.n_basis)
    smoothed = smooth_curves(data.curves, spline, settings.ridge)
    fp = fit_fpca(smoothed.centered, data.grid, settings.fpca_threshold)
    design = cox.CoxDesign.build(data.time, data.status, data.Z, fp.scores, data.group)
    fitted = cox.fit(design, config)
    return PipelineResult(spline, smoothed, fp, design, fitted,
                          reconstruct_beta(fitted.beta_coef_hat, fp), settings)
