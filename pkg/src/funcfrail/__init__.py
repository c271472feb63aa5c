"""Functional linear Cox regression with frailty."""

from .cox import CoxDesign, FrailtyConfig, FrailtyFit, fit
from .fpca import fit_fpca
from .inference import bootstrap_beta, concordance
from .pipeline import PipelineSettings, SurvivalDataset, fit_pipeline
from .smoothing import SamplingGrid, build_bspline_basis, smooth_curves

__version__ = "0.1.0"

__all__ = ["CoxDesign", "FrailtyConfig", "FrailtyFit", "fit", "fit_fpca", "bootstrap_beta", "concordance",
           "PipelineSettings", "SurvivalDataset", "fit_pipeline", "SamplingGrid", "build_bspline_basis",
           "smooth_curves"]
