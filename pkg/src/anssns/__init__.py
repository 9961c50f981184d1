"""Neyman-Scott point processes with covariate-dependent anisotropic
clusters: simulation, Bayesian MCMC inference, isotropy tests, and the
simulation-study harness."""

from .estimator import NeymanScottMCMC
from .geometry import CovMatrix, Window, gaussian_density, make_sigma, rotation_matrix
from .mcmc import McmcConfig, ParamSpace, PosteriorSamples, ScalarParam, run_chain
from .model import AnisotropyField, LogNormalMeanVar, LogUniform, ModelSpec, OmegaParams, Uniform
from .simulate import PointPattern, SimTruth, simulate

__version__ = "0.1.0"

__all__ = [
    "NeymanScottMCMC",
    "Window",
    "CovMatrix",
    "rotation_matrix",
    "make_sigma",
    "gaussian_density",
    "AnisotropyField",
    "ModelSpec",
    "OmegaParams",
    "Uniform",
    "LogNormalMeanVar",
    "LogUniform",
    "PointPattern",
    "SimTruth",
    "simulate",
    "ParamSpace",
    "ScalarParam",
    "McmcConfig",
    "PosteriorSamples",
    "run_chain",
    "__version__",
]
