"""Intrinsic complexity of random fields and random vectors.

Counts how many Karhunen-Loeve terms (or subspace dimensions) a stationary
covariance or a random vector ensemble needs to reach a relative r.m.s.
error ``eps``, with the Marcenko-Pastur and exponential-kernel closed forms
as reference predictions.
"""

__version__ = "0.1.0"

from .ensembles import EnsembleSpec, GramResult, gram_spectrum, sample_correlated, sample_iid
from .estimators import EpsilonEmbedding, KLExpansion
from .expanalytic import ExpSpectrum, asymptotic_t, solve_thetas
from .kernels import KernelSpec, MemoryCapExceeded, PointCloud, assemble_covariance, build_domain
from .mplaw import MPParams, asymptotic_ratio, best_k_error, solve_quantile
from .spectra import (
    BoundViolation,
    ComplexityReport,
    ConvergenceError,
    NotPSDError,
    Spectrum,
    complexity_report,
    n_over,
    n_under,
    sym_eig,
)

__all__ = [
    "__version__",
    "BoundViolation",
    "ComplexityReport",
    "ConvergenceError",
    "EnsembleSpec",
    "EpsilonEmbedding",
    "ExpSpectrum",
    "GramResult",
    "KLExpansion",
    "KernelSpec",
    "MPParams",
    "MemoryCapExceeded",
    "NotPSDError",
    "PointCloud",
    "Spectrum",
    "assemble_covariance",
    "asymptotic_ratio",
    "asymptotic_t",
    "best_k_error",
    "build_domain",
    "complexity_report",
    "gram_spectrum",
    "n_over",
    "n_under",
    "sample_correlated",
    "sample_iid",
    "solve_quantile",
    "solve_thetas",
    "sym_eig",
]
