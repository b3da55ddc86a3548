"""scikit-learn style estimators over the spectral machinery.

``KLExpansion`` is fitted on point coordinates and then maps field
realizations on those points to KL coefficients. ``EpsilonEmbedding`` is
fitted on a set of vectors (one per row) and projects onto the smallest
subspace that embeds them to relative r.m.s. error ``eps``.
"""

from __future__ import annotations

import numbers

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from . import ensembles, kernels, mplaw, spectra

__all__ = ["KLExpansion", "EpsilonEmbedding"]


def _validate_eps(eps):
    if not isinstance(eps, numbers.Real) or not 0.0 < eps <= 1.0:
        raise ValueError(f"eps must be a real number in (0, 1], got {eps!r}")


class KLExpansion(TransformerMixin, BaseEstimator):
    """Truncated Karhunen-Loeve expansion of a stationary field on a point set.

    Parameters
    ----------
    kernel : str, default="squared_exponential"
        Kernel family, see :data:`klcomplexity.kernels.FAMILIES`.
    sigma : float, default=0.1
        Correlation length in the units of the coordinates.
    eps : float, default=0.1
        Relative r.m.s. tolerance that fixes the number of retained terms.
    metric : {"euclidean", "geodesic"}, default="euclidean"
        ``geodesic`` expects unit vectors on the sphere.
    max_points : int, default=12000
        Dense-matrix guard.

    Attributes
    ----------
    eigenvalues_ : ndarray of shape (n_points,)
    components_ : ndarray of shape (n_components_, n_points)
        Leading orthonormal eigenvectors.
    n_components_ : int
        ``n_under`` at ``eps``.
    n_over_ : int
        Number of eigenvalues with ``sqrt(lambda) >= eps``.
    lower_bound_, upper_bound_ : float
        General bounds on ``n_components_`` and ``n_over_``.
    """

    def __init__(self, kernel="squared_exponential", sigma=0.1, eps=0.1, metric="euclidean",
                 max_points=kernels.DEFAULT_MAX_POINTS):
        self.kernel = kernel
        self.sigma = sigma
        self.eps = eps
        self.metric = metric
        self.max_points = max_points

    def fit(self, X, y=None):
        """Assemble the covariance on the points ``X`` of shape (n_points, dim) and decompose it."""
        _validate_eps(self.eps)
        X = check_array(X, ensure_min_samples=1)
        spec = kernels.KernelSpec(self.kernel, self.sigma)
        cloud = kernels.PointCloud(X, self.metric, np.nan, X.shape[1], "custom")
        m = kernels.assemble_covariance(spec, cloud, max_points=self.max_points)
        s = spectra.sym_eig(m, want_vectors=True)
        rep = spectra.complexity_report(s, self.eps)
        self.points_ = X
        self.spectrum_ = s
        self.eigenvalues_ = s.eigenvalues
        self.n_components_ = rep.n_under
        self.n_over_ = rep.n_over
        self.lower_bound_ = rep.lower_bound
        self.upper_bound_ = rep.upper_bound_nover
        self.components_ = s.vectors[:, : rep.n_under].T.copy()
        self.n_features_in_ = X.shape[0]
        return self

    def transform(self, X):
        """Standardized KL coefficients of realizations ``X`` (n_samples, n_points)."""
        check_is_fitted(self, "components_")
        X = check_array(X)
        if X.shape[1] != self.points_.shape[0]:
            raise ValueError(
                f"realizations have {X.shape[1]} values, expected {self.points_.shape[0]}"
            )
        lam = self.eigenvalues_[: self.n_components_]
        return (X @ self.components_.T) / np.sqrt(lam)[None, :]

    def inverse_transform(self, Y):
        check_is_fitted(self, "components_")
        Y = check_array(Y)
        lam = self.eigenvalues_[: self.n_components_]
        return (Y * np.sqrt(lam)[None, :]) @ self.components_

    def sample(self, n_samples=1, random_state=0, n_terms=None):
        """Draw realizations of the truncated field; ``n_terms`` defaults to ``n_components_``."""
        check_is_fitted(self, "components_")
        n_terms = self.n_components_ if n_terms is None else n_terms
        return ensembles.sample_kl_field(
            self.eigenvalues_, self.spectrum_.vectors, n_terms, n_samples, seed=random_state
        )

    def truncation_error(self, n_terms=None):
        check_is_fitted(self, "spectrum_")
        n_terms = self.n_components_ if n_terms is None else n_terms
        return spectra.truncation_error(self.spectrum_, n_terms)


class EpsilonEmbedding(TransformerMixin, BaseEstimator):
    """Smallest linear subspace embedding a vector set to relative r.m.s. error ``eps``.

    Rows of ``X`` are the vectors ``v_i`` in ``R^d``. The subspace is spanned
    by the leading right singular vectors of ``X``.

    Attributes
    ----------
    n_components_ : int
    components_ : ndarray of shape (n_components_, d)
    gram_ : GramResult
        Spectrum of ``X X^T / d``.
    lower_bound_ : float
        ``(1 - eps**2)**2 tr(A)**2 / ||A||_F**2``.
    mp_prediction_ : float
        ``n * rho(eps)`` for i.i.d. entries at the fitted aspect ratio and
        the empirical entry variance.
    """

    def __init__(self, eps=0.1):
        self.eps = eps

    def fit(self, X, y=None):
        _validate_eps(self.eps)
        X = check_array(X, ensure_min_samples=1)
        n, d = X.shape
        g = ensembles.gram_spectrum(X.T)
        n_comp = ensembles.empirical_embedding_dim(g, self.eps)
        # right singular vectors from the leading Gram eigenvalues
        _, sv, vt = np.linalg.svd(X, full_matrices=False)
        self.components_ = vt[:n_comp].copy()
        self.singular_values_ = sv
        self.gram_ = g
        self.n_components_ = n_comp
        self.lower_bound_ = (
            spectra.lower_bound(g.trace_hat, g.frobenius_sq_hat, self.eps) if g.trace_hat > 0 else 0.0
        )
        var = float(np.var(X))
        self.mp_prediction_ = (
            n * mplaw.asymptotic_ratio(self.eps, mplaw.MPParams(var, n / d)) if var > 0 else np.nan
        )
        self.n_features_in_ = d
        return self

    def transform(self, X):
        check_is_fitted(self, "components_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, expected {self.n_features_in_}")
        return X @ self.components_.T

    def inverse_transform(self, Y):
        check_is_fitted(self, "components_")
        return check_array(Y) @ self.components_

    def relative_error(self, X):
        """Relative r.m.s. residual of projecting ``X`` onto the fitted subspace."""
        X = check_array(X)
        resid = X - self.inverse_transform(self.transform(X))
        return float(np.sqrt(np.sum(resid**2) / np.sum(X**2)))
