"""Seeded random-vector ensembles, Gram spectra and truncated-KL field samples.

Random numbers come from a single documented recipe, :data:`RNG_NAME`:
Philox-4x64 keyed through ``numpy.random.SeedSequence([seed, stream])``.
Raw 64-bit words are mapped to uniforms ``((w >> 11) + 0.5) / 2**53`` in the
open interval (0, 1); normals are their inverse normal CDF and Rademacher
signs come from the top bit. Only the bit generator's raw stream is used, so
the draws do not depend on numpy's distribution code.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from .spectra import Spectrum, n_under, sym_eig

__all__ = [
    "RNG_NAME",
    "DEFAULT_MAX_ENTRIES",
    "EnsembleSpec",
    "GramResult",
    "bit_generator",
    "standard_normal",
    "rademacher",
    "sample_iid",
    "sample_correlated",
    "cholesky_factor",
    "gram_spectrum",
    "empirical_embedding_dim",
    "sample_kl_field",
]

RNG_NAME = "philox4x64-seedseq/ndtri-v1"
DEFAULT_MAX_ENTRIES = 50_000_000
DISTS = ("gaussian", "rademacher")


def bit_generator(seed, stream=0):
    if seed < 0 or stream < 0:
        raise ValueError("seed and stream must be non-negative integers")
    return np.random.Philox(np.random.SeedSequence([int(seed), int(stream)]))


def _uniform_open(bg, size):
    raw = bg.random_raw(size)
    return ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * (2.0**-53)


def standard_normal(seed, stream, shape):
    size = int(np.prod(shape))
    return ndtri(_uniform_open(bit_generator(seed, stream), size)).reshape(shape)


def rademacher(seed, stream, shape):
    size = int(np.prod(shape))
    top = bit_generator(seed, stream).random_raw(size) >> np.uint64(63)
    return (2.0 * top.astype(np.float64) - 1.0).reshape(shape)


@dataclass
class EnsembleSpec:
    """``n`` vectors in ``R^d`` with i.i.d. mean-0, variance-1 entries.

    With ``covariance`` set, the vectors are the columns of ``V = X L^T``
    where ``C = L L^T``.
    """

    n: int
    d: int
    dist: str = "gaussian"
    seed: int = 0
    covariance: np.ndarray | None = None
    stream: int = 0

    def __post_init__(self):
        if self.n < 1 or self.d < 1:
            raise ValueError(f"n and d must be positive, got n={self.n}, d={self.d}")
        if self.dist == "bernoulli":
            self.dist = "rademacher"
        if self.dist not in DISTS:
            raise ValueError(f"unknown distribution {self.dist!r}; expected one of {DISTS}")
        if self.covariance is not None:
            c = np.asarray(self.covariance, dtype=float)
            if c.shape != (self.n, self.n):
                raise ValueError(f"covariance must be {self.n}x{self.n}, got {c.shape}")
            self.covariance = c


@dataclass
class GramResult:
    """Spectrum of ``A_hat = V^T V / d``."""

    eigenvalues_hat: np.ndarray
    trace_hat: float
    frobenius_sq_hat: float
    n: int
    d: int

    def to_spectrum(self):
        return Spectrum(self.eigenvalues_hat, self.trace_hat, self.frobenius_sq_hat)


def _draw(spec, max_entries):
    cap = DEFAULT_MAX_ENTRIES if max_entries is None else max_entries
    if spec.n * spec.d > cap:
        raise MemoryError(f"{spec.d}x{spec.n} ensemble exceeds the cap of {cap} entries")
    draw = standard_normal if spec.dist == "gaussian" else rademacher
    return draw(spec.seed, spec.stream, (spec.d, spec.n))


def sample_iid(spec, max_entries=None):
    """The ``d x n`` matrix ``V`` whose column ``i`` is the vector ``v_i``."""
    if spec.covariance is not None:
        raise ValueError("spec carries a covariance; use sample_correlated")
    return _draw(spec, max_entries)


def cholesky_factor(c):
    """Lower Cholesky factor; on failure retries once with ``1e-12 * trace/n`` jitter."""
    c = np.asarray(c, dtype=float)
    try:
        return np.linalg.cholesky(c)
    except np.linalg.LinAlgError:
        n = c.shape[0]
        jitter = 1e-12 * float(np.trace(c)) / n
        try:
            return np.linalg.cholesky(c + jitter * np.eye(n))
        except np.linalg.LinAlgError as exc:
            raise np.linalg.LinAlgError(
                "covariance is not positive definite even after diagonal jitter"
            ) from exc


def sample_correlated(spec, max_entries=None):
    """``V = X L^T`` with ``X`` drawn as in :func:`sample_iid`."""
    if spec.covariance is None:
        raise ValueError("spec has no covariance; use sample_iid")
    return _draw(spec, max_entries) @ cholesky_factor(spec.covariance).T


def gram_spectrum(v):
    """Eigenvalues of ``V^T V / d`` in descending order."""
    v = np.asarray(v, dtype=float)
    if v.ndim != 2 or v.size == 0:
        raise ValueError(f"expected a non-empty d x n matrix, got shape {v.shape}")
    d, n = v.shape
    a = v.T @ v
    a /= d
    # matmul need not be bitwise symmetric; keep the upper triangle
    a = np.triu(a) + np.triu(a, 1).T
    s = sym_eig(a)
    return GramResult(s.eigenvalues, s.trace, s.frobenius_sq, n, d)


def empirical_embedding_dim(g, eps):
    """``n_under`` of the Gram spectrum; scale invariant, so ``A_hat`` and ``A`` agree."""
    return n_under(g.to_spectrum(), eps)


def sample_kl_field(eigenvalues, eigenvectors, n_terms, n_samples, seed=0, stream=0):
    """Realizations of the centered truncated KL sum ``sum_n sqrt(lambda_n) e_n Y_n``.

    ``Y_n`` are i.i.d. standard normal. Returns an array of shape
    ``(n_samples, n_points)``.
    """
    lam = np.asarray(eigenvalues, dtype=float)
    vecs = np.asarray(eigenvectors, dtype=float)
    n_points = vecs.shape[0]
    if not 0 <= n_terms <= min(lam.shape[0], vecs.shape[1]):
        raise ValueError(f"n_terms={n_terms} exceeds the {lam.shape[0]} available eigenpairs")
    if n_terms == 0:
        return np.zeros((n_samples, n_points))
    y = standard_normal(seed, stream, (n_samples, n_terms))
    basis = vecs[:, :n_terms] * np.sqrt(np.clip(lam[:n_terms], 0.0, None))[None, :]
    return y @ basis.T
