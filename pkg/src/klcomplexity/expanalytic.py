"""Closed-form spectrum of the exponential covariance matrix ``C[i, j] = exp(-tau |i - j|)``.

The k-th eigenvector is ``e_j = cos(j theta_k + psi_k)`` with
``tan(psi_k) = (cos theta_k - e**tau) / sin theta_k`` and
``psi_k in (-pi/2, 0)``. The angle ``theta_k`` is the root of

    F_k(theta) = (n + 1) theta + 2 psi(theta) - (k - 1) pi

inside ``((k - 1) pi / n, k pi / (n + 1))``, and the eigenvalue is
``sinh(tau) / (cosh(tau) - cos(theta_k))``. ``F_k`` is strictly increasing
(its derivative exceeds ``n - 1``), so the bracket holds exactly one root.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectra import ConvergenceError, Spectrum, n_under

__all__ = [
    "ExpSpectrum",
    "solve_thetas",
    "theta_residual",
    "eigenvectors",
    "eigenvector_norm_sq",
    "asymptotic_t",
    "empirical_ratio",
]

FIXED_POINT_TOL = 1e-13
FIXED_POINT_MAX_ITER = 100
RESIDUAL_TOL = 1e-11


@dataclass
class ExpSpectrum:
    n: int
    tau: float
    thetas: np.ndarray
    lambdas: np.ndarray
    psis: np.ndarray | None = None
    fallback_count: int = 0

    def to_spectrum(self):
        lam = self.lambdas
        return Spectrum(lam.copy(), float(np.sum(lam)), float(np.sum(lam * lam)))


def _psi(theta, tau):
    # arctan2 with a positive second argument is arctan of the quotient, and
    # stays finite (-pi/2) at theta = 0
    return np.arctan2(np.cos(theta) - np.exp(tau), np.sin(theta))


def theta_residual(theta, k, n, tau):
    """``(n + 1) theta + 2 psi(theta) - (k - 1) pi``."""
    return (n + 1) * theta + 2.0 * _psi(theta, tau) - (k - 1) * np.pi


def _brackets(k, n):
    return (k - 1) * np.pi / n, k * np.pi / (n + 1)


def _eigenvalues(theta, tau):
    # cosh(tau) - cos(theta) without cancellation for small tau, theta
    denom = 2.0 * np.sinh(0.5 * tau) ** 2 + 2.0 * np.sin(0.5 * theta) ** 2
    return np.sinh(tau) / denom


def _bisect(k, n, tau, lo, hi):
    # vectorized bisection; F is increasing and changes sign on [lo, hi]
    lo, hi = lo.copy(), hi.copy()
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        neg = theta_residual(mid, k, n, tau) < 0.0
        lo = np.where(neg, mid, lo)
        hi = np.where(neg, hi, mid)
        if np.all(hi - lo <= 4.0 * np.spacing(hi)):
            break
    return 0.5 * (lo + hi)


def solve_thetas(n, tau, with_psis=False):
    """Solve for every ``theta_k`` and the matching eigenvalues.

    Fixed-point iteration ``theta <- ((k-1) pi - 2 psi(theta)) / (n + 1)`` from
    ``max((k-1) pi / n, pi / (2 (n + 1)))`` runs for at most 100 sweeps. Roots
    whose step or residual misses tolerance are re-solved by bisection on the
    bracket. Eigenvalues are returned in descending order.
    """
    n = int(n)
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    if not (np.isfinite(tau) and tau > 0):
        raise ValueError(f"tau must be positive, got {tau!r}")
    tau = float(tau)
    k = np.arange(1, n + 1, dtype=float)
    lo, hi = _brackets(k, n)

    theta = np.maximum(lo, np.pi / (2.0 * (n + 1)))
    active = np.ones(n, dtype=bool)
    for _ in range(FIXED_POINT_MAX_ITER):
        ka = k[active]
        new = ((ka - 1.0) * np.pi - 2.0 * _psi(theta[active], tau)) / (n + 1)
        step = np.abs(new - theta[active])
        theta[active] = new
        still = step > FIXED_POINT_TOL
        if not still.any():
            active[:] = False
            break
        active[np.flatnonzero(active)[~still]] = False

    resid_tol = max(RESIDUAL_TOL, 8.0 * np.spacing((n + 1) * np.pi))
    outside = (theta <= lo) | (theta >= hi) | ~np.isfinite(theta)
    bad = active | outside | (np.abs(theta_residual(theta, k, n, tau)) > RESIDUAL_TOL)
    fallback = int(np.count_nonzero(bad))
    if fallback:
        theta[bad] = _bisect(k[bad], n, tau, lo[bad], hi[bad])
        if np.max(np.abs(theta_residual(theta[bad], k[bad], n, tau))) > resid_tol:
            raise ConvergenceError("theta bisection fallback missed the residual tolerance")

    lam = _eigenvalues(theta, tau)
    psis = _psi(theta, tau) if with_psis else None
    return ExpSpectrum(n, tau, theta, lam, psis, fallback)


def eigenvectors(spec, normalize=False):
    """Columns ``e_j = cos(j theta_k + psi_k)``, ``j = 1..n``.

    The unnormalized squared norm of column ``k`` is
    ``n/2 + (-1)**(k-1) sin(n theta_k) / (2 sin theta_k)``; ``normalize``
    divides by its square root.
    """
    psis = spec.psis if spec.psis is not None else _psi(spec.thetas, spec.tau)
    j = np.arange(1, spec.n + 1, dtype=float)[:, None]
    vecs = np.cos(j * spec.thetas[None, :] + psis[None, :])
    if normalize:
        vecs /= np.sqrt(eigenvector_norm_sq(spec))[None, :]
    return vecs


def eigenvector_norm_sq(spec):
    k = np.arange(1, spec.n + 1)
    sign = np.where(k % 2 == 1, 1.0, -1.0)
    th = spec.thetas
    return spec.n / 2.0 + sign * np.sin(spec.n * th) / (2.0 * np.sin(th))


def asymptotic_t(eps, tau):
    """``lim n_under / n = (2/pi) arctan(tanh(tau/2) tan(pi/2 (1 - eps**2)))``."""
    if not (np.isfinite(eps) and 0.0 < eps <= 1.0):
        raise ValueError(f"eps must lie in (0, 1], got {eps!r}")
    if not (np.isfinite(tau) and tau > 0):
        raise ValueError(f"tau must be positive, got {tau!r}")
    return float(
        2.0 / np.pi * np.arctan(np.tanh(0.5 * tau) * np.tan(0.5 * np.pi * (1.0 - eps * eps)))
    )


def empirical_ratio(n, tau, eps):
    """``n_under / n`` from the analytic finite-``n`` spectrum."""
    spec = solve_thetas(n, tau)
    return n_under(spec.to_spectrum(), eps) / n
