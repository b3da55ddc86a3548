"""Marcenko-Pastur measure: density, partial moments, quantiles and embedding ratios.

The continuous part ``nu`` of the measure lives on ``[lambda_-, lambda_+]``
with square-root zeros at both edges. Every integral against ``nu`` is taken
in the variable ``u`` defined by ``x = lambda_- + (lambda_+ - lambda_-) sin(u)**2``,
which turns ``dnu`` into

    (lambda_+ - lambda_-)**2 / (pi sigma2 alpha) * sin(u)**2 cos(u)**2 / x  du

on ``u in [0, pi/2]``: smooth for every ``alpha``, including ``alpha == 1``
where ``lambda_- = 0`` and the density blows up like ``x**-1/2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .spectra import ConvergenceError

__all__ = [
    "MPParams",
    "adaptive_simpson",
    "mp_density",
    "partial_moment",
    "solve_quantile",
    "asymptotic_ratio",
    "asymptotic_eps_rank_ratio",
    "rho_derivative",
    "best_k_error",
]

QUAD_TOL = 1e-11
BISECT_MAX_ITER = 200


@dataclass(frozen=True)
class MPParams:
    """Entry variance ``sigma2`` and aspect ratio ``alpha = lim n/d``."""

    sigma2: float = 1.0
    alpha: float = 1.0
    lambda_minus: float = field(init=False)
    lambda_plus: float = field(init=False)

    def __post_init__(self):
        if not (math.isfinite(self.sigma2) and self.sigma2 > 0):
            raise ValueError(f"sigma2 must be positive, got {self.sigma2!r}")
        if not (math.isfinite(self.alpha) and self.alpha > 0):
            raise ValueError(f"alpha must be positive, got {self.alpha!r}")
        root = math.sqrt(self.alpha)
        object.__setattr__(self, "lambda_minus", self.sigma2 * (1.0 - root) ** 2)
        object.__setattr__(self, "lambda_plus", self.sigma2 * (1.0 + root) ** 2)

    @property
    def width(self):
        return self.lambda_plus - self.lambda_minus

    @property
    def atom(self):
        """Point mass at zero, ``1 - 1/alpha`` when ``alpha > 1``."""
        return max(0.0, 1.0 - 1.0 / self.alpha)

    @property
    def continuous_mass(self):
        return min(1.0, 1.0 / self.alpha)


def adaptive_simpson(f, a, b, tol=QUAD_TOL, max_depth=50):
    """Adaptive Simpson quadrature with Richardson correction.

    Intervals are split until the local error estimate ``|S2 - S1| / 15``
    drops below the tolerance share of that interval.
    """
    if a == b:
        return 0.0
    fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    total = 0.0
    stack = [(a, b, fa, fm, fb, whole, tol, 0)]
    while stack:
        lo, hi, flo, fmid, fhi, est, eps, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        lm, rm = 0.5 * (lo + mid), 0.5 * (mid + hi)
        flm, frm = f(lm), f(rm)
        left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid)
        right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi)
        delta = left + right - est
        if depth >= max_depth or abs(delta) <= 15.0 * eps:
            total += left + right + delta / 15.0
        else:
            stack.append((mid, hi, fmid, frm, fhi, right, 0.5 * eps, depth + 1))
            stack.append((lo, mid, flo, flm, fmid, left, 0.5 * eps, depth + 1))
    return total


def mp_density(x, p):
    """Density of the continuous part ``nu``; zero outside the support."""
    lo, hi = p.lambda_minus, p.lambda_plus
    if x <= lo or x >= hi or x <= 0.0:
        return 0.0
    return math.sqrt((hi - x) * (x - lo)) / (2.0 * math.pi * p.sigma2 * p.alpha * x)


def _to_u(y, p):
    frac = (y - p.lambda_minus) / p.width
    return math.asin(math.sqrt(min(1.0, max(0.0, frac))))


def _nu_integral(u_lo, u_hi, p, order, tol=QUAD_TOL):
    lo, width = p.lambda_minus, p.width
    c = width * width / (math.pi * p.sigma2 * p.alpha)
    if order == 1:
        def integrand(u):
            s, co = math.sin(u), math.cos(u)
            return c * s * s * co * co
    elif order == 0:
        if lo == 0.0:
            # sin^2 cancels against x = width sin^2
            def integrand(u):
                co = math.cos(u)
                return c * co * co / width
        else:
            def integrand(u):
                s, co = math.sin(u), math.cos(u)
                s2 = s * s
                return c * s2 * co * co / (lo + width * s2)
    else:
        raise ValueError(f"order must be 0 or 1, got {order!r}")
    return adaptive_simpson(integrand, u_lo, u_hi, tol)


def _check_in_support(y, p):
    slack = 1e-14 * max(1.0, p.lambda_plus)
    if not (p.lambda_minus - slack <= y <= p.lambda_plus + slack):
        raise ValueError(
            f"y={y!r} lies outside the support [{p.lambda_minus!r}, {p.lambda_plus!r}]"
        )


def partial_moment(y, p, order=1, tol=QUAD_TOL):
    """``integral_{lambda_-}^{y} x**order dnu(x)``.

    The atom at zero (``alpha > 1``) is not part of ``nu`` and is excluded.
    """
    _check_in_support(y, p)
    return _nu_integral(0.0, _to_u(y, p), p, order, tol)


def _bisect(g, lo, hi, xtol):
    """Root of an increasing function ``g`` on ``[lo, hi]``."""
    for _ in range(BISECT_MAX_ITER):
        if hi - lo <= xtol:
            return 0.5 * (lo + hi)
        mid = 0.5 * (lo + hi)
        if g(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    raise ConvergenceError(f"bisection did not reach xtol={xtol:g} in {BISECT_MAX_ITER} steps")


def _check_eps(eps):
    if not (math.isfinite(eps) and 0.0 < eps <= 1.0):
        raise ValueError(f"eps must lie in (0, 1], got {eps!r}")


def solve_quantile(eps, p):
    """The ``y`` with ``integral_{lambda_-}^{y} x dmu(x) = sigma2 * eps**2``.

    Bisection on ``y`` to ``1e-12 * (lambda_+ - lambda_-)``.
    """
    _check_eps(eps)
    if eps == 1.0:
        return p.lambda_plus
    target = p.sigma2 * eps * eps
    tol = min(QUAD_TOL, 1e-4 * target)
    return _bisect(
        lambda y: partial_moment(y, p, 1, tol) - target,
        p.lambda_minus,
        p.lambda_plus,
        1e-12 * p.width,
    )


def asymptotic_ratio(eps, p):
    """Limit of ``n_under / n`` for i.i.d. entries: ``nu([y, lambda_+])``."""
    _check_eps(eps)
    if eps == 1.0:
        return 0.0
    y = solve_quantile(eps, p)
    return _nu_integral(_to_u(y, p), 0.5 * math.pi, p, 0)


def asymptotic_eps_rank_ratio(eps, d, p):
    """Limit of ``R / n`` where ``R`` counts Gram eigenvalues with ``sqrt(lambda) >= eps``.

    The Gram matrix is the unnormalized ``V^T V = d * A_hat``, so the
    threshold on the normalized spectrum is ``eps**2 / d``. For
    ``alpha > 1`` the zero atom always falls below the threshold.
    """
    if not (math.isfinite(eps) and eps > 0):
        raise ValueError(f"eps must be positive, got {eps!r}")
    if d < 1:
        raise ValueError(f"d must be at least 1, got {d!r}")
    t = eps * eps / d
    below = p.atom
    if t > p.lambda_minus:
        below += _nu_integral(0.0, _to_u(min(t, p.lambda_plus), p), p, 0)
    return min(1.0, max(0.0, 1.0 - below))


def rho_derivative(eps, p):
    """``d rho / d eps = -2 sigma2 eps / y(eps)``."""
    if not (math.isfinite(eps) and 0.0 < eps < 1.0):
        raise ValueError(f"eps must lie in (0, 1), got {eps!r}")
    return -2.0 * p.sigma2 * eps / solve_quantile(eps, p)


def best_k_error(k_over_n, p):
    """Asymptotic relative r.m.s. error of the best ``k``-dimensional subspace.

    Solves ``mu([0, y]) = 1 - k/n`` (atom included) and returns
    ``sqrt(integral_{lambda_-}^{y} x dmu / sigma2)``. When ``alpha > 1`` and
    ``k/n >= 1/alpha`` the whole non-null spectrum is kept and the error is 0.
    """
    if not (math.isfinite(k_over_n) and 0.0 <= k_over_n <= 1.0):
        raise ValueError(f"k_over_n must lie in [0, 1], got {k_over_n!r}")
    target = (1.0 - k_over_n) - p.atom
    if target <= 0.0:
        return 0.0
    if k_over_n == 0.0:
        y = p.lambda_plus
    else:
        y = _bisect(
            lambda y: partial_moment(y, p, 0) - target,
            p.lambda_minus,
            p.lambda_plus,
            1e-13 * p.width,
        )
    moment = partial_moment(y, p, 1)
    return math.sqrt(min(1.0, max(0.0, moment / p.sigma2)))
