"""Symmetric eigendecomposition and KL truncation metrics.

All metrics take a :class:`Spectrum` whose eigenvalues are sorted in
non-increasing order. ``n_under`` is the minimal KL truncation reaching a
relative r.m.s. error ``eps``; ``n_over`` is the ``eps``-rank, the number of
eigenvalues with ``sqrt(lambda) >= eps``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

__all__ = [
    "ConvergenceError",
    "NotPSDError",
    "Spectrum",
    "ComplexityReport",
    "sym_eig",
    "n_under",
    "n_over",
    "lower_bound",
    "upper_bound_nover",
    "truncation_error",
    "decay_fit",
    "complexity_report",
    "BoundViolation",
    "check_bounds",
]

_EPS_MACH = np.finfo(float).eps


class ConvergenceError(RuntimeError):
    """An iterative solver failed to converge within its iteration cap."""


class NotPSDError(ValueError):
    """A matrix expected to be positive semidefinite has a significantly negative eigenvalue."""


class BoundViolation(AssertionError):
    """A computed complexity violated one of the general trace/Frobenius bounds."""


@dataclass
class Spectrum:
    """Descending eigenvalues with the matrix trace and squared Frobenius norm.

    ``trace`` and ``frobenius_sq`` are taken from the decomposed matrix when
    one exists, otherwise from the eigenvalues themselves.
    """

    eigenvalues: np.ndarray
    trace: float
    frobenius_sq: float
    vectors: np.ndarray | None = None

    @classmethod
    def from_eigenvalues(cls, eigenvalues):
        lam = np.sort(np.asarray(eigenvalues, dtype=float))[::-1].copy()
        return cls(lam, float(np.sum(lam)), float(np.sum(lam * lam)))

    @property
    def n(self):
        return self.eigenvalues.shape[0]

    def __len__(self):
        return self.n

    def tails(self):
        """``tails[N] = sum(lambda[N:])`` for ``N = 0..n``, summed smallest first."""
        lam = self.eigenvalues
        out = np.zeros(lam.shape[0] + 1)
        out[:-1] = np.cumsum(lam[::-1])[::-1]
        return out


@dataclass
class ComplexityReport:
    eps: float
    n_under: int
    n_over: int
    lower_bound: float
    upper_bound_nover: float
    tail_energy_fraction: float


def sym_eig(m, want_vectors=False):
    """Full spectrum of a dense symmetric matrix, in descending order.

    LAPACK ``dsyev`` (Householder tridiagonalization followed by implicit
    QL/QR) does the work. Eigenvalues in ``[-n u lambda_1, 0)`` are rounding
    noise and are clamped to zero; anything more negative raises
    :class:`NotPSDError`.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise ValueError(f"expected a non-empty square matrix, got shape {m.shape}")
    n = m.shape[0]
    scale = float(np.max(np.abs(m))) if n else 0.0
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    if np.max(np.abs(m - m.T)) > 1e-12 * max(scale, 1.0):
        raise ValueError("matrix is not symmetric")
    try:
        out = scipy.linalg.eigh(
            m, eigvals_only=not want_vectors, driver="ev", check_finite=False
        )
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"symmetric eigensolver did not converge: {exc}") from exc
    if want_vectors:
        lam, vecs = out
        vecs = vecs[:, ::-1].copy()
    else:
        lam, vecs = out, None
    lam = lam[::-1].copy()

    lam1 = max(lam[0], 0.0)
    floor = -n * _EPS_MACH * lam1
    if lam[-1] < floor:
        raise NotPSDError(
            f"eigenvalue {lam[-1]:.3e} is below the rounding floor {floor:.3e}; "
            "the matrix is not positive semidefinite"
        )
    np.clip(lam, 0.0, None, out=lam)
    trace = float(np.trace(m))
    frob = float(np.einsum("ij,ij->", m, m))
    return Spectrum(lam, trace, frob, vecs)


def _check_eps(eps, upper=1.0):
    if not (np.isfinite(eps) and eps > 0 and (upper is None or eps <= upper)):
        bound = "(0, 1]" if upper is not None else "(0, inf)"
        raise ValueError(f"eps must lie in {bound}, got {eps!r}")


def n_under(s, eps):
    """Smallest ``N`` with ``sum(lambda[N:]) <= eps**2 * sum(lambda)``."""
    _check_eps(eps)
    tails = s.tails()
    total = tails[0]
    if not total > 0:
        raise ValueError("spectrum has zero trace")
    return int(np.argmax(tails <= eps * eps * total))


def n_over(s, eps):
    """Number of eigenvalues with ``sqrt(lambda) >= eps`` (0 if none)."""
    _check_eps(eps, upper=None)
    return int(np.count_nonzero(np.sqrt(s.eigenvalues) >= eps))


def lower_bound(trace, frobenius_sq, eps):
    """``(1 - eps**2)**2 * trace**2 / frobenius_sq``, a lower bound on ``n_under``."""
    _check_eps(eps)
    if not (trace > 0 and frobenius_sq > 0):
        raise ValueError("trace and frobenius_sq must be positive")
    return (1.0 - eps * eps) ** 2 * trace * trace / frobenius_sq


def upper_bound_nover(frobenius_sq, eps):
    """``frobenius_sq / eps**4``, an upper bound on ``n_over``."""
    _check_eps(eps, upper=None)
    return frobenius_sq / eps**4


def truncation_error(s, n_terms):
    """Relative r.m.s. error ``sqrt(sum(lambda[N:]) / sum(lambda))`` of an N-term truncation."""
    if not 0 <= n_terms <= s.n:
        raise ValueError(f"n_terms must lie in [0, {s.n}], got {n_terms}")
    tails = s.tails()
    if not tails[0] > 0:
        raise ValueError("spectrum has zero trace")
    return float(np.sqrt(tails[n_terms] / tails[0]))


def decay_fit(s, model="power", d=1, min_points=10):
    """Fit the eigenvalue decay rate.

    ``power`` regresses ``log lambda_n`` on ``log n`` and returns the exponent
    ``p/d`` in ``lambda_n ~ n**(-p/d)``. ``stretched_exp`` regresses
    ``log lambda_n`` on ``n**(1/d)`` and returns ``c`` in
    ``lambda_n ~ exp(-c n**(1/d))``. The leading eigenvalue and everything
    below ``1e-14 * lambda_1`` are excluded.
    """
    lam = s.eigenvalues
    if lam.size == 0 or not lam[0] > 0:
        raise ValueError("spectrum has no positive eigenvalues")
    usable = np.flatnonzero(lam > 1e-14 * lam[0])
    last = usable[-1] if usable.size else 0
    idx = np.arange(1, last + 1)  # zero-based, i.e. n = 2..last+1
    if idx.size < min_points:
        raise ValueError(
            f"need at least {min_points} eigenvalues above the noise floor past the first, "
            f"found {idx.size}"
        )
    n = idx + 1.0
    y = np.log(lam[idx])
    if model == "power":
        x = np.log(n)
    elif model == "stretched_exp":
        x = n ** (1.0 / d)
    else:
        raise ValueError(f"unknown decay model {model!r}")
    slope, _ = np.polyfit(x, y, 1)
    return float(-slope)


def complexity_report(s, eps):
    lb = lower_bound(s.trace, s.frobenius_sq, eps) if eps < 1 else 0.0
    nu = n_under(s, eps)
    return ComplexityReport(
        eps=float(eps),
        n_under=nu,
        n_over=n_over(s, eps),
        lower_bound=lb,
        upper_bound_nover=upper_bound_nover(s.frobenius_sq, eps),
        tail_energy_fraction=truncation_error(s, nu) ** 2,
    )


def check_bounds(report, rtol=1e-9):
    """Raise :class:`BoundViolation` unless ``n_under >= lower_bound`` and ``n_over <= upper``.

    ``rtol`` absorbs rounding in the bounds themselves, not modelling slack.
    """
    if report.n_under < report.lower_bound * (1.0 - rtol):
        raise BoundViolation(
            f"n_under={report.n_under} < lower bound {report.lower_bound:.6g} at eps={report.eps}"
        )
    if report.n_over > report.upper_bound_nover * (1.0 + rtol):
        raise BoundViolation(
            f"n_over={report.n_over} > upper bound {report.upper_bound_nover:.6g} at eps={report.eps}"
        )
