"""Parameter sweeps behind the scaling-law experiments.

Every sweep returns rows in declared order, whatever the thread count, and
checks the general bounds ``n_under >= (1 - eps**2)**2 tr**2 / ||.||_F**2``
and ``n_over <= ||.||_F**2 / eps**4`` on every row it emits.
"""

from __future__ import annotations

import math
import time
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import ensembles, expanalytic, kernels, mplaw, spectra

__all__ = [
    "SweepRow",
    "FitResult",
    "row_seed",
    "fit_scaling",
    "kernel_spectrum",
    "resolution_sweep",
    "sigma_sweep",
    "eps_sweep",
    "mp_comparison",
    "exp_kernel_comparison",
]


@dataclass
class SweepRow:
    experiment_id: str
    kernel: str
    domain: str
    sigma: float | None
    r: float | None
    eps: float
    n: int
    n_under: int | None
    n_over: int | None
    lower_bound: float | None
    upper_bound: float | None = None
    h: float | None = None
    wall_time: float = 0.0
    extra: dict = field(default_factory=dict)

    def as_dict(self, timings=False):
        out = {
            "experiment_id": self.experiment_id,
            "kernel": self.kernel,
            "domain": self.domain,
            "sigma": self.sigma,
            "r": self.r,
            "h": self.h,
            "eps": self.eps,
            "n": self.n,
            "n_under": self.n_under,
            "n_over": self.n_over,
            "lower_bound": self.lower_bound,
            "upper_bound": self.upper_bound,
        }
        out.update(self.extra)
        if timings:
            out["wall_time"] = self.wall_time
        return out


@dataclass
class FitResult:
    """OLS fit on transformed coordinates.

    ``log_log_linear`` regresses ``log y`` on ``log x``; ``log_vs_loglog``
    regresses ``log y`` on ``log |log eps|``.
    """

    model: str
    slope: float
    intercept: float
    r_squared: float
    n_points: int
    quantity: str = "n_under"
    eps: float | None = None
    label: str = ""

    def as_dict(self):
        return {
            "label": self.label,
            "model": self.model,
            "quantity": self.quantity,
            "eps": self.eps,
            "slope": self.slope,
            "intercept": self.intercept,
            "r_squared": self.r_squared,
            "n_points": self.n_points,
        }


def row_seed(master_seed, experiment_id, row_index):
    """Deterministic per-row seed from ``(master_seed, experiment_id, row_index)``."""
    ss = np.random.SeedSequence([int(master_seed), zlib.crc32(experiment_id.encode()), int(row_index)])
    return int(ss.generate_state(1, np.uint64)[0])


def _ols(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(intercept), min(1.0, max(0.0, r2))


def fit_scaling(x, y, model="log_log_linear", min_points=4, **meta):
    """Fit ``y`` against ``x`` on log scales; see :class:`FitResult` for the models."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < min_points:
        raise ValueError(f"a scaling fit needs at least {min_points} points, got {x.size}")
    if np.any(y <= 0) or np.any(x <= 0):
        raise ValueError("scaling fits need positive coordinates")
    if model == "log_log_linear":
        tx = np.log(x)
    elif model == "log_vs_loglog":
        tx = np.log(np.abs(np.log(x)))
    else:
        raise ValueError(f"unknown fit model {model!r}")
    slope, intercept, r2 = _ols(tx, np.log(y))
    return FitResult(model, slope, intercept, r2, int(x.size), **meta)


def _map(fn, items, threads):
    items = list(items)
    if threads is None or threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def kernel_spectrum(kernel, domain, sigma, r=None, h=None, n_points=None, max_points=None,
                    want_vectors=False):
    """Discretize ``domain``, assemble the kernel matrix and decompose it.

    Exactly one of ``r`` (points per sigma, ``h = sigma / r``), ``h`` or
    ``n_points`` (sphere only) selects the resolution.
    """
    spec = kernel if isinstance(kernel, kernels.KernelSpec) else kernels.KernelSpec(kernel, sigma)
    given = sum(v is not None for v in (r, h, n_points))
    if given != 1:
        raise ValueError("give exactly one of r, h or n_points")
    if r is not None:
        if r <= 0:
            raise ValueError(f"r must be positive, got {r!r}")
        h = spec.sigma / r
    if domain == "sphere":
        if n_points is None:
            n_points = kernels.sphere_points_for_spacing(h)
        cloud = kernels.build_domain("sphere", n=n_points, max_points=max_points)
    else:
        if n_points is not None:
            raise ValueError("n_points applies to the sphere only")
        cloud = kernels.build_domain(domain, h=h, max_points=max_points)
    m = kernels.assemble_covariance(spec, cloud, max_points=max_points)
    s = spectra.sym_eig(m, want_vectors=want_vectors)
    del m
    return cloud, s


def _kernel_rows(experiment_id, spec, cloud, s, eps_list, r, wall):
    rows = []
    for eps in eps_list:
        rep = spectra.complexity_report(s, eps)
        spectra.check_bounds(rep)
        rows.append(
            SweepRow(
                experiment_id=experiment_id,
                kernel=spec.family,
                domain=cloud.domain_tag,
                sigma=spec.sigma,
                r=r,
                eps=float(eps),
                n=cloud.n,
                n_under=rep.n_under,
                n_over=rep.n_over,
                lower_bound=rep.lower_bound,
                upper_bound=rep.upper_bound_nover,
                h=cloud.h,
                wall_time=wall,
            )
        )
    return rows


def _kernel_task(experiment_id, family, domain, sigma, r, eps_list, max_points):
    spec = kernels.KernelSpec(family, sigma)
    t0 = time.perf_counter()
    cloud, s = kernel_spectrum(spec, domain, sigma, r=r, max_points=max_points)
    wall = time.perf_counter() - t0
    return _kernel_rows(experiment_id, spec, cloud, s, eps_list, r, wall)


def _flatten(groups):
    return [row for group in groups for row in group]


def resolution_sweep(kernel, domain, sigma, r_list, eps_list, threads=1, max_points=None,
                     experiment_id="sweep-res"):
    """Metrics at fixed ``sigma`` for each resolution ``r`` (``h = sigma / r``)."""
    for r in r_list:
        if r < 2:
            raise ValueError(f"resolutions must be at least 2 points per sigma, got {r!r}")
    groups = _map(
        lambda r: _kernel_task(experiment_id, kernel, domain, sigma, r, eps_list, max_points),
        r_list,
        threads,
    )
    return _flatten(groups)


def sigma_sweep(kernel, domain, r, sigma_list, eps_list, threads=1, max_points=None,
                experiment_id="sweep-sigma"):
    """Metrics at fixed resolution for each ``sigma``, plus log-log fits against ``1/sigma``.

    Returns ``(rows, fits)`` with one ``n_under`` and one ``n_over`` fit per
    ``eps`` (fits are skipped when fewer than four positive values exist).
    """
    groups = _map(
        lambda sigma: _kernel_task(experiment_id, kernel, domain, sigma, r, eps_list, max_points),
        sigma_list,
        threads,
    )
    rows = _flatten(groups)
    fits = []
    for eps in eps_list:
        sel = [row for row in rows if row.eps == float(eps)]
        inv_sigma = [1.0 / row.sigma for row in sel]
        for quantity in ("n_under", "n_over"):
            vals = [getattr(row, quantity) for row in sel]
            if len(vals) < 4 or min(vals) <= 0:
                continue
            fits.append(
                fit_scaling(
                    inv_sigma, vals, "log_log_linear", quantity=quantity, eps=float(eps),
                    label=f"{quantity} vs 1/sigma",
                )
            )
    return rows, fits


def eps_sweep(kernel, domain, sigma, r, eps_list, max_points=None, experiment_id="sweep-eps"):
    """Metrics for many tolerances on one discretization.

    The fit regresses ``log n_under`` on ``log |log eps|`` over rows with
    ``eps < 1``; its slope estimates ``q`` in ``n_under ~ |log eps|**q``.
    """
    rows = _kernel_task(experiment_id, kernel, domain, sigma, r, eps_list, max_points)
    sel = [row for row in rows if row.eps < 1.0 and row.n_under > 0]
    fits = []
    if len(sel) >= 4:
        fits.append(
            fit_scaling(
                [row.eps for row in sel], [row.n_under for row in sel], "log_vs_loglog",
                label="n_under vs |log eps|",
            )
        )
    return rows, fits


def _gram_rows(experiment_id, dist, n, d, g, p, eps_list, rank_levels, wall):
    rows = []
    spec_hat = g.to_spectrum()
    for eps in eps_list:
        rep = spectra.complexity_report(spec_hat, eps)
        empirical = rep.n_under
        predicted = n * mplaw.asymptotic_ratio(eps, p)
        lb = spectra.lower_bound(g.trace_hat, g.frobenius_sq_hat, eps) if eps < 1 else 0.0
        if empirical < lb * (1.0 - 1e-9):
            raise spectra.BoundViolation(f"n_under={empirical} < lower bound {lb:.6g}")
        rows.append(
            SweepRow(
                experiment_id=experiment_id, kernel=dist, domain="iid", sigma=None, r=None,
                eps=float(eps), n=n, n_under=empirical, n_over=None, lower_bound=lb,
                wall_time=wall,
                extra={
                    "kind": "n_under",
                    "d": d,
                    "alpha": p.alpha,
                    "predicted": predicted,
                    "abs_gap": abs(empirical - predicted),
                    "rel_gap": abs(empirical - predicted) / max(predicted, 1e-300),
                },
            )
        )
    # eps-rank counts sqrt(lambda) >= eps on the unnormalized Gram d * A_hat
    lam_raw = d * g.eigenvalues_hat
    for level in rank_levels:
        eps = math.sqrt(level * d)
        empirical = int(np.count_nonzero(np.sqrt(lam_raw) >= eps))
        frob_raw = d * d * g.frobenius_sq_hat
        ub = spectra.upper_bound_nover(frob_raw, eps)
        if empirical > ub * (1.0 + 1e-9):
            raise spectra.BoundViolation(f"eps-rank {empirical} > upper bound {ub:.6g}")
        predicted = n * mplaw.asymptotic_eps_rank_ratio(eps, d, p)
        rows.append(
            SweepRow(
                experiment_id=experiment_id, kernel=dist, domain="iid", sigma=None, r=None,
                eps=eps, n=n, n_under=None, n_over=empirical, lower_bound=None, upper_bound=ub,
                wall_time=wall,
                extra={
                    "kind": "eps_rank",
                    "d": d,
                    "alpha": p.alpha,
                    "predicted": predicted,
                    "abs_gap": abs(empirical - predicted),
                    "rel_gap": abs(empirical - predicted) / max(predicted, 1e-300),
                },
            )
        )
    return rows


def mp_comparison(dist, n_list, alpha, eps_list, seed, rank_levels=(0.5, 1.0, 1.5),
                  threads=1, experiment_id="mp"):
    """Single-realization i.i.d. ensembles against the Marcenko-Pastur predictions.

    For each ``n`` the ambient dimension is ``d = round(n / alpha)``. Rows of
    kind ``n_under`` compare with ``n * rho(eps)``; rows of kind ``eps_rank``
    compare the eps-rank at ``eps**2 / d = level`` with the asymptotic
    eps-rank ratio.
    """
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha!r}")

    def task(item):
        idx, n = item
        d = int(round(n / alpha))
        t0 = time.perf_counter()
        spec = ensembles.EnsembleSpec(n, d, dist, seed=row_seed(seed, experiment_id, idx))
        g = ensembles.gram_spectrum(ensembles.sample_iid(spec))
        wall = time.perf_counter() - t0
        return _gram_rows(experiment_id, spec.dist, n, d, g, mplaw.MPParams(1.0, n / d),
                          eps_list, rank_levels, wall)

    return _flatten(_map(task, enumerate(n_list), threads))


def exp_kernel_comparison(n_list, tau_list, eps, d_over_n, seed, dense_max_n=3000,
                          linear_regime_max_tau=0.25, threads=1, experiment_id="exp-kernel"):
    """Exponential covariance ``exp(-tau |i - j|)`` four ways.

    Each row holds the closed-form limit ``t(eps, tau)``, the analytic
    finite-``n`` ratio, the dense-eigensolver ratio (for ``n <= dense_max_n``),
    and the ratio from one correlated ensemble ``V = X L^T`` with
    ``d = d_over_n * n``, next to the i.i.d. Marcenko-Pastur ``rho(eps)`` at
    ``alpha = 1 / d_over_n``. Fits of ``n_under`` against ``tau`` over
    ``tau <= linear_regime_max_tau`` are returned per ``n``.
    """
    p = mplaw.MPParams(1.0, 1.0 / d_over_n)
    rho_iid = mplaw.asymptotic_ratio(eps, p)
    items = [(n, tau) for n in n_list for tau in tau_list]

    def task(item):
        idx, (n, tau) = item
        t0 = time.perf_counter()
        exp_spec = expanalytic.solve_thetas(n, tau)
        analytic = exp_spec.to_spectrum()
        n_analytic = spectra.n_under(analytic, eps)
        rep = spectra.complexity_report(analytic, eps)
        spectra.check_bounds(rep)
        c = kernels.exponential_index_covariance(n, 1.0 / tau)
        dense_ratio = None
        if n <= dense_max_n:
            dense_ratio = spectra.n_under(spectra.sym_eig(c), eps) / n
        d = int(round(d_over_n * n))
        ens = ensembles.EnsembleSpec(n, d, "gaussian", seed=row_seed(seed, experiment_id, idx),
                                     covariance=c)
        g = ensembles.gram_spectrum(ensembles.sample_correlated(ens))
        ens_ratio = ensembles.empirical_embedding_dim(g, eps) / n
        wall = time.perf_counter() - t0
        return SweepRow(
            experiment_id=experiment_id, kernel="exponential", domain="index",
            sigma=1.0 / tau, r=None, eps=float(eps), n=n, n_under=n_analytic,
            n_over=rep.n_over, lower_bound=rep.lower_bound, upper_bound=rep.upper_bound_nover,
            h=1.0, wall_time=wall,
            extra={
                "tau": float(tau),
                "t_asymptotic": expanalytic.asymptotic_t(eps, tau),
                "analytic_ratio": n_analytic / n,
                "dense_ratio": dense_ratio,
                "d": d,
                "ensemble_ratio": ens_ratio,
                "mp_rho": rho_iid,
                "ensemble_gap": abs(ens_ratio - rho_iid),
            },
        )

    rows = _map(task, enumerate(items), threads)
    fits = []
    for n in n_list:
        sel = [row for row in rows if row.n == n and row.extra["tau"] <= linear_regime_max_tau]
        if len(sel) >= 4 and min(row.n_under for row in sel) > 0:
            fits.append(
                fit_scaling(
                    [row.extra["tau"] for row in sel], [row.n_under for row in sel],
                    "log_log_linear", label=f"n_under vs 1/sigma (n={n})", eps=float(eps),
                )
            )
    return rows, fits
