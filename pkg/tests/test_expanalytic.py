import time

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from klcomplexity import expanalytic, kernels, spectra
from klcomplexity.spectra import ConvergenceError


def dense_eigs(n, tau):
    return np.linalg.eigvalsh(kernels.exponential_index_covariance(n, 1.0 / tau))[::-1]


def test_one_by_one():
    s = expanalytic.solve_thetas(1, 2.0)
    assert s.lambdas[0] == pytest.approx(1.0, rel=1e-14)
    assert expanalytic.empirical_ratio(1, 2.0, 1.0) == 0.0


@pytest.mark.parametrize("n,tau", [(200, 0.5), (50, 0.1), (200, 5.0), (2, 0.3), (3, 1.0)])
def test_matches_dense(n, tau):
    s = expanalytic.solve_thetas(n, tau)
    dense = dense_eigs(n, tau)
    assert np.max(np.abs(s.lambdas - dense) / dense) <= 1e-8


def test_brackets_residual_and_ordering():
    n, tau = 500, 1.0
    s = expanalytic.solve_thetas(n, tau)
    k = np.arange(1, n + 1)
    assert np.all(s.thetas > (k - 1) * np.pi / n)
    assert np.all(s.thetas < k * np.pi / (n + 1))
    assert np.all(np.diff(s.thetas) > 0)
    assert np.all(np.diff(s.lambdas) < 0)
    assert np.max(np.abs(expanalytic.theta_residual(s.thetas, k, n, tau))) <= 1e-11
    assert s.fallback_count == 0


@given(st.integers(1, 400), st.floats(0.01, 20.0))
def test_invariants_property(n, tau):
    s = expanalytic.solve_thetas(n, tau)
    k = np.arange(1, n + 1)
    assert np.max(np.abs(expanalytic.theta_residual(s.thetas, k, n, tau))) <= 1e-11
    assert abs(s.lambdas.sum() - n) <= 1e-8 * n
    assert np.all(s.lambdas > 0)


def test_frobenius_identity():
    n, tau = 300, 0.7
    s = expanalytic.solve_thetas(n, tau)
    # sum_ij exp(-2 tau |i-j|) = n + 2 sum_k (n - k) exp(-2 tau k)
    k = np.arange(1, n)
    frob = n + 2.0 * np.sum((n - k) * np.exp(-2 * tau * k))
    assert np.sum(s.lambdas**2) == pytest.approx(frob, rel=1e-7)


def test_forced_fallback(monkeypatch):
    monkeypatch.setattr(expanalytic, "FIXED_POINT_MAX_ITER", 1)
    n, tau = 300, 0.05
    s = expanalytic.solve_thetas(n, tau)
    assert s.fallback_count > 0
    np.testing.assert_allclose(s.lambdas, dense_eigs(n, tau), rtol=1e-8)


def test_fallback_failure_raises(monkeypatch):
    monkeypatch.setattr(expanalytic, "FIXED_POINT_MAX_ITER", 0)
    monkeypatch.setattr(expanalytic, "_bisect", lambda k, n, tau, lo, hi: 0.5 * (lo + hi))
    with pytest.raises(ConvergenceError):
        expanalytic.solve_thetas(50, 1.0)


@pytest.mark.parametrize("n,tau", [(0, 1.0), (5, 0.0), (5, -1.0), (5, float("nan"))])
def test_rejects_bad_input(n, tau):
    with pytest.raises(ValueError):
        expanalytic.solve_thetas(n, tau)


def test_eigenvectors_and_norm():
    n, tau = 60, 0.4
    s = expanalytic.solve_thetas(n, tau, with_psis=True)
    assert np.all((s.psis > -np.pi / 2) & (s.psis < 0))
    raw = expanalytic.eigenvectors(s)
    np.testing.assert_allclose(np.sum(raw**2, axis=0), expanalytic.eigenvector_norm_sq(s), rtol=1e-10)
    v = expanalytic.eigenvectors(s, normalize=True)
    c = kernels.exponential_index_covariance(n, 1.0 / tau)
    assert np.abs(c @ v - v * s.lambdas).max() < 1e-10
    assert np.abs(v.T @ v - np.eye(n)).max() < 1e-12


def test_asymptotic_t_limits():
    assert expanalytic.asymptotic_t(1.0, 0.7) == 0.0
    for eps in (0.05, 0.3, 0.8):
        assert expanalytic.asymptotic_t(eps, 60.0) == pytest.approx(1 - eps**2, abs=1e-12)
    with pytest.raises(ValueError):
        expanalytic.asymptotic_t(0.0, 1.0)
    with pytest.raises(ValueError):
        expanalytic.asymptotic_t(0.5, 0.0)


@given(st.floats(0.01, 0.99), st.floats(0.01, 10.0), st.floats(0.01, 10.0))
def test_asymptotic_t_monotone(eps, t1, t2):
    lo, hi = sorted((t1, t2))
    if hi - lo > 1e-6:
        assert expanalytic.asymptotic_t(eps, lo) < expanalytic.asymptotic_t(eps, hi)
    assert expanalytic.asymptotic_t(eps, lo) > expanalytic.asymptotic_t(min(1.0, eps + 0.005), lo)
    assert 0.0 <= expanalytic.asymptotic_t(eps, lo) < 1.0


def test_ratio_converges_in_n():
    t = expanalytic.asymptotic_t(0.1, 1.0)
    sizes = (100, 400, 1600)
    gaps = [abs(expanalytic.empirical_ratio(n, 1.0, 0.1) - t) for n in sizes]
    # n_under is an integer, so the gap moves in 1/n steps and can stall
    assert gaps[0] >= gaps[1] >= gaps[2]
    assert gaps[2] < gaps[0]
    assert all(g * n <= 1.0 for g, n in zip(gaps, sizes))


def test_ratio_equals_dense_integer():
    n, tau, eps = 1000, 0.2, 0.05
    analytic = spectra.n_under(expanalytic.solve_thetas(n, tau).to_spectrum(), eps)
    dense = spectra.n_under(spectra.sym_eig(kernels.exponential_index_covariance(n, 1 / tau)), eps)
    assert analytic == dense
    assert expanalytic.empirical_ratio(n, tau, eps) == dense / n


def test_faster_than_dense():
    n, tau = 5000, 0.5
    t0 = time.perf_counter()
    expanalytic.solve_thetas(n, tau)
    t_analytic = time.perf_counter() - t0
    c = kernels.exponential_index_covariance(n, 1 / tau)
    t0 = time.perf_counter()
    spectra.sym_eig(c)
    t_dense = time.perf_counter() - t0
    assert t_dense >= 10 * t_analytic
