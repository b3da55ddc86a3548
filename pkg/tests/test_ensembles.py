import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from klcomplexity import ensembles, kernels, mplaw, spectra
from klcomplexity.ensembles import EnsembleSpec


def test_rademacher_values_and_bernoulli_alias():
    spec = EnsembleSpec(3, 2, "bernoulli", seed=5)
    assert spec.dist == "rademacher"
    v = ensembles.sample_iid(spec)
    assert v.shape == (2, 3)
    assert set(np.unique(v)) <= {-1.0, 1.0}


def test_rademacher_balance():
    v = ensembles.sample_iid(EnsembleSpec(500, 2000, "rademacher", seed=1))
    assert abs(v.mean()) < 0.01


@pytest.mark.parametrize("dist", ["gaussian", "rademacher"])
def test_determinism_and_streams(dist):
    a = ensembles.sample_iid(EnsembleSpec(20, 30, dist, seed=9))
    b = ensembles.sample_iid(EnsembleSpec(20, 30, dist, seed=9))
    assert a.tobytes() == b.tobytes()
    c = ensembles.sample_iid(EnsembleSpec(20, 30, dist, seed=9, stream=1))
    d = ensembles.sample_iid(EnsembleSpec(20, 30, dist, seed=10))
    assert not np.array_equal(a, c) and not np.array_equal(a, d)


def test_gaussian_moments():
    v = ensembles.sample_iid(EnsembleSpec(500, 2000, seed=20240601))
    assert abs(v.mean()) <= 0.01
    assert 0.97 <= v.var() <= 1.03
    # tails are populated, so the uniforms really are open-interval and full precision
    assert np.isfinite(v).all() and np.abs(v).max() > 4


def test_rejects_bad_specs():
    with pytest.raises(ValueError):
        EnsembleSpec(0, 3)
    with pytest.raises(ValueError):
        EnsembleSpec(3, 3, "cauchy")
    with pytest.raises(ValueError):
        EnsembleSpec(3, 3, covariance=np.eye(2))
    with pytest.raises(ValueError):
        ensembles.sample_iid(EnsembleSpec(2, 2, covariance=np.eye(2)))
    with pytest.raises(ValueError):
        ensembles.sample_correlated(EnsembleSpec(2, 2))
    with pytest.raises(ValueError):
        ensembles.bit_generator(-1)


def test_entry_cap():
    with pytest.raises(MemoryError):
        ensembles.sample_iid(EnsembleSpec(100, 100), max_entries=9999)


def test_identity_covariance_matches_iid():
    a = ensembles.sample_iid(EnsembleSpec(10, 40, seed=3))
    b = ensembles.sample_correlated(EnsembleSpec(10, 40, seed=3, covariance=np.eye(10)))
    np.testing.assert_array_equal(a, b)


def test_scalar_covariance_scales_variance():
    v = ensembles.sample_correlated(EnsembleSpec(1, 20000, seed=4, covariance=np.array([[4.0]])))
    assert v.var() == pytest.approx(4.0, rel=0.05)


def test_correlated_gram_concentrates():
    n, d = 200, 800
    c = kernels.exponential_index_covariance(n, 10.0)
    v = ensembles.sample_correlated(EnsembleSpec(n, d, seed=11, covariance=c))
    emp = v.T @ v / d
    assert np.all(np.abs(np.diag(emp) - np.diag(c)) <= 5 * np.sqrt(2.0 / d))


def test_cholesky_jitter():
    # rank-deficient PSD matrix: plain Cholesky fails, jitter rescues it
    x = np.linspace(0, 1, 30)
    c = np.exp(-((x[:, None] - x[None, :]) ** 2) / 0.5**2)
    with pytest.raises(np.linalg.LinAlgError):
        np.linalg.cholesky(c)
    l = ensembles.cholesky_factor(c)
    assert np.abs(l @ l.T - c).max() < 1e-9
    with pytest.raises(np.linalg.LinAlgError):
        ensembles.cholesky_factor(np.array([[1.0, 2.0], [2.0, 1.0]]))


def test_gram_orthogonal_columns():
    d = 8
    v = np.sqrt(d) * np.eye(d)[:, :5]
    g = ensembles.gram_spectrum(v)
    np.testing.assert_allclose(g.eigenvalues_hat, np.ones(5), rtol=1e-14)
    assert g.trace_hat == pytest.approx(5.0)


def test_gram_single_column():
    v = np.arange(1.0, 7.0)[:, None]
    g = ensembles.gram_spectrum(v)
    assert g.eigenvalues_hat[0] == pytest.approx(np.sum(v**2) / 6)
    assert g.n == 1 and g.d == 6


def test_gram_trace_and_edge():
    v = ensembles.sample_iid(EnsembleSpec(500, 2000, seed=20240601))
    g = ensembles.gram_spectrum(v)
    assert g.trace_hat == pytest.approx(np.sum(v**2) / 2000, rel=1e-12)
    assert np.all(g.eigenvalues_hat >= 0)
    edge = mplaw.MPParams(1.0, 0.25).lambda_plus
    assert 0.9 * edge <= g.eigenvalues_hat[0] <= 1.15 * edge
    assert ensembles.empirical_embedding_dim(g, 0.1) == pytest.approx(
        500 * mplaw.asymptotic_ratio(0.1, mplaw.MPParams(1.0, 0.25)), rel=0.02
    )


def test_identity_gram_embedding_dims():
    g = ensembles.GramResult(np.ones(100), 100.0, 100.0, 100, 100)
    assert ensembles.empirical_embedding_dim(g, 1.0) == 0
    assert ensembles.empirical_embedding_dim(g, 0.1) == 99


@given(st.integers(1, 30), st.integers(1, 30), st.integers(0, 2**32), st.floats(0.05, 0.99),
       st.floats(1e-3, 1e3))
def test_bound_and_scale_invariance(n, d, seed, eps, c):
    v = ensembles.sample_iid(EnsembleSpec(n, d, seed=seed))
    g = ensembles.gram_spectrum(v)
    dim = ensembles.empirical_embedding_dim(g, eps)
    assert dim >= spectra.lower_bound(g.trace_hat, g.frobenius_sq_hat, eps) * (1 - 1e-9)
    assert ensembles.empirical_embedding_dim(ensembles.gram_spectrum(c * v), eps) == dim


def test_kl_field_zero_terms():
    lam = np.array([2.0, 1.0])
    f = ensembles.sample_kl_field(lam, np.eye(2), 0, 5)
    assert f.shape == (5, 2) and not f.any()
    with pytest.raises(ValueError):
        ensembles.sample_kl_field(lam, np.eye(2), 3, 5)


def test_kl_field_covariance_converges():
    cloud = kernels.build_domain("interval", h=1 / 50)
    m = kernels.assemble_covariance(kernels.KernelSpec("sq-exp", 0.2), cloud)
    s = spectra.sym_eig(m, want_vectors=True)
    f = ensembles.sample_kl_field(s.eigenvalues, s.vectors, 50, 2000, seed=8)
    emp = f.T @ f / 2000
    assert np.abs(emp - m).max() <= 0.15


def test_kl_field_single_term_variance():
    cloud = kernels.build_domain("interval", h=1 / 40)
    m = kernels.assemble_covariance(kernels.KernelSpec("exp", 0.3), cloud)
    s = spectra.sym_eig(m, want_vectors=True)
    f = ensembles.sample_kl_field(s.eigenvalues, s.vectors, 1, 20000, seed=2)
    target = s.eigenvalues[0] * s.vectors[:, 0] ** 2
    np.testing.assert_allclose(f.var(axis=0), target, rtol=0.05)


def test_kl_field_deterministic():
    lam = np.array([3.0, 1.0, 0.5])
    vecs = np.linalg.qr(np.arange(9.0).reshape(3, 3) + np.eye(3))[0]
    a = ensembles.sample_kl_field(lam, vecs, 2, 4, seed=1)
    b = ensembles.sample_kl_field(lam, vecs, 2, 4, seed=1)
    assert a.tobytes() == b.tobytes()
