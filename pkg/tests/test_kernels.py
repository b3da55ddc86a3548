import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from klcomplexity import kernels
from klcomplexity.kernels import KernelSpec, MemoryCapExceeded


def test_kernel_families_and_aliases():
    assert KernelSpec("sq-exp", 1.0).family == "squared_exponential"
    assert KernelSpec("gaussian", 1.0).family == "squared_exponential"
    assert KernelSpec("exp", 1.0).family == "exponential"
    assert KernelSpec("sq-exp-half", 1.0).family == "squared_exponential_half"
    r = np.array([0.0, 0.5, 2.0])
    np.testing.assert_allclose(KernelSpec("squared_exponential", 0.5)(r), np.exp(-(r / 0.5) ** 2))
    np.testing.assert_allclose(KernelSpec("exponential", 0.5)(r), np.exp(-r / 0.5))
    np.testing.assert_allclose(
        KernelSpec("squared_exponential_half", 0.5)(r), np.exp(-(r**2) / (2 * 0.25))
    )


@pytest.mark.parametrize("sigma", [0.0, -1.0, float("nan"), float("inf")])
def test_kernel_rejects_bad_sigma(sigma):
    with pytest.raises(ValueError):
        KernelSpec("exponential", sigma)


def test_kernel_rejects_unknown_family():
    with pytest.raises(ValueError, match="unknown kernel family"):
        KernelSpec("matern", 1.0)


def test_interval_h_half_is_two_cell_centres():
    c = kernels.build_domain("interval", h=0.5)
    np.testing.assert_array_equal(c.points[:, 0], [0.25, 0.75])
    assert c.d == 1 and c.n == 2 and c.metric == "euclidean"


def test_square_h_half_is_four_points():
    c = kernels.build_domain("square", h=0.5)
    assert c.n == 4 and c.d == 2
    assert {tuple(p) for p in c.points} == {(0.25, 0.25), (0.25, 0.75), (0.75, 0.25), (0.75, 0.75)}


@pytest.mark.parametrize("h", [0.0, -0.1, 0.6])
def test_grid_rejects_bad_spacing(h):
    with pytest.raises(ValueError):
        kernels.build_domain("interval", h=h)


def test_sphere_lattice_spacing_matches_brute_force():
    c = kernels.build_domain("sphere", n=1000)
    assert c.n == 1000 and c.metric == "geodesic" and c.d == 2
    np.testing.assert_allclose(np.linalg.norm(c.points, axis=1), 1.0, atol=1e-12)
    # oracle: all-pairs arccos geodesics, no tree and no chord conversion
    g = np.arccos(np.clip(c.points @ c.points.T, -1.0, 1.0))
    np.fill_diagonal(g, np.inf)
    assert c.h == pytest.approx(g.min(axis=1).mean(), rel=1e-6)


def test_sphere_needs_sixteen_points():
    with pytest.raises(ValueError):
        kernels.build_domain("sphere", n=15)


def test_memory_cap():
    with pytest.raises(MemoryCapExceeded):
        kernels.build_domain("square", h=0.005)  # 40000 points
    c = kernels.build_domain("interval", h=0.01)
    with pytest.raises(MemoryCapExceeded):
        kernels.assemble_covariance(KernelSpec("exp", 1.0), c, max_points=50)
    with pytest.raises(MemoryCapExceeded):
        kernels.build_domain("interval", h=0.01, max_points=99)


@given(st.integers(min_value=2, max_value=60), st.sampled_from(["interval", "square"]))
def test_grid_size_is_exact_power(m, tag):
    c = kernels.build_domain(tag, h=1.0 / m, max_points=10**6)
    d = 1 if tag == "interval" else 2
    assert c.n == m**d
    assert np.all((c.points > 0) & (c.points < 1))
    assert c.h == pytest.approx(1.0 / m)


def test_distance_examples():
    assert kernels.distance((0, 0), (3, 4)) == 5.0
    assert kernels.distance((1, 0, 0), (-1, 0, 0), "geodesic") == pytest.approx(math.pi)
    assert kernels.distance((0, 0, 1), (0, 0, 1), "geodesic") == 0.0
    # clamping absorbs a dot product a hair above 1
    x = np.array([1.0, 1e-9, 0.0])
    x /= np.linalg.norm(x)
    assert kernels.distance(x, x * (1 + 1e-16), "geodesic") >= 0.0


def test_pairwise_geodesic_agrees_with_arccos():
    pts = kernels.fibonacci_sphere(50)
    fast = kernels.pairwise_distances(pts, metric="geodesic")
    slow = np.array([[kernels.distance(a, b, "geodesic") for b in pts] for a in pts])
    np.testing.assert_allclose(fast, slow, atol=1e-7)


def test_two_point_exponential_matrix():
    cloud = kernels.PointCloud(np.array([[0.0], [1.0]]), "euclidean", 1.0, 1, "interval")
    m = kernels.assemble_covariance(KernelSpec("exponential", 1.0), cloud)
    np.testing.assert_allclose(m, [[1, math.exp(-1)], [math.exp(-1), 1]], rtol=1e-15)


def test_single_point_matrix():
    cloud = kernels.PointCloud(np.array([[0.3, 0.2]]), "euclidean", 1.0, 2, "square")
    np.testing.assert_array_equal(
        kernels.assemble_covariance(KernelSpec("sq-exp", 0.1), cloud), [[1.0]]
    )


def test_gaussian_spot_check():
    c = kernels.build_domain("interval", h=0.005)
    m = kernels.assemble_covariance(KernelSpec("squared_exponential", 0.02), c)
    assert m[0, 4] == pytest.approx(math.exp(-1), rel=1e-12)


@pytest.mark.parametrize("family", kernels.FAMILIES)
@pytest.mark.parametrize("tag", ["interval", "square", "sphere"])
def test_assembled_matrix_invariants(family, tag):
    c = kernels.build_domain(tag, n=200) if tag == "sphere" else kernels.build_domain(tag, h=0.05)
    m = kernels.assemble_covariance(KernelSpec(family, 0.3), c)
    assert np.array_equal(m, m.T)
    assert np.all(np.diag(m) == 1.0)
    assert np.all((m > 0) & (m <= 1))


def test_index_set_bridge():
    n, sigma = 40, 3.5
    m = kernels.assemble_covariance(KernelSpec("exponential", sigma), kernels.index_cloud(n))
    i = np.arange(n)
    np.testing.assert_allclose(m, np.exp(-np.abs(i[:, None] - i[None, :]) / sigma), rtol=1e-14)
    np.testing.assert_allclose(kernels.exponential_index_covariance(n, sigma), m, rtol=1e-14)


def test_sphere_points_for_spacing_roughly_inverts():
    n = kernels.sphere_points_for_spacing(0.1)
    c = kernels.build_domain("sphere", n=n)
    assert c.h == pytest.approx(0.1, rel=0.1)
