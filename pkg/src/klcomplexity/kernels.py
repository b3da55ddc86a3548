"""Covariance kernels, discretized domains and dense covariance assembly."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import toeplitz
from scipy.spatial import cKDTree
from scipy.spatial.distance import cdist

__all__ = [
    "FAMILIES",
    "DEFAULT_MAX_POINTS",
    "MemoryCapExceeded",
    "KernelSpec",
    "PointCloud",
    "build_domain",
    "fibonacci_sphere",
    "sphere_points_for_spacing",
    "index_cloud",
    "distance",
    "pairwise_distances",
    "assemble_covariance",
    "exponential_index_covariance",
]

DEFAULT_MAX_POINTS = 12000

FAMILIES = ("squared_exponential", "exponential", "squared_exponential_half")

_ALIASES = {
    "sq-exp": "squared_exponential",
    "gaussian": "squared_exponential",
    "exp": "exponential",
    "sq-exp-half": "squared_exponential_half",
}

_GOLDEN_ANGLE = np.pi * (3.0 - np.sqrt(5.0))


class MemoryCapExceeded(RuntimeError):
    """Raised when a dense n x n allocation would exceed the point cap."""


def _check_cap(n, max_points):
    cap = DEFAULT_MAX_POINTS if max_points is None else max_points
    if n > cap:
        raise MemoryCapExceeded(
            f"{n} points exceeds the dense-matrix cap of {cap}; "
            "raise max_points to override"
        )


@dataclass(frozen=True)
class KernelSpec:
    """Stationary isotropic covariance ``f(|x - y| / sigma)``.

    ``squared_exponential`` is ``exp(-r**2 / sigma**2)``, ``exponential`` is
    ``exp(-r / sigma)`` and ``squared_exponential_half`` is the half-width
    convention ``exp(-r**2 / (2 sigma**2))``.
    """

    family: str
    sigma: float

    def __post_init__(self):
        family = _ALIASES.get(self.family, self.family)
        if family not in FAMILIES:
            raise ValueError(f"unknown kernel family {self.family!r}; expected one of {FAMILIES}")
        object.__setattr__(self, "family", family)
        if not (np.isfinite(self.sigma) and self.sigma > 0):
            raise ValueError(f"sigma must be positive, got {self.sigma!r}")
        object.__setattr__(self, "sigma", float(self.sigma))

    def __call__(self, r):
        """Evaluate the kernel at distance(s) ``r``."""
        r = np.asarray(r, dtype=float)
        if self.family == "exponential":
            return np.exp(-r / self.sigma)
        scale = self.sigma**2 if self.family == "squared_exponential" else 2.0 * self.sigma**2
        return np.exp(-(r * r) / scale)

    def _apply_inplace(self, dist):
        # dist is overwritten with kernel values
        if self.family == "exponential":
            dist /= -self.sigma
        else:
            scale = self.sigma**2 if self.family == "squared_exponential" else 2.0 * self.sigma**2
            np.square(dist, out=dist)
            dist /= -scale
        np.exp(dist, out=dist)
        return dist


@dataclass
class PointCloud:
    """A discretized spatial domain.

    Attributes
    ----------
    points : ndarray of shape (n, dim)
        Coordinates. Interval clouds have ``dim == 1``; sphere clouds are unit
        vectors in R^3.
    metric : {"euclidean", "geodesic"}
    h : float
        Grid spacing. For the sphere this is the mean nearest-neighbour
        geodesic spacing.
    d : int
        Intrinsic dimension of the domain.
    domain_tag : {"interval", "square", "sphere", "index"}
    """

    points: np.ndarray
    metric: str
    h: float
    d: int
    domain_tag: str
    meta: dict = field(default_factory=dict)

    @property
    def n(self):
        return self.points.shape[0]

    def __len__(self):
        return self.n


def _grid_cells(h):
    if not (np.isfinite(h) and h > 0):
        raise ValueError(f"grid spacing h must be positive, got {h!r}")
    if h > 0.5:
        raise ValueError(f"grid spacing h must be at most 0.5, got {h!r}")
    return int(round(1.0 / h))


def fibonacci_sphere(n):
    """Fibonacci lattice of ``n`` unit vectors on S^2."""
    i = np.arange(n, dtype=float)
    z = 1.0 - (2.0 * i + 1.0) / n
    rho = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    phi = _GOLDEN_ANGLE * i
    pts = np.column_stack([rho * np.cos(phi), rho * np.sin(phi), z])
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    return pts


def _mean_nn_geodesic(points):
    # chord and geodesic distance are monotonically related, so the chord
    # nearest neighbour is the geodesic one
    tree = cKDTree(points)
    chord, _ = tree.query(points, k=2)
    return float(np.mean(2.0 * np.arcsin(np.clip(chord[:, 1] / 2.0, 0.0, 1.0))))


def build_domain(domain_tag, h=None, n=None, max_points=None):
    """Discretize the unit interval, unit square or unit sphere.

    Interval and square grids are cell centred: ``m = round(1/h)`` cells per
    side with points at ``(k + 1/2) / m``, so the cloud holds ``m**d`` points
    and the stored ``h`` is the realized spacing ``1/m``. The sphere takes a
    point count ``n`` (at least 16) and returns a Fibonacci lattice whose
    ``h`` is the mean nearest-neighbour geodesic spacing.
    """
    if domain_tag in ("interval", "square"):
        if h is None:
            raise ValueError(f"{domain_tag} domain requires a grid spacing h")
        m = _grid_cells(h)
        d = 1 if domain_tag == "interval" else 2
        _check_cap(m**d, max_points)
        centers = (np.arange(m, dtype=float) + 0.5) / m
        if d == 1:
            pts = centers[:, None]
        else:
            gx, gy = np.meshgrid(centers, centers, indexing="ij")
            pts = np.column_stack([gx.ravel(), gy.ravel()])
        return PointCloud(pts, "euclidean", 1.0 / m, d, domain_tag, {"cells_per_side": m})
    if domain_tag == "sphere":
        if n is None:
            raise ValueError("sphere domain requires a point count n")
        n = int(n)
        if n < 16:
            raise ValueError(f"sphere domain needs at least 16 points, got {n}")
        _check_cap(n, max_points)
        pts = fibonacci_sphere(n)
        return PointCloud(pts, "geodesic", _mean_nn_geodesic(pts), 2, "sphere")
    raise ValueError(f"unknown domain {domain_tag!r}; expected interval, square or sphere")


def sphere_points_for_spacing(h):
    """Point count whose Fibonacci lattice has nearest-neighbour spacing near ``h``.

    Uses the hexagonal packing density ``sqrt(3)/2 * h**2`` per point.
    """
    if not (np.isfinite(h) and h > 0):
        raise ValueError(f"spacing must be positive, got {h!r}")
    return max(16, int(round(4.0 * np.pi / (np.sqrt(3.0) / 2.0 * h * h))))


def index_cloud(n):
    """The integer index set ``1..n`` as a one-dimensional cloud with ``h = 1``."""
    pts = np.arange(1, n + 1, dtype=float)[:, None]
    return PointCloud(pts, "euclidean", 1.0, 1, "index")


def distance(x, y, metric="euclidean"):
    """Distance between two points.

    ``geodesic`` expects unit vectors and returns ``arccos(clamp(x.y, -1, 1))``.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if metric == "euclidean":
        return float(np.linalg.norm(x - y))
    if metric == "geodesic":
        return float(np.arccos(np.clip(np.dot(x, y), -1.0, 1.0)))
    raise ValueError(f"unknown metric {metric!r}")


def pairwise_distances(a, b=None, metric="euclidean"):
    a = np.asarray(a, dtype=float)
    b = a if b is None else np.asarray(b, dtype=float)
    if a.ndim == 1:
        a = a[:, None]
    if b.ndim == 1:
        b = b[:, None]
    dist = cdist(a, b)
    if metric == "euclidean":
        return dist
    if metric == "geodesic":
        # 2 asin(chord/2) keeps full relative accuracy at small angles
        dist /= 2.0
        np.clip(dist, 0.0, 1.0, out=dist)
        np.arcsin(dist, out=dist)
        dist *= 2.0
        return dist
    raise ValueError(f"unknown metric {metric!r}")


def assemble_covariance(kernel, cloud, max_points=None):
    """Dense kernel matrix ``M[i, j] = kernel(dist(p_i, p_j))``.

    No quadrature weights are applied. The result is exactly symmetric with a
    unit diagonal.
    """
    n = cloud.n
    if n == 0:
        raise ValueError("point cloud is empty")
    _check_cap(n, max_points)
    # cdist evaluates (i, j) and (j, i) with identical operations, and every
    # later step is elementwise, so symmetry is exact without mirroring
    m = kernel._apply_inplace(pairwise_distances(cloud.points, metric=cloud.metric))
    np.fill_diagonal(m, 1.0)
    return m


def exponential_index_covariance(n, sigma):
    """``C[i, j] = exp(-|i - j| / sigma)`` on the index set ``1..n``."""
    return toeplitz(np.exp(-np.arange(n, dtype=float) / sigma))
