"""Mean-curvature estimation from chord and graph-geodesic lengths, and the
per-patch noise level and weights derived from it.

A geodesic between two points is approximated by a circular arc: the chord
length ``d_E`` and the arc length ``d_g`` fix the radius R and the subtended
angle theta through ``2 R sin(theta / 2) = d_E`` and ``R theta = d_g``. The
mean curvature at a point (or over a region) is the root mean square of
``1 / R`` over randomly sampled pairs.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field

import numpy as np

from .graph import Patch, geodesic_distances, knn_adjacency, knn_indices, pairwise_distances

log = logging.getLogger(__name__)

TWO_PI = 2 * np.pi


@dataclass(frozen=True)
class ArcSolution:
    radius: float
    theta: float

    @property
    def curvature(self) -> float:
        return 0.0 if np.isinf(self.radius) else 1.0 / self.radius


@dataclass
class CurvatureEstimate:
    gamma_bar: float
    samples: np.ndarray
    radii: np.ndarray
    pairs: np.ndarray = field(default_factory=lambda: np.empty((0, 2), dtype=int))
    shortfall: int = 0

    @property
    def m(self) -> int:
        return int(self.samples.size)


@dataclass(frozen=True)
class WeightEstimate:
    epsilon_hat: float
    lambda_hat: float
    beta: float


def _sinc_half(theta):
    # sin(theta/2) / (theta/2)
    return np.sinc(theta / TWO_PI)


def arc_angles(ratio) -> np.ndarray:
    """Solve ``sin(t/2)/(t/2) = ratio`` for t in (0, 2 pi), vectorized.

    Ratios >= 1 map to t = 0 (a straight chord). The left side is strictly
    decreasing on the bracket so bisection converges to the unique root.
    """
    ratio = np.asarray(ratio, dtype=float)
    lo = np.zeros_like(ratio)
    hi = np.full_like(ratio, TWO_PI)
    flat = ratio >= 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        above = _sinc_half(mid) > ratio
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
        if np.all((hi - lo) <= 4 * np.finfo(float).eps * np.maximum(hi, 1e-300)):
            break
    theta = 0.5 * (lo + hi)
    return np.where(flat, 0.0, theta)


def arc_solve(d_E: float, d_g: float) -> ArcSolution:
    """Fit a circular arc with chord `d_E` and arc length `d_g`."""
    if not (d_E > 0 and d_g > 0):
        raise ValueError(f"distances must be positive, got d_E={d_E}, d_g={d_g}")
    if d_E >= d_g:
        return ArcSolution(np.inf, 0.0)
    theta = float(arc_angles(d_E / d_g))
    return ArcSolution(d_g / theta, theta)


def inverse_square_radii(d_E, d_g) -> np.ndarray:
    """``R^-2`` for each (chord, arc) pair; zero where the chord is not shorter."""
    d_E = np.asarray(d_E, dtype=float)
    d_g = np.asarray(d_g, dtype=float)
    theta = arc_angles(d_E / d_g)
    return (theta / d_g) ** 2


def default_radii(D: np.ndarray, graph_k: int, inner: float = 4.0, outer: float = 2.0) -> tuple[float, float]:
    """Annulus for sampling pairs, scaled to the graph's typical edge length.

    ``r1 = inner * median distance to the graph_k-th neighbor`` and
    ``r2 = outer * r1``. Keeping r1 several hops out stops pairs from being
    joined by a single graph edge, where chord and path coincide.
    """
    kth = np.take_along_axis(D, knn_indices(D, graph_k)[:, -1:], axis=1).ravel()
    r1 = inner * float(np.median(kth))
    return r1, outer * r1


def _finish(inv_r2: np.ndarray, dE: np.ndarray, dg: np.ndarray, pairs, shortfall) -> CurvatureEstimate:
    with np.errstate(divide="ignore"):
        radii = np.where(inv_r2 > 0, 1.0 / np.sqrt(inv_r2), np.inf)
    return CurvatureEstimate(float(np.sqrt(np.mean(inv_r2))), inv_r2, radii, np.asarray(pairs), shortfall)


def mean_curvature_at(p: int, D: np.ndarray, G, r1: float, r2: float, m: int, rng) -> CurvatureEstimate:
    """Mean curvature at sample `p` from `m` partners in the annulus [r1, r2]."""
    if not 0 < r1 < r2:
        raise ValueError(f"need 0 < r1 < r2, got r1={r1}, r2={r2}")
    dg = geodesic_distances(G, p)
    cand = np.flatnonzero((D[p] >= r1) & (D[p] <= r2) & np.isfinite(dg))
    cand = cand[cand != p]
    if cand.size == 0:
        raise ValueError(f"no reachable points at distance [{r1:g}, {r2:g}] from sample {p}")
    shortfall = max(0, m - cand.size)
    q = rng.choice(cand, size=min(m, cand.size), replace=False)
    inv_r2 = inverse_square_radii(D[p, q], dg[q])
    pairs = np.column_stack([np.full(q.size, p), q])
    return _finish(inv_r2, D[p, q], dg[q], pairs, shortfall)


def overall_curvature(region, D: np.ndarray, G, r1: float, r2: float, m: int, rng) -> CurvatureEstimate:
    """Mean curvature over a region from `m` random pairs with chord in [r1, r2]."""
    if not 0 < r1 < r2:
        raise ValueError(f"need 0 < r1 < r2, got r1={r1}, r2={r2}")
    region = np.unique(np.asarray(region, dtype=np.intp))
    if region.size < 2:
        raise ValueError("region must contain at least two points")
    sub = D[np.ix_(region, region)]
    a, b = np.nonzero(np.triu((sub >= r1) & (sub <= r2), k=1))
    if a.size == 0:
        raise ValueError(f"no pairs at distance [{r1:g}, {r2:g}] inside the region")
    pick = rng.choice(a.size, size=min(m, a.size), replace=False)
    pi, qi = region[a[pick]], region[b[pick]]
    sources, inv = np.unique(pi, return_inverse=True)
    dg = np.atleast_2d(geodesic_distances(G, sources))[inv, qi]
    keep = np.isfinite(dg)
    if not keep.any():
        raise ValueError("no sampled pair is connected in the graph")
    shortfall = max(0, m - int(keep.sum()))
    if shortfall:
        warnings.warn(f"only {int(keep.sum())} admissible pairs out of the requested {m}", stacklevel=2)
    dE = D[pi, qi][keep]
    return _finish(inverse_square_radii(dE, dg[keep]), dE, dg[keep], np.column_stack([pi, qi])[keep], shortfall)


@dataclass
class CurvatureConfig:
    mode: str = "region"  # "region" (one shared value) or "point"
    r1: float | None = None
    r2: float | None = None
    m: int = 50
    graph_k: int = 30

    def __post_init__(self):
        if self.mode not in ("region", "point"):
            raise ValueError(f"mode must be 'region' or 'point', got {self.mode!r}")
        if self.m < 1 or self.graph_k < 1:
            raise ValueError("m and graph_k must be positive")


def estimate_curvature(X, config: CurvatureConfig, seed: int = 0):
    """Curvature of the manifold sampled by the columns of `X`.

    Returns an array of per-sample Gamma-bar values (all equal in region
    mode) together with the region estimate. In point mode, samples with no
    partner in the annulus fall back to the region value.
    """
    D = pairwise_distances(X)
    n = D.shape[0]
    G = knn_adjacency(D, min(config.graph_k, n - 1))
    r1, r2 = config.r1, config.r2
    if r1 is None or r2 is None:
        d1, d2 = default_radii(D, min(config.graph_k, n - 1))
        r1 = d1 if r1 is None else r1
        r2 = d2 if r2 is None else r2
    region = overall_curvature(np.arange(n), D, G, r1, r2, config.m, np.random.default_rng([seed, n]))
    if config.mode == "region":
        return np.full(n, region.gamma_bar), region
    gammas = np.empty(n)
    for i in range(n):
        try:
            est = mean_curvature_at(i, D, G, r1, r2, config.m, np.random.default_rng([seed, i]))
            gammas[i] = est.gamma_bar
        except ValueError:
            gammas[i] = region.gamma_bar
    return gammas, region


def estimate_epsilon(patch: Patch, X_ref, gamma_bar: float, sigma: float, floor: float = 0.0) -> float:
    """Noise level on one patch: Gaussian energy plus second-order residual.

    ``sqrt((k+1) p sigma^2 + sum_j ||x_i - x_ij||^4 / 4 * gamma_bar^2)``.
    """
    if sigma < 0 or gamma_bar < 0:
        raise ValueError("sigma and gamma_bar must be nonnegative")
    X_ref = np.asarray(X_ref, dtype=float)
    p = X_ref.shape[0]
    diff = X_ref[:, list(patch.neighbors)] - X_ref[:, [patch.center]]
    d2 = np.sum(diff**2, axis=0)
    eps = float(np.sqrt(patch.size * p * sigma**2 + np.sum(d2**2) / 4 * gamma_bar**2))
    if eps <= 0:
        if floor > 0:
            return floor
        raise ValueError("estimated noise level is zero; supply a positive floor")
    return max(eps, floor)


def estimate_weights(epsilon_hat: float, k_i: int, p: int) -> WeightEstimate:
    """Patch weights ``lambda = min(k+1, p)^(1/2) / eps`` and ``beta = max(k+1, p)^(-1/2)``."""
    if not epsilon_hat > 0:
        raise ValueError(f"epsilon_hat must be positive, got {epsilon_hat}")
    m = k_i + 1
    return WeightEstimate(float(epsilon_hat), float(np.sqrt(min(m, p)) / epsilon_hat), float(max(m, p) ** -0.5))
