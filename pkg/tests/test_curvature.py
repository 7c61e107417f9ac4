import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nrpca import datagen
from nrpca.curvature import (
    CurvatureConfig,
    arc_angles,
    arc_solve,
    default_radii,
    estimate_curvature,
    estimate_epsilon,
    estimate_weights,
    inverse_square_radii,
    mean_curvature_at,
    overall_curvature,
)
from nrpca.graph import Patch, knn_adjacency, pairwise_distances


def _graph(X, k):
    D = pairwise_distances(X)
    return D, knn_adjacency(D, k)


def test_arc_examples():
    a = arc_solve(2 * np.sin(0.5), 1.0)
    assert a.theta == pytest.approx(1.0, abs=1e-12)
    assert a.radius == pytest.approx(1.0, abs=1e-12)
    q = arc_solve(np.sqrt(2), np.pi / 2)
    assert q.theta == pytest.approx(np.pi / 2, abs=1e-12)
    assert q.radius == pytest.approx(1.0, abs=1e-12)
    flat = arc_solve(3.0, 3.0)
    assert np.isinf(flat.radius) and flat.curvature == 0.0
    assert arc_solve(3.1, 3.0).curvature == 0.0


@pytest.mark.parametrize("bad", [(0.0, 1.0), (1.0, 0.0), (-1.0, 2.0)])
def test_arc_rejects_nonpositive(bad):
    with pytest.raises(ValueError):
        arc_solve(*bad)


@given(st.floats(0.01, 6.2), st.floats(0.01, 100))
def test_arc_relations_hold(theta, radius):
    d_g = radius * theta
    d_E = 2 * radius * np.sin(theta / 2)
    a = arc_solve(d_E, d_g)
    assert 2 * a.radius * np.sin(a.theta / 2) == pytest.approx(d_E, rel=1e-10, abs=1e-12)
    assert a.radius * a.theta == pytest.approx(d_g, rel=1e-10)
    assert 0 < a.theta < 2 * np.pi


@given(st.floats(1e-3, 1 - 1e-9))
def test_arc_angle_residual(ratio):
    t = float(arc_angles(ratio))
    assert abs(np.sin(t / 2) / (t / 2) - ratio) < 1e-12


def test_inverse_square_radii_vectorized():
    dE = np.array([2 * np.sin(0.5), 1.0, np.sqrt(2)])
    dg = np.array([1.0, 1.0, np.pi / 2])
    assert np.allclose(inverse_square_radii(dE, dg), [1.0, 0.0, 1.0])


def test_grid_is_flat_pointwise():
    u, v = np.meshgrid(np.arange(25.0), np.arange(20.0))
    X = np.vstack([u.ravel(), v.ravel(), np.zeros(500)])
    D, G = _graph(X, 50)
    for p in (0, 262, 499):
        assert mean_curvature_at(p, D, G, 5.0, 15.0, 50, np.random.default_rng(p)).gamma_bar < 0.05


def test_circle_pointwise():
    X = datagen.circle(2000, 5.0, 0)
    D, G = _graph(X, 30)
    r1, r2 = default_radii(D, 30)
    for p in (0, 700, 1999):
        est = mean_curvature_at(p, D, G, r1, r2, 50, np.random.default_rng(p))
        assert 0.18 <= est.gamma_bar <= 0.22
        assert est.m == 50 and est.shortfall == 0


def test_collinear_points_have_zero_curvature():
    X = np.vstack([np.linspace(0, 10, 200), np.zeros(200)])
    D, G = _graph(X, 5)
    est = mean_curvature_at(0, D, G, 2.0, 5.0, 20, np.random.default_rng(0))
    assert np.all(est.samples == 0) and est.gamma_bar == 0


def test_mean_curvature_errors():
    X = datagen.circle(100, 5.0, 0)
    D, G = _graph(X, 5)
    with pytest.raises(ValueError, match="100"):
        mean_curvature_at(0, D, G, 100.0, 200.0, 10, np.random.default_rng(0))
    with pytest.raises(ValueError):
        mean_curvature_at(0, D, G, 2.0, 1.0, 10, np.random.default_rng(0))


def test_mean_curvature_shortfall_recorded():
    X = datagen.circle(100, 5.0, 0)
    D, G = _graph(X, 5)
    est = mean_curvature_at(0, D, G, 2.0, 3.0, 500, np.random.default_rng(0))
    assert est.shortfall == 500 - est.m > 0


def test_sphere_region():
    X = datagen.sphere(3000, 2.0, 0)
    D, G = _graph(X, 30)
    r1, r2 = default_radii(D, 30)
    est = overall_curvature(np.arange(3000), D, G, r1, r2, 50, np.random.default_rng(0))
    assert est.gamma_bar == pytest.approx(0.5, rel=0.15)


def test_region_errors_and_warnings():
    X = datagen.circle(60, 5.0, 0)
    D, G = _graph(X, 5)
    with pytest.raises(ValueError):
        overall_curvature([3], D, G, 1.0, 2.0, 10, np.random.default_rng(0))
    with pytest.raises(ValueError):
        overall_curvature(np.arange(60), D, G, 50.0, 60.0, 10, np.random.default_rng(0))
    with pytest.warns(UserWarning):
        est = overall_curvature(np.arange(10), D, G, 0.1, 20.0, 1000, np.random.default_rng(0))
    assert est.shortfall > 0


def test_region_skips_unreachable_pairs():
    a = datagen.circle(200, 5.0, 0)
    b = datagen.circle(200, 5.0, 1) + np.array([[30.0], [0.0], [0.0]])
    D, G = _graph(np.hstack([a, b]), 10)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        est = overall_curvature(np.arange(400), D, G, 1.0, 40.0, 300, np.random.default_rng(0))
    assert np.all(np.isfinite(est.samples))
    assert est.shortfall > 0


def test_estimates_are_seed_deterministic():
    X = datagen.sphere(800, 2.0, 3)
    g1, r1 = estimate_curvature(X, CurvatureConfig(), seed=5)
    g2, r2 = estimate_curvature(X, CurvatureConfig(), seed=5)
    assert r1.gamma_bar == r2.gamma_bar
    assert np.array_equal(r1.pairs, r2.pairs)
    assert np.all(g1 == r1.gamma_bar)


def test_point_mode_streams_are_per_point():
    X = datagen.circle(400, 5.0, 0)
    cfg = CurvatureConfig(mode="point", graph_k=10)
    g, _ = estimate_curvature(X, cfg, seed=2)
    D, G = _graph(X, 10)
    r1, r2 = default_radii(D, 10)
    for i in (0, 17, 399):
        assert g[i] == mean_curvature_at(i, D, G, r1, r2, 50, np.random.default_rng([2, i])).gamma_bar


@given(st.floats(0.1, 10))
@settings(max_examples=10, deadline=None)
def test_scaling_covariance(c):
    X = datagen.sphere(400, 2.0, 0)
    _, base = estimate_curvature(X, CurvatureConfig(graph_k=15), seed=0)
    _, scaled = estimate_curvature(c * X, CurvatureConfig(graph_k=15), seed=0)
    assert scaled.gamma_bar == pytest.approx(base.gamma_bar / c, rel=1e-8)
    finite = np.isfinite(base.radii)
    assert np.allclose(scaled.radii[finite], c * base.radii[finite], rtol=1e-8)


def test_curvature_config_validation():
    with pytest.raises(ValueError):
        CurvatureConfig(mode="global")
    with pytest.raises(ValueError):
        CurvatureConfig(m=0)


def test_epsilon_examples():
    X = np.zeros((20, 16))
    X[:, :15] = np.random.default_rng(0).standard_normal((20, 15))
    patch = Patch(15, tuple(range(15)))
    assert estimate_epsilon(patch, X, 0.0, 1.0) == pytest.approx(np.sqrt(320))
    Y = np.array([[0.0, 2.0]])
    one = Patch(0, (1,))
    assert estimate_epsilon(one, Y, 0.5, 0.0) == pytest.approx(1.0)
    assert estimate_epsilon(one, Y, 1.0, 0.0) == pytest.approx(2.0)


def test_epsilon_zero_needs_floor():
    Y = np.array([[0.0, 2.0]])
    with pytest.raises(ValueError, match="floor"):
        estimate_epsilon(Patch(0, (1,)), Y, 0.0, 0.0)
    assert estimate_epsilon(Patch(0, (1,)), Y, 0.0, 0.0, floor=1e-3) == 1e-3
    with pytest.raises(ValueError):
        estimate_epsilon(Patch(0, (1,)), Y, -1.0, 0.0)


@given(st.floats(0.01, 10), st.floats(0.01, 10))
def test_epsilon_homogeneous_in_curvature(g, c):
    Y = np.array([[0.0, 1.0, 2.5], [0.0, 1.0, -1.0]])
    patch = Patch(0, (1, 2))
    assert estimate_epsilon(patch, Y, c * g, 0.0) == pytest.approx(c * estimate_epsilon(patch, Y, g, 0.0))


def test_weights_examples():
    w = estimate_weights(2.0, 15, 20)
    assert w.lambda_hat == pytest.approx(2.0)
    assert w.beta == pytest.approx(20**-0.5)
    eq = estimate_weights(3.0, 19, 20)
    assert eq.lambda_hat * eq.beta == pytest.approx(1 / 3.0)
    assert estimate_weights(1.0, 10, 784).beta == pytest.approx(1 / 28)
    for bad in (0.0, -1.0):
        with pytest.raises(ValueError):
            estimate_weights(bad, 10, 5)
