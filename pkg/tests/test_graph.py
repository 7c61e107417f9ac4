import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nrpca import datagen
from nrpca.graph import (
    Patch,
    build_patches,
    coverage,
    geodesic_distances,
    global_patch,
    knn_adjacency,
    knn_indices,
    pairwise_distances,
    patch_matrix,
    restrict,
    scatter_add,
)


def test_patch_layout():
    p = Patch(4, (2, 7, 1))
    assert list(p.columns) == [2, 7, 1, 4]
    assert p.size == 4
    with pytest.raises(ValueError):
        Patch(1, (1, 2))
    with pytest.raises(ValueError):
        Patch(0, (2, 2))


def test_pairwise_distances_examples():
    assert pairwise_distances([[0.0, 3.0], [0.0, 4.0]])[0, 1] == pytest.approx(5.0)
    assert np.allclose(pairwise_distances(np.ones((3, 4))), 0)
    X = np.random.default_rng(0).standard_normal((3, 5))
    brute = np.array([[np.sqrt(np.sum((X[:, i] - X[:, j]) ** 2)) for j in range(5)] for i in range(5)])
    D = pairwise_distances(X)
    assert np.allclose(D, brute, atol=1e-12)
    assert np.allclose(D, D.T) and np.all(np.diag(D) == 0)
    with pytest.raises(ValueError):
        pairwise_distances(np.ones((3, 1)))


def test_knn_adjacency_collinear():
    D = pairwise_distances([[0.0, 1.0, 10.0]])
    A = knn_adjacency(D, 1).toarray()
    expected = np.array([[0, 1, 0], [1, 0, 9], [0, 9, 0]], dtype=float)
    assert np.array_equal(A, expected)


def test_knn_adjacency_complete_and_range():
    D = pairwise_distances(np.random.default_rng(1).standard_normal((2, 6)))
    A = knn_adjacency(D, 5).toarray()
    assert np.count_nonzero(A) == 30
    for k in (0, 6):
        with pytest.raises(ValueError):
            knn_adjacency(D, k)


def test_knn_matches_brute_force():
    X = np.random.default_rng(2).standard_normal((3, 20))
    D = pairwise_distances(X)
    nbrs = knn_indices(D, 4)
    for i in range(20):
        order = sorted((j for j in range(20) if j != i), key=lambda j: (D[i, j], j))
        assert list(nbrs[i]) == order[:4]
    A = knn_adjacency(D, 4)
    assert np.all(np.asarray((A > 0).sum(axis=1)).ravel() >= 4)
    assert (A != A.T).nnz == 0


def test_knn_ties_prefer_smaller_index():
    D = pairwise_distances([[0.0, -1.0, 1.0, 2.0]])
    assert list(knn_indices(D, 2)[0]) == [1, 2]


def test_build_patches_examples():
    pts = build_patches(np.random.default_rng(3).standard_normal((2, 3)), 2)
    assert all(sorted(p.columns) == [0, 1, 2] for p in pts)
    line = build_patches([[0.0, 1.0, 2.0, 3.0]], 1)
    assert list(line[0].columns) == [1, 0]
    X = datagen.swiss_roll_3d(500, 0)
    patches = build_patches(X, 15)
    assert len(patches) == 500
    assert all(p.size == 16 and p.columns[-1] == p.center == i for i, p in enumerate(patches))
    assert patch_matrix(patches).shape == (500, 16)


def test_build_patches_permutation_invariant():
    X = np.random.default_rng(4).standard_normal((3, 40))
    perm = np.random.default_rng(5).permutation(40)
    inv = np.argsort(perm)
    a = patch_matrix(build_patches(X, 5))
    b = patch_matrix(build_patches(X[:, perm], 5))
    assert np.array_equal(perm[b][inv], a)


def test_restrict_scatter_examples():
    p = Patch(2, (0, 4))
    target = np.zeros((2, 5))
    scatter_add(restrict(np.ones((2, 5)), p), p, target)
    assert np.array_equal(target, [[1, 0, 1, 0, 1]] * 2)
    M = np.arange(12.0).reshape(2, 6)
    g = global_patch(6)[0]
    assert np.array_equal(np.sort(restrict(M, g), axis=1), M)
    with pytest.raises(ValueError):
        scatter_add(np.ones((2, 2)), p, target)
    with pytest.raises(ValueError):
        restrict(M, Patch(9, (0,)))


@given(st.integers(0, 2**32 - 1), st.integers(1, 6))
@settings(max_examples=50)
def test_adjoint_identity(seed, k):
    rng = np.random.default_rng(seed)
    n, p = 12, 3
    cols = rng.choice(n, size=k + 1, replace=False)
    patch = Patch(int(cols[-1]), tuple(int(c) for c in cols[:-1]))
    M = rng.standard_normal((p, n))
    Y = rng.standard_normal((p, k + 1))
    lhs = np.sum(restrict(M, patch) * Y)
    rhs = np.sum(M * scatter_add(Y, patch, np.zeros((p, n))))
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs))


def test_every_column_covered():
    X = datagen.swiss_roll_3d(300, 1)
    patches = build_patches(X, 10)
    cov = coverage(patches, 300)
    assert np.all(cov >= 1)
    lam = np.random.default_rng(0).uniform(0.5, 2, 300)
    assert np.all(coverage(patches, 300, lam) > 0)
    assert cov.sum() == 300 * 11


def test_geodesic_examples():
    from scipy import sparse

    path = sparse.csr_matrix(np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=float))
    assert geodesic_distances(path, 0)[2] == 2
    edge = sparse.csr_matrix(np.array([[0, 2.5], [2.5, 0]]))
    assert geodesic_distances(edge, 0)[1] == 2.5
    split = sparse.csr_matrix(np.array([[0, 1, 0], [1, 0, 0], [0, 0, 0]], dtype=float))
    assert np.isinf(geodesic_distances(split, 0)[2])


def test_geodesic_dominates_euclidean_and_triangle():
    X = datagen.swiss_roll_3d(400, 2)
    D = pairwise_distances(X)
    G = knn_adjacency(D, 10)
    dg = geodesic_distances(G, np.arange(400))
    finite = np.isfinite(dg)
    assert np.all(dg[finite] >= D[finite] - 1e-9)
    rng = np.random.default_rng(0)
    for i, j, m in rng.integers(0, 400, (200, 3)):
        if np.isfinite(dg[i, m]) and np.isfinite(dg[m, j]):
            assert dg[i, j] <= dg[i, m] + dg[m, j] + 1e-9
