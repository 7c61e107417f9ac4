"""Neighborhood structure: distances, kNN graphs, patches and graph geodesics.

Data matrices hold one sample per column (p x n).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph
from scipy.spatial.distance import pdist, squareform

from .linalg import as_matrix


@dataclass(frozen=True)
class Patch:
    """A sample and its k nearest neighbors, nearest first.

    ``columns`` lists the global column indices in local order, with the
    center last.
    """

    center: int
    neighbors: tuple[int, ...]

    def __post_init__(self):
        if self.center in self.neighbors:
            raise ValueError("patch center must not be among its neighbors")
        if len(set(self.neighbors)) != len(self.neighbors):
            raise ValueError("patch neighbors must be distinct")

    @property
    def columns(self) -> np.ndarray:
        return np.array(self.neighbors + (self.center,), dtype=np.intp)

    @property
    def size(self) -> int:
        return len(self.neighbors) + 1


def pairwise_distances(X) -> np.ndarray:
    """Euclidean distances between the columns of `X` (n x n)."""
    X = as_matrix(X, "X")
    if X.shape[1] < 2:
        raise ValueError("need at least two samples")
    return squareform(pdist(X.T))


def knn_indices(D: np.ndarray, k: int) -> np.ndarray:
    """Row i lists the k nearest neighbors of i, nearest first.

    Distance ties are broken by the smaller index; a point is never its own
    neighbor even when duplicated.
    """
    n = D.shape[0]
    if not 1 <= k <= n - 1:
        raise ValueError(f"k must lie in [1, {n - 1}], got {k}")
    D = np.array(D, dtype=float)
    np.fill_diagonal(D, np.inf)
    order = np.argsort(D, axis=1, kind="stable")
    return order[:, :k]


def knn_adjacency(D: np.ndarray, k: int) -> sparse.csr_matrix:
    """Undirected kNN graph weighted by Euclidean distance.

    An edge i-j exists when either endpoint is among the other's k nearest
    neighbors. Zero-length edges between duplicate points get the smallest
    positive weight so they are not dropped by the sparse format.
    """
    D = np.asarray(D, dtype=float)
    n = D.shape[0]
    nbrs = knn_indices(D, k)
    rows = np.repeat(np.arange(n), k)
    cols = nbrs.ravel()
    w = np.maximum(D[rows, cols], np.finfo(float).tiny)
    A = sparse.csr_matrix((w, (rows, cols)), shape=(n, n))
    return A.maximum(A.T).tocsr()


def build_patches(X_current, k: int) -> list[Patch]:
    """One patch per column of `X_current`: the column plus its k nearest
    neighbors under Euclidean distance."""
    D = pairwise_distances(X_current)
    nbrs = knn_indices(D, k)
    return [Patch(i, tuple(int(j) for j in row)) for i, row in enumerate(nbrs)]


def global_patch(n: int) -> list[Patch]:
    """A single patch holding every column in natural order."""
    return [Patch(n - 1, tuple(range(n - 1)))]


def patch_matrix(patches: list[Patch]) -> np.ndarray:
    """Stack equally-sized patches into an index array, one row per patch."""
    sizes = {p.size for p in patches}
    if len(sizes) != 1:
        raise ValueError(f"patches have differing sizes {sorted(sizes)}")
    return np.stack([p.columns for p in patches])


def restrict(M, patch: Patch) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    cols = patch.columns
    if cols.max() >= M.shape[1]:
        raise ValueError("patch index out of range")
    return M[:, cols]


def scatter_add(M_local, patch: Patch, target: np.ndarray) -> np.ndarray:
    """Add the local columns back into `target` at their global indices, in place.

    This is the adjoint of :func:`restrict`.
    """
    M_local = np.asarray(M_local, dtype=float)
    cols = patch.columns
    if M_local.shape != (target.shape[0], cols.size):
        raise ValueError(
            f"local block has shape {M_local.shape}, expected {(target.shape[0], cols.size)}"
        )
    target[:, cols] += M_local
    return target


def coverage(patches: list[Patch], n: int, weights=None) -> np.ndarray:
    """Per-column sum of patch weights over the patches containing that column."""
    w = np.ones(len(patches)) if weights is None else np.asarray(weights, dtype=float)
    out = np.zeros(n)
    for p, wi in zip(patches, w):
        out[p.columns] += wi
    return out


def geodesic_distances(G: sparse.spmatrix, source) -> np.ndarray:
    """Shortest-path distances from `source` (an index or list of indices).

    Unreachable nodes are reported as ``inf``.
    """
    return csgraph.dijkstra(G, directed=False, indices=source)
