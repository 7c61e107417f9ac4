"""Dense linear-algebra primitives: centering, singular value shrinkage and
truncation, the optimal hard threshold for Gaussian noise, and coherence."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ORTHO_TOL = 1e-8


def as_matrix(Z, name: str = "Z") -> np.ndarray:
    """Return `Z` as a 2-D float array, rejecting empty or non-finite input."""
    Z = np.asarray(Z, dtype=float)
    if Z.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {Z.shape}")
    if Z.shape[0] < 1 or Z.shape[1] < 1:
        raise ValueError(f"{name} must have positive dimensions, got {Z.shape}")
    if not np.all(np.isfinite(Z)):
        raise ValueError(f"{name} contains NaN or Inf")
    return Z


@dataclass(frozen=True)
class SvdFactors:
    U: np.ndarray
    sigma: np.ndarray
    V: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.U * self.sigma) @ self.V.T


def svd(Z) -> SvdFactors:
    """Thin SVD with a deterministic sign convention.

    Each left singular vector is flipped so that its largest-magnitude entry
    is nonnegative; the matching right vector is flipped with it.
    """
    Z = as_matrix(Z)
    U, s, Vt = np.linalg.svd(Z, full_matrices=False)
    idx = np.argmax(np.abs(U), axis=0)
    signs = np.sign(U[idx, np.arange(U.shape[1])])
    signs[signs == 0] = 1.0
    return SvdFactors(U * signs, s, Vt.T * signs)


def center(Z) -> np.ndarray:
    """Subtract the column mean from every column, ``Z (I - 11^T / m)``."""
    Z = as_matrix(Z)
    return Z - Z.mean(axis=1, keepdims=True)


def _check_level(value: float, name: str) -> float:
    value = float(value)
    if not np.isfinite(value) or value < 0:
        raise ValueError(f"{name} must be a finite nonnegative number, got {value}")
    return value


def soft_threshold_svd(Z, mu: float) -> np.ndarray:
    """Shrink every singular value of `Z` by `mu`, clipping at zero.

    This is the proximal map of ``mu * ||.||_*``; when all singular values are
    at most `mu` the result is the zero matrix.
    """
    mu = _check_level(mu, "mu")
    Z = as_matrix(Z)
    if mu == 0:
        return Z.copy()
    U, s, Vt = np.linalg.svd(Z, full_matrices=False)
    return (U * np.maximum(s - mu, 0.0)) @ Vt


def hard_threshold_svd(Z, tau: float) -> np.ndarray:
    """Zero every singular value strictly below `tau`, keep the rest exactly."""
    tau = _check_level(tau, "tau")
    Z = as_matrix(Z)
    if tau == 0:
        return Z.copy()
    U, s, Vt = np.linalg.svd(Z, full_matrices=False)
    return (U * np.where(s >= tau, s, 0.0)) @ Vt


def optimal_hard_threshold_coef(beta: float) -> float:
    """Known-noise optimal hard-threshold coefficient for aspect ratio ``beta <= 1``.

    Gavish & Donoho (2014): ``sqrt(2(b+1) + 8b / ((b+1) + sqrt(b^2 + 14b + 1)))``.
    """
    if not 0 < beta <= 1:
        raise ValueError(f"aspect ratio must lie in (0, 1], got {beta}")
    return float(np.sqrt(2 * (beta + 1) + 8 * beta / ((beta + 1) + np.sqrt(beta**2 + 14 * beta + 1))))


def svht_threshold(rows: int, cols: int, sigma: float) -> float:
    """Optimal singular value hard threshold for a `rows` x `cols` matrix whose
    entries carry i.i.d. Gaussian noise of known standard deviation `sigma`."""
    if rows < 1 or cols < 1:
        raise ValueError(f"dimensions must be positive, got {rows} x {cols}")
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    big, small = max(rows, cols), min(rows, cols)
    return optimal_hard_threshold_coef(small / big) * np.sqrt(big) * float(sigma)


def coherence(U) -> float:
    """Coherence ``(m/r) max_k ||U^T e_k||^2`` of an orthonormal basis `U` (m x r)."""
    U = as_matrix(U, "U")
    m, r = U.shape
    if r > m:
        raise ValueError(f"U must be tall, got {U.shape}")
    if np.max(np.abs(U.T @ U - np.eye(r))) > ORTHO_TOL:
        raise ValueError("U must have orthonormal columns")
    return float(m / r * np.max(np.sum(U**2, axis=1)))


def numerical_rank(Z, rtol: float = 1e-8) -> int:
    s = np.linalg.svd(as_matrix(Z), compute_uv=False)
    if s[0] == 0:
        return 0
    return int(np.sum(s > rtol * s[0]))


# Batched variants for stacks of equally-shaped blocks, shape (b, rows, cols).
# These skip validation; callers own the data.


def center_batch(Z: np.ndarray) -> np.ndarray:
    return Z - Z.mean(axis=2, keepdims=True)


def shrink_batch(Z: np.ndarray, mu) -> tuple[np.ndarray, np.ndarray]:
    """Singular value soft thresholding of each block at its own level.

    Returns the shrunk blocks and, per block, the singular values of the
    input so callers can evaluate spectral functions without another SVD.
    """
    U, s, Vt = np.linalg.svd(Z, full_matrices=False)
    mu = np.broadcast_to(np.asarray(mu, dtype=float), (Z.shape[0],))
    shrunk = np.maximum(s - mu[:, None], 0.0)
    return np.matmul(U * shrunk[:, None, :], Vt), s


def hard_threshold_batch(Z: np.ndarray, tau) -> np.ndarray:
    U, s, Vt = np.linalg.svd(Z, full_matrices=False)
    tau = np.broadcast_to(np.asarray(tau, dtype=float), (Z.shape[0],))
    kept = np.where(s >= tau[:, None], s, 0.0)
    return np.matmul(U * kept[:, None, :], Vt)
