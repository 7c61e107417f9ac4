"""Synthetic manifolds and the sparse-plus-Gaussian corruption model.

Every generator returns a p x n matrix with one sample per column and is a
pure function of its seed.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np


@dataclass(frozen=True)
class NoiseSpec:
    """Mixed corruption: i.i.d. Gaussian entries plus a few large spikes.

    Normal parameters are (mean, variance) pairs, so ``gaussian_var=0.25``
    means a standard deviation of 0.5.
    """

    gaussian_var: float = 0.25
    sparse_count: int = 100
    sparse_mean: float = 5.0
    sparse_var: float = 0.09
    sign_flip: bool = True

    def __post_init__(self):
        if self.gaussian_var < 0 or self.sparse_var < 0:
            raise ValueError("variances must be nonnegative")
        if self.sparse_count < 0:
            raise ValueError("sparse_count must be nonnegative")

    @property
    def sigma(self) -> float:
        return float(np.sqrt(self.gaussian_var))

    def as_dict(self) -> dict:
        return asdict(self)


ROLL_3D_NOISE = NoiseSpec(0.25, 100, 5.0, 0.09, True)
ROLL_20D_NOISE = NoiseSpec(0.25, 600, 5.0, 0.09, False)
NO_NOISE = NoiseSpec(0.0, 0, 0.0, 0.0, False)


@dataclass
class GroundTruth:
    X: np.ndarray
    S: np.ndarray
    E: np.ndarray
    support: np.ndarray  # sorted flat (row-major) indices of the nonzeros of S

    @property
    def X_tilde(self) -> np.ndarray:
        return self.X + self.S + self.E

    def support_mask(self) -> np.ndarray:
        mask = np.zeros(self.S.size, dtype=bool)
        mask[self.support] = True
        return mask.reshape(self.S.shape)


def _roll_parameter(n: int, rng, random_t: bool) -> np.ndarray:
    if random_t:
        return np.sort(rng.uniform(0, 4 * np.pi, n))
    return np.linspace(0, 4 * np.pi, n)


def swiss_roll_3d(n: int = 2000, seed: int = 0, random_t: bool = False) -> np.ndarray:
    """``((t+1) cos t, (t+1) sin t, h)`` with t on a grid over [0, 4 pi]
    (or uniform when `random_t`) and h uniform on [0, 8 pi]."""
    if n < 10:
        raise ValueError("n must be at least 10")
    rng = np.random.default_rng(seed)
    t = _roll_parameter(n, rng, random_t)
    h = rng.uniform(0, 8 * np.pi, n)
    return np.vstack([(t + 1) * np.cos(t), (t + 1) * np.sin(t), h])


def swiss_roll_frequencies(p: int = 20) -> np.ndarray:
    """Frequencies ``k / (p + 1)`` of the sinusoid dimensions k = 4..p."""
    return np.arange(4, p + 1) / (p + 1)


def swiss_roll_20d(n: int = 2000, seed: int = 0, random_t: bool = False) -> np.ndarray:
    """The 3-D roll followed by 17 sinusoids ``t sin(f_k t)``, k = 4..20."""
    X3 = swiss_roll_3d(n, seed, random_t)
    t = np.hypot(X3[0], X3[1]) - 1
    extra = t[None, :] * np.sin(swiss_roll_frequencies(20)[:, None] * t[None, :])
    return np.vstack([X3, extra])


def circle(n: int = 2000, radius: float = 5.0, seed: int = 0, ambient: int = 3) -> np.ndarray:
    rng = np.random.default_rng(seed)
    a = rng.uniform(0, 2 * np.pi, n)
    X = np.zeros((ambient, n))
    X[0], X[1] = radius * np.cos(a), radius * np.sin(a)
    return X


def sphere(n: int = 3000, radius: float = 2.0, seed: int = 0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    v = rng.standard_normal((3, n))
    return radius * v / np.linalg.norm(v, axis=0)


def cylinder(n: int = 3000, radius: float = 1.0, height: float = 10.0, seed: int = 0):
    """Uniform samples on a cylinder about the z axis; also returns the angles."""
    rng = np.random.default_rng(seed)
    a = rng.uniform(0, 2 * np.pi, n)
    z = rng.uniform(0, height, n)
    return np.vstack([radius * np.cos(a), radius * np.sin(a), z]), a


def flat_grid(side: int = 23, spacing: float = 1.0, ambient: int = 3) -> np.ndarray:
    """A ``side x side`` square lattice in the first two coordinates."""
    u, v = np.meshgrid(np.arange(side) * spacing, np.arange(side) * spacing)
    X = np.zeros((ambient, side * side))
    X[0], X[1] = u.ravel(), v.ravel()
    return X


def flat_strip(n: int = 2000, length: float = 20.0, width: float = 5.0, ambient: int = 10, seed: int = 0) -> np.ndarray:
    """Uniform samples on a rectangle embedded in a random 2-D subspace."""
    rng = np.random.default_rng(seed)
    coords = np.vstack([rng.uniform(0, length, n), rng.uniform(0, width, n)])
    basis, _ = np.linalg.qr(rng.standard_normal((ambient, 2)))
    return basis @ coords


def planted_plane(p: int = 20, n: int = 300, side: float = 10.0, seed: int = 0) -> np.ndarray:
    """Uniform samples on a ``side x side`` square in a random 2-D subspace of R^p."""
    return flat_strip(n, side, side, p, seed)


def add_mixed_noise(X, spec: NoiseSpec, seed: int = 0) -> tuple[np.ndarray, GroundTruth]:
    """Corrupt `X` with Gaussian entries and `sparse_count` spikes.

    Spike locations are drawn uniformly without replacement over all p*n
    entries; each spike is ``(-1)^y z`` with ``z ~ N(mean, var)`` and
    ``y ~ Bernoulli(1/2)`` when `sign_flip`, else just ``z``.
    """
    X = np.asarray(X, dtype=float)
    if spec.sparse_count > X.size:
        raise ValueError(f"sparse_count {spec.sparse_count} exceeds the {X.size} entries")
    rng = np.random.default_rng(seed)
    E = rng.normal(0.0, np.sqrt(spec.gaussian_var), X.shape) if spec.gaussian_var > 0 else np.zeros_like(X)
    support = np.sort(rng.choice(X.size, size=spec.sparse_count, replace=False))
    values = rng.normal(spec.sparse_mean, np.sqrt(spec.sparse_var), spec.sparse_count)
    if spec.sign_flip:
        values *= np.where(rng.random(spec.sparse_count) < 0.5, -1.0, 1.0)
    S = np.zeros_like(X)
    S.flat[support] = values
    truth = GroundTruth(X.copy(), S, E, support)
    return X + S + E, truth
