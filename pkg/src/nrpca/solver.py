"""Coupled patch-wise low-rank plus sparse decomposition.

For a sparse estimate S every patch i sees ``Y_i = X_tilde[:, patch_i] - S[:, patch_i]``
and the patch objective is

    lambda_i ||Y_i - L_i||_F^2 + ||C(L_i)||_* + beta_i ||S[:, patch_i]||_1

with C the column-centering map. Minimizing over L_i has a closed form
(nuclear-norm shrinkage of C(Y_i) plus the untouched column mean), which
leaves a problem in S alone: a smooth term plus a weighted l1 norm, solved
with FISTA.

Gradient of the smooth term. With ``mu_i = 1 / (2 lambda_i)`` and ``Z = C(Y)``,
``min_A lambda ||A - Z||^2 + ||A||_*`` is a Moreau envelope of the nuclear
norm, whose gradient in Z is ``2 lambda (Z - T_mu(Z))``. The mean block
``(I - C)(Y)`` is fit exactly and contributes nothing. C is a self-adjoint
projection and ``Z - T_mu(Z)`` already has zero column mean, so the gradient
in Y is the same expression; the chain rule through ``Y_i = X_i - P_i(S)``
then gives ``-sum_i 2 lambda_i P_i^*(C(Y_i) - T_mu(C(Y_i)))``. Each envelope
gradient is ``2 lambda_i``-Lipschitz and ``sum_i lambda_i P_i P_i^T`` is
diagonal, so ``2 max_l sum_{i ni l} lambda_i`` bounds the Lipschitz constant.
"""

from __future__ import annotations

import copy
import logging
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .curvature import CurvatureConfig, estimate_curvature, estimate_epsilon, estimate_weights
from .graph import Patch, build_patches, coverage, global_patch

log = logging.getLogger(__name__)


class DivergenceError(RuntimeError):
    pass


@dataclass
class FistaConfig:
    max_iters: int = 500
    rel_tol: float = 1e-6
    backtrack: float = 0.5
    restart: bool = True
    # Solve a sequence of problems with lambda capped at geometrically growing
    # levels, warm starting each from the last. Only engages when some lambda
    # exceeds the first cap, e.g. in the noiseless flat regime.
    continuation: bool = True
    continuation_factor: float = 10.0
    continuation_tol: float = 1e-4
    step_init: float = 0.1  # first step is 1 / (step_init * Lipschitz bound)
    expand: float = 1.1

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be positive")
        if not 0 < self.backtrack < 1:
            raise ValueError("backtrack factor must lie in (0, 1)")
        if self.rel_tol < 0:
            raise ValueError("rel_tol must be nonnegative")
        if self.continuation_factor <= 1:
            raise ValueError("continuation_factor must exceed 1")
        if self.step_init <= 0 or self.expand < 1:
            raise ValueError("step_init must be positive and expand at least 1")


@dataclass
class SolverConfig:
    k: int = 15
    T: int = 2
    sigma: float = 0.0
    lambdas: object = None  # None (estimate), a scalar, or one value per patch
    betas: object = None  # None (max(k+1, p)^-1/2 per patch), a scalar, or per patch
    fista: FistaConfig = field(default_factory=FistaConfig)
    curvature: CurvatureConfig = field(default_factory=CurvatureConfig)
    patch_mode: str = "knn"  # "knn" or "global" (one patch holding every sample)
    reestimate_curvature: bool = False
    gamma_bar: float | None = None  # known curvature; skips estimation
    reestimate_weights: bool = False  # recompute lambda_i from X_tilde - S_hat every round
    # Smallest shrinkage level 1/(2 lambda_i), as a fraction of the median
    # spectral norm of the centered patches; keeps lambda finite when the
    # estimated noise level is (near) zero.
    mu_floor: float = 0.02
    seed: int = 0

    def __post_init__(self):
        if self.k < 1 or self.T < 1:
            raise ValueError("k and T must be at least 1")
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")
        if self.mu_floor <= 0:
            raise ValueError("mu_floor must be positive")
        if self.patch_mode not in ("knn", "global"):
            raise ValueError(f"patch_mode must be 'knn' or 'global', got {self.patch_mode!r}")
        for name in ("lambdas", "betas"):
            value = getattr(self, name)
            if value is not None and np.any(np.asarray(value, dtype=float) <= 0):
                raise ValueError(f"{name} must be positive")


@dataclass
class SolveResult:
    S_hat: np.ndarray
    X_hat: np.ndarray
    L_hat_per_patch: list
    objective_trace: list  # one list of objective values per outer round
    patches_per_round: list  # one (n_patches, k+1) index array per round, center last
    lambdas: np.ndarray
    betas: np.ndarray
    gamma_bar: np.ndarray
    converged: list
    iterations: list
    S_hat_per_round: list = field(default_factory=list)

    @property
    def X_minus_S(self) -> np.ndarray:
        return self._X_tilde - self.S_hat

    _X_tilde: np.ndarray = field(default=None, repr=False)


# ---------------------------------------------------------------------------
# Closed-form pieces


def closed_form_L(Y, lambda_i: float) -> np.ndarray:
    """Minimizer of ``lambda ||Y - L||_F^2 + ||C(L)||_*`` over L."""
    if not lambda_i > 0:
        raise ValueError("lambda_i must be positive")
    Y = linalg.as_matrix(Y, "Y")
    Z = linalg.center(Y)
    return linalg.soft_threshold_svd(Z, 1.0 / (2.0 * lambda_i)) + (Y - Z)


def denoise_patch_svht(Y, sigma: float) -> np.ndarray:
    """Hard-threshold the centered block at the optimal level for noise `sigma`,
    then restore the column mean."""
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    Y = linalg.as_matrix(Y, "Y")
    if sigma == 0:
        return Y.copy()
    Z = linalg.center(Y)
    tau = linalg.svht_threshold(*Z.shape, sigma)
    return linalg.hard_threshold_svd(Z, tau) + (Y - Z)


def fuse(L_list, lambdas, patches: list[Patch], n: int) -> np.ndarray:
    """Weighted least-squares reconciliation of overlapping patch estimates.

    Column j of the result is the lambda-weighted mean of every patch copy of
    sample j.
    """
    lambdas = np.broadcast_to(np.asarray(lambdas, dtype=float), (len(patches),))
    den = coverage(patches, n, lambdas)
    if np.any(den <= 0):
        raise ValueError(f"columns {np.flatnonzero(den <= 0)[:10].tolist()} are not covered by any patch")
    p = np.asarray(L_list[0]).shape[0]
    num = np.zeros((p, n))
    for L, lam, patch in zip(L_list, lambdas, patches):
        num[:, patch.columns] += lam * np.asarray(L)
    return num / den


# ---------------------------------------------------------------------------
# Smooth + l1 problems for FISTA


class _Groups:
    """Patches bucketed by size so each bucket is one batched SVD."""

    def __init__(self, patches: list[Patch], p: int, n: int):
        self.p, self.n = p, n
        by_size: dict[int, list[int]] = {}
        for i, patch in enumerate(patches):
            by_size.setdefault(patch.size, []).append(i)
        self.members = [np.array(ids) for ids in by_size.values()]
        self.idx = [np.stack([patches[i].columns for i in ids]) for ids in self.members]
        self.flat = [(np.arange(p)[:, None, None] * n + idx[None]).ravel() for idx in self.idx]

    def gather(self, M: np.ndarray) -> list[np.ndarray]:
        return [M[:, idx].transpose(1, 0, 2) for idx in self.idx]

    def scatter(self, blocks: list[np.ndarray]) -> np.ndarray:
        out = np.zeros(self.p * self.n)
        for flat, B in zip(self.flat, blocks):
            out += np.bincount(flat, weights=B.transpose(1, 0, 2).ravel(), minlength=self.p * self.n)
        return out.reshape(self.p, self.n)


def _gram(Z: np.ndarray):
    """Eigen-decomposition of the Gram matrix on the smaller side of each block.

    Returns eigenvalues, eigenvectors and whether the Gram was ``Z Z^T``.
    Cheaper than a batched SVD for the small blocks used here.
    """
    left = Z.shape[1] <= Z.shape[2]
    G = Z @ Z.transpose(0, 2, 1) if left else Z.transpose(0, 2, 1) @ Z
    return G, left


def _envelope_value(s2, lam, mu) -> float:
    s = np.sqrt(np.maximum(s2, 0.0))
    low = np.minimum(s, mu[:, None])
    return float(np.sum(lam * np.sum(low**2, axis=1)) + np.sum(np.maximum(s - mu[:, None], 0.0)))


def _envelope(Y: np.ndarray, lam: np.ndarray, need_grad: bool):
    """Value and Y-gradient of ``min_L lam ||Y - L||^2 + ||C(L)||_*`` per block.

    With singular values s of ``Z = C(Y)`` the value is
    ``lam sum min(s, mu)^2 + sum max(s - mu, 0)`` and ``Z - T_mu(Z)`` keeps
    each singular direction scaled by ``min(s, mu) / s``.
    """
    Z = linalg.center_batch(Y)
    mu = 0.5 / lam
    G, left = _gram(Z)
    if not need_grad:
        return _envelope_value(np.linalg.eigvalsh(G), lam, mu), None
    w, V = np.linalg.eigh(G)
    s = np.sqrt(np.maximum(w, 0.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        keep = np.where(s > mu[:, None], mu[:, None] / s, 1.0)
    P = (V * keep[:, None, :]) @ V.transpose(0, 2, 1)
    resid = P @ Z if left else Z @ P
    return _envelope_value(w, lam, mu), 2.0 * lam[:, None, None] * resid


class CoupledProblem:
    """Smooth part and weighted l1 part of the objective in the shared S."""

    def __init__(self, X_tilde, patches: list[Patch], lambdas, betas):
        X_tilde = np.asarray(X_tilde, dtype=float)
        self.p, self.n = X_tilde.shape
        self.patches = patches
        self.lambdas = np.broadcast_to(np.asarray(lambdas, dtype=float), (len(patches),)).copy()
        self.betas = np.broadcast_to(np.asarray(betas, dtype=float), (len(patches),)).copy()
        self.groups = _Groups(patches, self.p, self.n)
        self.X_local = self.groups.gather(X_tilde)
        self.lam = [self.lambdas[m] for m in self.groups.members]
        self.l1_weights = np.broadcast_to(coverage(patches, self.n, self.betas), (self.p, self.n))
        self.lipschitz = 2.0 * float(np.max(coverage(patches, self.n, self.lambdas)))

    @property
    def shape(self):
        return (self.p, self.n)

    def with_lambdas(self, lambdas) -> "CoupledProblem":
        new = copy.copy(self)
        new.lambdas = np.asarray(lambdas, dtype=float)
        new.lam = [new.lambdas[m] for m in self.groups.members]
        new.lipschitz = 2.0 * float(np.max(coverage(self.patches, self.n, new.lambdas)))
        return new

    def residual_blocks(self, S) -> list[np.ndarray]:
        S_local = self.groups.gather(S)
        return [X - Sl for X, Sl in zip(self.X_local, S_local)]

    def smooth(self, S, need_grad: bool = True):
        value, grads = 0.0, []
        for Y, lam in zip(self.residual_blocks(S), self.lam):
            v, g = _envelope(Y, lam, need_grad)
            value += v
            grads.append(g)
        if not need_grad:
            return value, None
        return value, -self.groups.scatter(grads)

    def nonsmooth(self, S) -> float:
        return float(np.sum(self.l1_weights * np.abs(S)))

    def prox(self, V, step: float):
        return _soft(V, step * self.l1_weights)


class DecoupledProblem:
    """Independent sparse copies per patch: the patch-wise RPCA baseline."""

    def __init__(self, X_tilde, patches: list[Patch], lambdas, betas):
        X_tilde = np.asarray(X_tilde, dtype=float)
        self.p, self.n = X_tilde.shape
        self.patches = patches
        self.lambdas = np.broadcast_to(np.asarray(lambdas, dtype=float), (len(patches),)).copy()
        self.betas = np.broadcast_to(np.asarray(betas, dtype=float), (len(patches),)).copy()
        self.groups = _Groups(patches, self.p, self.n)
        if len(self.groups.idx) != 1:
            raise ValueError("the baseline needs equally sized patches")
        self.X_local = self.groups.gather(X_tilde)[0]
        self.l1_weights = np.broadcast_to(self.betas[:, None, None], self.X_local.shape)
        self.lipschitz = 2.0 * float(np.max(self.lambdas))

    @property
    def shape(self):
        return self.X_local.shape

    def with_lambdas(self, lambdas) -> "DecoupledProblem":
        new = copy.copy(self)
        new.lambdas = np.asarray(lambdas, dtype=float)
        new.lipschitz = 2.0 * float(np.max(new.lambdas))
        return new

    def smooth(self, V, need_grad: bool = True):
        value, g = _envelope(self.X_local - V, self.lambdas, need_grad)
        return value, (None if g is None else -g)

    def nonsmooth(self, V) -> float:
        return float(np.sum(self.l1_weights * np.abs(V)))

    def prox(self, V, step: float):
        return _soft(V, step * self.l1_weights)

    def to_global(self, V) -> np.ndarray:
        """Average the patch copies of each column."""
        cov = coverage(self.patches, self.n)
        return self.groups.scatter([V]) / cov


def _soft(V, thresh):
    return np.sign(V) * np.maximum(np.abs(V) - thresh, 0.0)


# ---------------------------------------------------------------------------
# FISTA


@dataclass
class FistaResult:
    x: np.ndarray
    trace: list
    converged: bool
    iterations: int
    lipschitz: float


def fista(problem, x0, max_iters=500, rel_tol=1e-6, backtrack=0.5, restart=True,
          step_init=0.1, expand=1.1) -> FistaResult:
    """Accelerated proximal gradient with backtracking and adaptive restart.

    The step starts at ``1 / (step_init * lipschitz bound)``, grows by
    `expand` every iteration and is cut by `backtrack` whenever the
    quadratic upper bound fails. When the objective goes up the momentum is
    dropped and the next step is a plain proximal gradient step from the last
    accepted point, so the recorded objective is nonincreasing. Stops when
    the relative objective change falls below `rel_tol`.
    """
    x = np.array(x0, dtype=float)
    L = problem.lipschitz * step_init
    fx, _ = problem.smooth(x, need_grad=False)
    F_prev = fx + problem.nonsmooth(x)
    trace = [F_prev]
    y, t = x.copy(), 1.0
    converged = False
    it = 0
    while it < max_iters:
        it += 1
        fy, gy = problem.smooth(y)
        if not np.isfinite(fy):
            raise DivergenceError(f"objective became {fy} at iteration {it}")
        L /= expand
        while True:
            z = problem.prox(y - gy / L, 1.0 / L)
            fz, _ = problem.smooth(z, need_grad=False)
            if not np.isfinite(fz):
                raise DivergenceError(f"objective became {fz} at iteration {it} (step 1/{L:g})")
            d = z - y
            if fz <= fy + np.vdot(gy, d) + 0.5 * L * np.vdot(d, d) + 1e-12 * abs(fy):
                break
            L /= backtrack
        Fz = fz + problem.nonsmooth(z)
        if not np.isfinite(Fz):
            raise DivergenceError(f"objective became {Fz} at iteration {it} (step 1/{L:g})")
        if restart and Fz > F_prev:
            if t == 1.0:
                # A plain proximal step from x failed to descend: stalled at rounding level.
                converged = True
                break
            y, t = x.copy(), 1.0
            continue
        t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
        y = z + ((t - 1.0) / t_next) * (z - x)
        x, t = z, t_next
        trace.append(Fz)
        if abs(F_prev - Fz) <= rel_tol * abs(F_prev) or F_prev == Fz == 0.0:
            converged = True
            break
        F_prev = Fz
    return FistaResult(x, trace, converged, it, L)


def _continuation_caps(problem, x0, factor: float) -> list[float]:
    """Lambda caps for warm-started continuation, ending with no cap."""
    lam_max = float(np.max(problem.lambdas))
    # Smoothing level mu = 1/(2 lambda) starts at a twentieth of the typical
    # patch spectral norm; below that the envelope is already nearly the
    # nuclear norm on the signal directions.
    norms = []
    for Y in _local_blocks(problem, x0):
        norms.append(np.linalg.norm(linalg.center_batch(Y), ord=2, axis=(1, 2)))
    scale = float(np.median(np.concatenate(norms)))
    if scale <= 0:
        return [np.inf]
    cap = 1.0 / (2.0 * 0.05 * scale)
    caps = []
    while cap < lam_max:
        caps.append(cap)
        cap *= factor
    return caps + [np.inf]


def _local_blocks(problem, x0):
    if isinstance(problem, CoupledProblem):
        return problem.residual_blocks(x0)
    return [problem.X_local - x0]


def solve(problem, x0, config: FistaConfig) -> FistaResult:
    """FISTA on `problem`, optionally through a lambda continuation path."""
    caps = _continuation_caps(problem, x0, config.continuation_factor) if config.continuation else [np.inf]
    x = x0
    for cap in caps[:-1]:
        staged = problem.with_lambdas(np.minimum(problem.lambdas, cap))
        x = fista(staged, x, config.max_iters, config.continuation_tol, config.backtrack, config.restart,
                  config.step_init, config.expand).x
    return fista(problem, x, config.max_iters, config.rel_tol, config.backtrack, config.restart,
                 config.step_init, config.expand)


def smooth_objective_and_gradient(S, patches: list[Patch], X_tilde, lambdas):
    """Smooth part of the S-only objective and its gradient."""
    return CoupledProblem(X_tilde, patches, lambdas, 1.0).smooth(np.asarray(S, dtype=float))


def full_objective(S, L_list, patches: list[Patch], X_tilde, lambdas, betas) -> float:
    """Direct evaluation of the coupled objective at (S, {L_i})."""
    X_tilde = np.asarray(X_tilde, dtype=float)
    lambdas = np.broadcast_to(np.asarray(lambdas, dtype=float), (len(patches),))
    betas = np.broadcast_to(np.asarray(betas, dtype=float), (len(patches),))
    total = 0.0
    for L, lam, beta, patch in zip(L_list, lambdas, betas, patches):
        c = patch.columns
        S_i = S[:, c]
        total += lam * np.sum((X_tilde[:, c] - L - S_i) ** 2)
        total += np.sum(np.linalg.svd(linalg.center(L), compute_uv=False))
        total += beta * np.sum(np.abs(S_i))
    return float(total)


def fista_solve(X_tilde, patches: list[Patch], lambdas, betas, config: FistaConfig | None = None, S0=None):
    """Minimize the coupled objective over S. Returns ``(S_hat, trace, info)``."""
    config = config or FistaConfig()
    problem = CoupledProblem(X_tilde, patches, lambdas, betas)
    x0 = np.zeros(problem.shape) if S0 is None else np.array(S0, dtype=float)
    res = solve(problem, x0, config)
    return res.x, res.trace, res


def optimality_residual(S, problem) -> float:
    """Proximal fixed-point residual ``||S - prox(S - grad/L)|| / max(1, ||S||)``."""
    _, g = problem.smooth(S)
    L = problem.lipschitz
    return float(np.linalg.norm(S - problem.prox(S - g / L, 1.0 / L)) / max(1.0, np.linalg.norm(S)))


# ---------------------------------------------------------------------------
# Outer loop


def _per_patch(value, count: int, default) -> np.ndarray:
    if value is None:
        return np.asarray(default, dtype=float)
    return np.broadcast_to(np.asarray(value, dtype=float), (count,)).copy()


def _make_patches(X_current, config: SolverConfig) -> list[Patch]:
    if config.patch_mode == "global":
        return global_patch(X_current.shape[1])
    return build_patches(X_current, config.k)


def _patch_scale(patches, X_ref) -> float:
    norms = np.concatenate([
        np.linalg.norm(linalg.center_batch(block), ord=2, axis=(1, 2))
        for block in _Groups(patches, *X_ref.shape).gather(X_ref)
    ])
    scale = float(np.median(norms))
    return scale if scale > 0 else _data_scale(X_ref)


def _weights(patches, X_ref, gammas, config: SolverConfig):
    p = X_ref.shape[0]
    mu_min = config.mu_floor * _patch_scale(patches, X_ref)
    lambdas, betas = [], []
    for patch in patches:
        # lambda = sqrt(min(k+1, p)) / eps, so mu >= mu_min bounds eps from below.
        floor = 2.0 * np.sqrt(min(patch.size, p)) * mu_min
        eps = estimate_epsilon(patch, X_ref, float(gammas[patch.center]), config.sigma, floor=floor)
        w = estimate_weights(eps, patch.size - 1, p)
        lambdas.append(w.lambda_hat)
        betas.append(w.beta)
    lambdas = _per_patch(config.lambdas, len(patches), lambdas)
    betas = _per_patch(config.betas, len(patches), betas)
    return lambdas, betas


def _data_scale(X) -> float:
    scale = float(np.sqrt(np.mean(np.sum(linalg.center(X) ** 2, axis=0))))
    return scale if scale > 0 else 1.0


def _curvature(X, config: SolverConfig) -> np.ndarray:
    n = X.shape[1]
    if config.gamma_bar is not None:
        return np.full(n, float(config.gamma_bar))
    if config.lambdas is not None or n < 3:
        return np.zeros(n)
    gammas, _ = estimate_curvature(X, config.curvature, config.seed)
    return gammas


def _finalize(X_tilde, S_hat, patches, lambdas, sigma):
    n = X_tilde.shape[1]
    blocks = [X_tilde[:, pt.columns] - S_hat[:, pt.columns] for pt in patches]
    if sigma > 0:
        L_list = [denoise_patch_svht(Y, sigma) for Y in blocks]
        X_hat = fuse(L_list, lambdas, patches, n)
    else:
        L_list = [closed_form_L(Y, lam) for Y, lam in zip(blocks, lambdas)]
        X_hat = X_tilde - S_hat
    return L_list, X_hat


def nrpca(X_tilde, config: SolverConfig | None = None) -> SolveResult:
    """Nonlinear robust PCA on the columns of `X_tilde`.

    Estimates curvature and patch weights, then alternates between
    rebuilding the kNN patches on ``X_tilde - S_hat`` and re-solving for
    S_hat (warm started), `config.T` times. With Gaussian noise the final
    patches are hard-thresholded and fused into X_hat; without it
    ``X_hat = X_tilde - S_hat``.
    """
    return _run(X_tilde, config or SolverConfig(), coupled=True)


def patchwise_rpca_baseline(X_tilde, config: SolverConfig | None = None) -> SolveResult:
    """Robust PCA on every patch independently, with no agreement between
    overlapping copies of the sparse part. Copies are averaged per column."""
    return _run(X_tilde, config or SolverConfig(), coupled=False)


def _run(X_tilde, config: SolverConfig, coupled: bool) -> SolveResult:
    X_tilde = linalg.as_matrix(X_tilde, "X_tilde")
    p, n = X_tilde.shape
    if config.patch_mode == "knn" and config.k >= n:
        raise ValueError(f"k={config.k} must be smaller than the number of samples {n}")
    gammas = _curvature(X_tilde, config)
    S_hat = np.zeros_like(X_tilde)
    traces, rounds, converged, iterations, per_round = [], [], [], [], []
    for r in range(config.T):
        X_current = X_tilde - S_hat
        if r > 0 and config.reestimate_curvature:
            gammas = _curvature(X_current, config)
        patches = _make_patches(X_current, config)
        if r == 0 or config.reestimate_weights or (r > 0 and config.reestimate_curvature):
            # Weights belong to the patch center, so later rounds reuse them.
            lambdas, betas = _weights(patches, X_current, gammas, config)
        if coupled:
            problem = CoupledProblem(X_tilde, patches, lambdas, betas)
            x0 = S_hat
        else:
            problem = DecoupledProblem(X_tilde, patches, lambdas, betas)
            x0 = problem.groups.gather(S_hat)[0]
        res = solve(problem, x0, config.fista)
        S_hat = res.x if coupled else problem.to_global(res.x)
        log.info("round %d: %d iterations, objective %.6g", r + 1, res.iterations, res.trace[-1])
        traces.append(res.trace)
        rounds.append(np.stack([pt.columns for pt in patches]))
        converged.append(res.converged)
        iterations.append(res.iterations)
        per_round.append(S_hat.copy())
    if coupled:
        L_list, X_hat = _finalize(X_tilde, S_hat, patches, lambdas, config.sigma)
    else:
        # Each patch keeps its own sparse copy when denoising.
        L_list, X_hat = _finalize_decoupled(X_tilde, S_hat, res.x, problem, config.sigma)
    return SolveResult(
        S_hat=S_hat,
        X_hat=X_hat,
        L_hat_per_patch=L_list,
        objective_trace=traces,
        patches_per_round=rounds,
        lambdas=lambdas,
        betas=betas,
        gamma_bar=gammas,
        converged=converged,
        iterations=iterations,
        S_hat_per_round=per_round,
        _X_tilde=X_tilde,
    )


def _finalize_decoupled(X_tilde, S_hat, V, problem: DecoupledProblem, sigma):
    blocks = problem.X_local - V
    if sigma > 0:
        L_list = [denoise_patch_svht(Y, sigma) for Y in blocks]
        return L_list, fuse(L_list, problem.lambdas, problem.patches, X_tilde.shape[1])
    L_list = [closed_form_L(Y, lam) for Y, lam in zip(blocks, problem.lambdas)]
    return L_list, X_tilde - S_hat
