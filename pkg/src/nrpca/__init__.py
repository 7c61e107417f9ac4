"""Nonlinear robust PCA: sparse outlier removal and denoising for data near a
low-dimensional manifold, via coupled patch-wise low-rank plus sparse fits."""

from .curvature import CurvatureConfig, arc_solve, estimate_curvature, estimate_epsilon, estimate_weights
from .datagen import NoiseSpec, add_mixed_noise, swiss_roll_3d, swiss_roll_20d
from .graph import Patch, build_patches
from .metrics import evaluate, metrics
from .solver import FistaConfig, SolveResult, SolverConfig, nrpca, patchwise_rpca_baseline

__all__ = [
    "CurvatureConfig",
    "FistaConfig",
    "NoiseSpec",
    "Patch",
    "SolveResult",
    "SolverConfig",
    "add_mixed_noise",
    "arc_solve",
    "build_patches",
    "estimate_curvature",
    "estimate_epsilon",
    "estimate_weights",
    "evaluate",
    "metrics",
    "nrpca",
    "patchwise_rpca_baseline",
    "swiss_roll_20d",
    "swiss_roll_3d",
]
