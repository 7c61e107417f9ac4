"""Accuracy of the patch residual estimate on a cylinder as k grows.

    python3 scripts/epsilon_trend.py --seeds 20
"""

import argparse

import numpy as np

from nrpca import datagen
from nrpca.curvature import CurvatureConfig, estimate_curvature, estimate_epsilon
from nrpca.graph import build_patches


def errors(k, seed, radius, sigma, estimated, patches_used=300):
    X, angle = datagen.cylinder(3000, radius, 10.0, seed)
    E = np.random.default_rng([seed, 1]).normal(0.0, sigma, X.shape)
    X_tilde = X + E
    gamma_bar = np.sqrt(3 / 8) / radius
    if estimated:
        gamma_bar = estimate_curvature(X_tilde, CurvatureConfig(), seed)[1].gamma_bar
    out = []
    for patch in build_patches(X_tilde, k)[:patches_used]:
        cols, i = patch.columns, patch.center
        normal = np.array([np.cos(angle[i]), np.sin(angle[i]), 0.0])
        R = np.outer(normal, normal @ (X[:, cols] - X[:, [i]]))
        true = np.sum((R + E[:, cols]) ** 2)
        out.append(abs(estimate_epsilon(patch, X_tilde, gamma_bar, sigma) ** 2 - true) / true)
    return np.median(out)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--radius", type=float, default=1.0)
    ap.add_argument("--sigma", type=float, default=0.05)
    ap.add_argument("--estimated", action="store_true", help="use the estimated curvature instead of the true one")
    args = ap.parse_args()
    for k in (10, 30, 100):
        med = np.median([errors(k, s, args.radius, args.sigma, args.estimated) for s in range(args.seeds)])
        print(f"k={k:>3}: median relative error {med:.4f}")


if __name__ == "__main__":
    main()
