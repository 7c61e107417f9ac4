"""Sparse recovery on a planted 2D plane in R^20 without Gaussian noise.

    python3 scripts/planted_plane.py --seeds 10
"""

import argparse

import numpy as np

from nrpca import datagen
from nrpca.metrics import evaluate
from nrpca.solver import SolverConfig, nrpca

PLANE_NOISE = datagen.NoiseSpec(0.0, 30, 5.0, 0.09, True)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--T", type=int, default=2)
    ap.add_argument("--side", type=float, default=10.0)
    args = ap.parse_args()
    f1s, errs = [], []
    for seed in range(args.seeds):
        X_tilde, truth = datagen.add_mixed_noise(datagen.planted_plane(20, 300, args.side, seed), PLANE_NOISE, seed)
        res = nrpca(X_tilde, SolverConfig(k=15, T=args.T, sigma=0.0, gamma_bar=0.0, seed=seed))
        rep = evaluate(res.X_hat, res.S_hat, truth)
        f1s.append(rep.f1)
        errs.append(rep.sparse_rel_error)
        print(f"seed {seed}: F1 {rep.f1:.3f}  |S_hat-S|/|S| {rep.sparse_rel_error:.4f}  iterations {res.iterations}")
    print(f"median F1 {np.median(f1s):.3f}, median relative error {np.median(errs):.4f}")


if __name__ == "__main__":
    main()
