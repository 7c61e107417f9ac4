"""Mean curvature estimates on manifolds with known curvature.

    python3 scripts/curvature_demo.py --seeds 20
"""

import argparse

import numpy as np

from nrpca import datagen
from nrpca.curvature import CurvatureConfig, estimate_curvature

CASES = {
    "circle r=5": (lambda s: datagen.circle(2000, 5.0, s), 0.2),
    "sphere r=2": (lambda s: datagen.sphere(3000, 2.0, s), 0.5),
    "cylinder r=1": (lambda s: datagen.cylinder(3000, 1.0, 10.0, s)[0], np.sqrt(3 / 8)),
    "random plane 10x10": (lambda s: datagen.flat_strip(2000, 10.0, 10.0, ambient=3, seed=s), 0.0),
    "grid 45x45": (lambda s: datagen.flat_grid(45), 0.0),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--graph-k", type=int, default=30)
    ap.add_argument("--m", type=int, default=50)
    args = ap.parse_args()
    cfg = CurvatureConfig(m=args.m, graph_k=args.graph_k)
    print(f"{'case':>20} {'truth':>7} {'median':>8} {'min':>8} {'max':>8}")
    for name, (make, truth) in CASES.items():
        g = np.array([estimate_curvature(make(s), cfg, s)[1].gamma_bar for s in range(args.seeds)])
        print(f"{name:>20} {truth:>7.4f} {np.median(g):>8.4f} {g.min():>8.4f} {g.max():>8.4f}")


if __name__ == "__main__":
    main()
