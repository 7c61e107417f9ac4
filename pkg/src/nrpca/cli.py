"""Command-line pipeline: generate | denoise | baseline | curvature | evaluate.

Exit codes: 0 success, 2 configuration error, 3 I/O error, 4 solver did not
converge within max_iters (outputs are still written).
"""

from __future__ import annotations

import argparse
import contextlib
import logging
import sys
from pathlib import Path

import numpy as np

from . import datagen
from .curvature import estimate_curvature
from .datagen import GroundTruth, NoiseSpec
from .io import ConfigError, MatrixParseError, RunConfig, format_config, load_config, read_matrix, write_matrix
from .metrics import evaluate
from .solver import nrpca, patchwise_rpca_baseline

EXIT_OK, EXIT_CONFIG, EXIT_IO, EXIT_NOT_CONVERGED = 0, 2, 3, 4

log = logging.getLogger("nrpca")

PLANE_NOISE = NoiseSpec(0.0, 30, 5.0, 0.09, True)

# name -> (default n, generator(n, seed, cfg), base noise)
PRESETS = {
    "roll3d": (2000, lambda n, s, c: datagen.swiss_roll_3d(n, s, c.random_t), datagen.ROLL_3D_NOISE),
    "roll20d": (2000, lambda n, s, c: datagen.swiss_roll_20d(n, s, c.random_t), datagen.ROLL_20D_NOISE),
    "circle": (2000, lambda n, s, c: datagen.circle(n, 5.0, s), datagen.NO_NOISE),
    "sphere": (3000, lambda n, s, c: datagen.sphere(n, 2.0, s), datagen.NO_NOISE),
    "flat": (529, lambda n, s, c: datagen.flat_grid(int(round(np.sqrt(n)))), datagen.NO_NOISE),
    "plane": (300, lambda n, s, c: datagen.planted_plane(20, n, 10.0, s), PLANE_NOISE),
}


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _preset(cfg: RunConfig):
    if cfg.preset not in PRESETS:
        raise ConfigError(f"unknown preset {cfg.preset!r}; choose from {', '.join(PRESETS)}")
    n_default, make, base = PRESETS[cfg.preset]
    n = cfg.n or n_default
    return n, make(n, cfg.seed, cfg), cfg.noise_spec(base)


def _outdir(cfg: RunConfig) -> Path:
    if not cfg.output:
        raise ConfigError("an output directory is required (--out or output = ...)")
    out = Path(cfg.output)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot create {out}: {exc.strerror}") from None
    return out


def cmd_generate(cfg: RunConfig) -> int:
    n, X, spec = _preset(cfg)
    out = _outdir(cfg)
    X_tilde, truth = datagen.add_mixed_noise(X, spec, cfg.seed)
    for name, M in (("X", X), ("X_tilde", X_tilde), ("S", truth.S), ("E", truth.E)):
        write_matrix(out / f"{name}.csv", M)
    manifest = {"preset": cfg.preset, "n": n, "seed": cfg.seed, "random_t": cfg.random_t, **spec.as_dict()}
    (out / "manifest.txt").write_text(format_config(manifest))
    print(f"wrote {X.shape[0]}x{n} matrices with {truth.support.size} sparse entries to {out}")
    return EXIT_OK


def _resolve_sigma(cfg: RunConfig, input_path: Path) -> float:
    if cfg.sigma is not None:
        return cfg.sigma
    if cfg.gaussian_var is not None:
        return float(np.sqrt(cfg.gaussian_var))
    manifest = input_path.parent / "manifest.txt"
    if manifest.exists():
        var = load_config(manifest).gaussian_var
        if var is not None:
            return float(np.sqrt(var))
    return 0.0


def cmd_denoise(cfg: RunConfig, baseline: bool = False) -> int:
    if not cfg.input:
        raise ConfigError("an input matrix is required (--input or input = ...)")
    X_tilde = read_matrix(cfg.input)
    solver_cfg = cfg.solver_config(_resolve_sigma(cfg, Path(cfg.input)))
    out = _outdir(cfg)
    result = (patchwise_rpca_baseline if baseline else nrpca)(X_tilde, solver_cfg)
    write_matrix(out / "X_hat.csv", result.X_hat)
    write_matrix(out / "S_hat.csv", result.S_hat)
    write_matrix(out / "X_minus_S.csv", result.X_minus_S)
    trace = [(r + 1, i, v) for r, tr in enumerate(result.objective_trace) for i, v in enumerate(tr)]
    write_matrix(out / "trace.csv", np.array(trace, dtype=float).T, header=["round", "iteration", "objective"])
    for r, idx in enumerate(result.patches_per_round):
        write_matrix(out / f"patches_round{r + 1}.csv", idx.T)
    status = "converged" if all(result.converged) else "hit max_iters"
    print(f"{'baseline' if baseline else 'nrpca'}: {len(result.objective_trace)} round(s), "
          f"iterations {result.iterations}, {status}")
    return EXIT_OK if all(result.converged) else EXIT_NOT_CONVERGED


def cmd_curvature(cfg: RunConfig) -> int:
    if cfg.input:
        X = read_matrix(cfg.input)
    else:
        _, X, _ = _preset(cfg)
    gammas, region = estimate_curvature(X, cfg.curvature_config(), cfg.seed)
    print(f"gamma_bar = {region.gamma_bar:.10g} from {region.m} pairs (shortfall {region.shortfall})")
    if cfg.mode == "point":
        print(f"pointwise gamma_bar: median {np.median(gammas):.10g}, "
              f"min {gammas.min():.10g}, max {gammas.max():.10g}")
    if cfg.output:
        out = _outdir(cfg)
        # inverse radii stay finite for straight chords
        rows = np.column_stack([region.pairs, np.sqrt(region.samples)]).T
        write_matrix(out / "radii.csv", rows, header=["p", "q", "inv_radius"])
        if cfg.mode == "point":
            write_matrix(out / "gamma_point.csv", gammas[None, :], header=["gamma_bar"])
    return EXIT_OK


def cmd_evaluate(cfg: RunConfig, truth_dir, x_hat=None, s_hat=None) -> int:
    truth_dir = Path(truth_dir)
    result_dir = Path(cfg.input) if cfg.input else None
    x_hat = Path(x_hat) if x_hat else (result_dir / "X_hat.csv" if result_dir else None)
    if x_hat is None:
        raise ConfigError("need --result DIR or --x-hat FILE")
    if s_hat is None and result_dir is not None and (result_dir / "S_hat.csv").exists():
        s_hat = result_dir / "S_hat.csv"
    X = read_matrix(truth_dir / "X.csv")
    S = read_matrix(truth_dir / "S.csv")
    E = read_matrix(truth_dir / "E.csv")
    Xh = read_matrix(x_hat)
    Sh = read_matrix(s_hat) if s_hat else np.zeros_like(S)
    for name, M in (("S", S), ("E", E), ("X_hat", Xh), ("S_hat", Sh)):
        if M.shape != X.shape:
            raise CliError(EXIT_IO, f"{name} has shape {M.shape[::-1]} but X has {X.shape[::-1]}")
    truth = GroundTruth(X, S, E, np.flatnonzero(S.ravel()))
    report = evaluate(Xh, Sh, truth, cfg.threshold)
    print(report.format())
    if cfg.output:
        out = _outdir(cfg)
        (out / "report.txt").write_text(report.format() + "\n")
        (out / "report.kv").write_text(format_config(report.as_dict()))
        d = min(3, X.shape[0])
        for name, M in (("X", X), ("X_tilde", truth.X_tilde), ("X_hat", Xh), ("X_minus_S", truth.X_tilde - Sh)):
            write_matrix(out / f"proj_{name}.csv", M[:d], header=[f"x{i + 1}" for i in range(d)])
    return EXIT_OK


# ---------------------------------------------------------------------------


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key = value config file (default: $NRPCA_CONFIG)")
    p.add_argument("--out", dest="output", help="output directory")
    p.add_argument("--seed", type=int)
    p.add_argument("--threads", type=int, help="cap on BLAS worker threads")
    p.add_argument("-v", "--verbose", action="store_true")


def _solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", help="noisy matrix file (one sample per row)")
    p.add_argument("--k", type=int)
    p.add_argument("--T", type=int)
    p.add_argument("--sigma", type=float)
    p.add_argument("--lambda", dest="lambda_", type=float, help="fixed lambda for every patch")
    p.add_argument("--max-iters", dest="max_iters", type=int)
    p.add_argument("--gamma-bar", dest="gamma_bar", type=float, help="known curvature; skips estimation")


def _curvature_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--r1", type=float)
    p.add_argument("--r2", type=float)
    p.add_argument("--m", type=int)
    p.add_argument("--mode", choices=["region", "point"])
    p.add_argument("--graph-k", dest="graph_k", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nrpca", description="Nonlinear robust PCA")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a synthetic dataset and its noise")
    _common(g)
    g.add_argument("--preset", choices=sorted(PRESETS))
    g.add_argument("--n", type=int)

    for name, help_ in (("denoise", "run NRPCA on a noisy matrix"), ("baseline", "patch-wise robust PCA")):
        d = sub.add_parser(name, help=help_)
        _common(d)
        _solver_flags(d)
        _curvature_flags(d)
        if name == "denoise":
            d.add_argument("--baseline", action="store_true", help="patch-wise robust PCA instead")

    c = sub.add_parser("curvature", help="estimate mean curvature")
    _common(c)
    c.add_argument("--input")
    c.add_argument("--preset", choices=sorted(PRESETS))
    c.add_argument("--n", type=int)
    _curvature_flags(c)

    e = sub.add_parser("evaluate", help="compare a result with the ground truth")
    _common(e)
    e.add_argument("--result", dest="input", help="directory holding X_hat.csv and S_hat.csv")
    e.add_argument("--truth", required=True, help="directory holding X.csv, S.csv and E.csv")
    e.add_argument("--x-hat", dest="x_hat")
    e.add_argument("--s-hat", dest="s_hat")
    e.add_argument("--threshold", type=float)
    return parser


_NOT_CONFIG = {"command", "config", "threads", "verbose", "baseline", "truth", "x_hat", "s_hat"}


def _limit_threads(n):
    if not n:
        return contextlib.nullcontext()
    try:
        from threadpoolctl import threadpool_limits
    except ImportError:
        log.warning("threadpoolctl is not installed; --threads ignored")
        return contextlib.nullcontext()
    return threadpool_limits(limits=n)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        cfg = load_config(args.config)
        cfg = cfg.updated(**{k: v for k, v in vars(args).items() if k not in _NOT_CONFIG})
        with _limit_threads(args.threads):
            if args.command == "generate":
                return cmd_generate(cfg)
            if args.command in ("denoise", "baseline"):
                return cmd_denoise(cfg, baseline=args.command == "baseline" or args.baseline)
            if args.command == "curvature":
                return cmd_curvature(cfg)
            return cmd_evaluate(cfg, args.truth, args.x_hat, args.s_hat)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (MatrixParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
