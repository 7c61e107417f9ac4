"""Matrix files and flat key=value configuration.

On disk a matrix stores one sample per row (n x p), comma separated, with an
optional single header line. In memory samples are columns (p x n); the
read/write functions transpose at the boundary.
"""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from .curvature import CurvatureConfig
from .datagen import NoiseSpec
from .solver import FistaConfig, SolverConfig

CONFIG_ENV = "NRPCA_CONFIG"
DELIMITER = ","


class MatrixParseError(ValueError):
    def __init__(self, path, line: int, column: int, message: str):
        self.path, self.line, self.column = str(path), line, column
        super().__init__(f"{path}: line {line}, column {column}: {message}")


class ConfigError(ValueError):
    pass


def write_matrix(path, M, header: list[str] | None = None) -> None:
    """Write a p x n matrix as n rows of p values (17 significant digits)."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {M.shape}")
    lines = []
    if header is not None:
        if len(header) != M.shape[0]:
            raise ValueError(f"header has {len(header)} names for {M.shape[0]} columns")
        lines.append(DELIMITER.join(header))
    lines.extend(DELIMITER.join("%.17g" % v for v in row) for row in M.T)
    Path(path).write_text("\n".join(lines) + "\n")


def _is_number(token: str) -> bool:
    try:
        float(token)
    except ValueError:
        return False
    return True


def read_matrix(path) -> np.ndarray:
    """Read a matrix file written by :func:`write_matrix`; returns p x n."""
    path = Path(path)
    text = path.read_text()
    raw = [(i + 1, line) for i, line in enumerate(text.splitlines()) if line.strip()]
    if raw and not all(_is_number(t) for t in raw[0][1].split(DELIMITER)):
        raw = raw[1:]  # header
    if not raw:
        raise MatrixParseError(path, 1, 1, "no data rows")
    rows = []
    width = None
    for lineno, line in raw:
        tokens = line.split(DELIMITER)
        if width is None:
            width = len(tokens)
        elif len(tokens) != width:
            raise MatrixParseError(path, lineno, min(len(tokens), width) + 1,
                                   f"expected {width} values, found {len(tokens)}")
        row = []
        for col, tok in enumerate(tokens, start=1):
            try:
                v = float(tok)
            except ValueError:
                raise MatrixParseError(path, lineno, col, f"not a number: {tok.strip()!r}") from None
            if not np.isfinite(v):
                raise MatrixParseError(path, lineno, col, f"non-finite value {tok.strip()!r}")
            row.append(v)
        rows.append(row)
    return np.array(rows, dtype=float).T


# ---------------------------------------------------------------------------
# Configuration


@dataclass
class RunConfig:
    """Every tunable of the pipeline under one flat namespace."""

    input: str | None = None
    output: str | None = None
    preset: str = "roll3d"
    n: int | None = None
    seed: int = 0
    # solver
    k: int = 15
    T: int = 2
    sigma: float | None = None  # None: take the Gaussian level from the noise spec
    lambda_: float | None = None
    beta: float | None = None
    gamma_bar: float | None = None
    mu_floor: float = 0.02
    patch_mode: str = "knn"
    reestimate_curvature: bool = False
    reestimate_weights: bool = False
    max_iters: int = 500
    rel_tol: float = 1e-6
    restart: bool = True
    continuation: bool = True
    # noise
    gaussian_var: float | None = None
    sparse_count: int | None = None
    sparse_mean: float | None = None
    sparse_var: float | None = None
    sign_flip: bool | None = None
    random_t: bool = False
    # curvature
    r1: float | None = None
    r2: float | None = None
    m: int = 50
    mode: str = "region"
    graph_k: int = 30
    # evaluation
    threshold: float = 0.5

    def solver_config(self, default_sigma: float = 0.0) -> SolverConfig:
        sigma = default_sigma if self.sigma is None else self.sigma
        return SolverConfig(
            k=self.k,
            T=self.T,
            sigma=sigma,
            lambdas=self.lambda_,
            betas=self.beta,
            fista=FistaConfig(max_iters=self.max_iters, rel_tol=self.rel_tol, restart=self.restart,
                              continuation=self.continuation),
            curvature=self.curvature_config(),
            patch_mode=self.patch_mode,
            reestimate_curvature=self.reestimate_curvature,
            reestimate_weights=self.reestimate_weights,
            gamma_bar=self.gamma_bar,
            mu_floor=self.mu_floor,
            seed=self.seed,
        )

    def curvature_config(self) -> CurvatureConfig:
        return CurvatureConfig(mode=self.mode, r1=self.r1, r2=self.r2, m=self.m, graph_k=self.graph_k)

    def noise_spec(self, base: NoiseSpec) -> NoiseSpec:
        overrides = {f.name: getattr(self, f.name) for f in fields(NoiseSpec) if getattr(self, f.name) is not None}
        return dataclasses.replace(base, **overrides)

    def updated(self, **values) -> "RunConfig":
        values = {k: v for k, v in values.items() if v is not None}
        return dataclasses.replace(self, **values)


_KEY_ALIASES = {"lambda": "lambda_"}
_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def _field_types() -> dict[str, str]:
    return {f.name: str(f.type) for f in fields(RunConfig)}


def _convert(key: str, text: str, type_name: str):
    text = text.strip()
    if "None" in type_name and text.lower() in ("", "none"):
        return None
    try:
        if type_name.startswith("bool"):
            low = text.lower()
            if low in _TRUE:
                return True
            if low in _FALSE:
                return False
            raise ValueError(text)
        if type_name.startswith("int"):
            return int(text)
        if type_name.startswith("float"):
            return float(text)
    except ValueError:
        raise ConfigError(f"bad value for {key}: {text!r}") from None
    return text


def parse_config(text: str, source: str = "<config>") -> dict:
    """Parse ``key = value`` lines (``#`` starts a comment); unknown keys are errors."""
    types = _field_types()
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected key = value, got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        name = _KEY_ALIASES.get(key, key)
        if name not in types:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        values[name] = _convert(key, value, types[name])
    return values


def load_config(path=None) -> RunConfig:
    """Config from `path`, else from the file named by ``$NRPCA_CONFIG``, else defaults."""
    path = path or os.environ.get(CONFIG_ENV)
    if not path:
        return RunConfig()
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    try:
        return RunConfig(**parse_config(text, str(path)))
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def format_config(values: dict) -> str:
    """Inverse of :func:`parse_config` for plain values."""
    inverse = {v: k for k, v in _KEY_ALIASES.items()}
    lines = []
    for key, value in values.items():
        if isinstance(value, bool):
            value = "true" if value else "false"
        elif isinstance(value, float):
            value = "%.17g" % value
        lines.append(f"{inverse.get(key, key)} = {value}")
    return "\n".join(lines) + "\n"
