"""Recovery metrics against a known ground truth."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .datagen import GroundTruth


@dataclass(frozen=True)
class Report:
    rmse_hat: float  # RMSE(X_hat, X)
    rmse_noisy: float  # RMSE(X_tilde, X)
    rmse_ratio: float
    sparse_rel_error: float  # ||S_hat - S||_F / ||S||_F
    support_residual: float  # ||(X_tilde - S_hat - X) on supp(S)||_F / ||S||_F
    precision: float
    recall: float
    f1: float
    threshold: float

    def as_dict(self) -> dict:
        return asdict(self)

    def format(self) -> str:
        return "\n".join(f"{k:>17s}: {v:.6g}" for k, v in self.as_dict().items())


def rmse(A, B) -> float:
    A, B = np.asarray(A, dtype=float), np.asarray(B, dtype=float)
    if A.shape != B.shape:
        raise ValueError(f"shape mismatch {A.shape} vs {B.shape}")
    return float(np.sqrt(np.mean((A - B) ** 2)))


def support_scores(S_hat, support_mask, threshold: float) -> tuple[float, float, float]:
    """Precision, recall and F1 of ``|S_hat| > threshold`` against the true support.

    An empty prediction has precision 0; when both sets are empty every score is 1.
    """
    pred = np.abs(np.asarray(S_hat)) > threshold
    true = np.asarray(support_mask, dtype=bool)
    if pred.shape != true.shape:
        raise ValueError(f"shape mismatch {pred.shape} vs {true.shape}")
    tp = int(np.sum(pred & true))
    n_pred, n_true = int(pred.sum()), int(true.sum())
    if n_pred == 0 and n_true == 0:
        return 1.0, 1.0, 1.0
    precision = tp / n_pred if n_pred else 0.0
    recall = tp / n_true if n_true else 0.0
    f1 = 2 * tp / (n_pred + n_true)
    return precision, recall, f1


def _ratio(num: float, den: float) -> float:
    if den > 0:
        return num / den
    return 0.0 if num == 0 else np.inf


def evaluate(X_hat, S_hat, truth: GroundTruth, threshold: float = 0.5) -> Report:
    X_hat = np.asarray(X_hat, dtype=float)
    S_hat = np.asarray(S_hat, dtype=float)
    X_tilde = truth.X_tilde
    mask = truth.support_mask()
    s_norm = float(np.linalg.norm(truth.S))
    r_hat, r_noisy = rmse(X_hat, truth.X), rmse(X_tilde, truth.X)
    resid = (X_tilde - S_hat - truth.X)[mask]
    precision, recall, f1 = support_scores(S_hat, mask, threshold)
    return Report(
        rmse_hat=r_hat,
        rmse_noisy=r_noisy,
        rmse_ratio=_ratio(r_hat, r_noisy),
        sparse_rel_error=_ratio(float(np.linalg.norm(S_hat - truth.S)), s_norm),
        support_residual=_ratio(float(np.linalg.norm(resid)), s_norm),
        precision=precision,
        recall=recall,
        f1=f1,
        threshold=float(threshold),
    )


def metrics(result, truth: GroundTruth, threshold: float = 0.5) -> Report:
    """Metrics for a :class:`~nrpca.solver.SolveResult`."""
    return evaluate(result.X_hat, result.S_hat, truth, threshold)
