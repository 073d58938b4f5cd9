"""Evaluation metrics: average absolute error, Pearson r, Bland-Altman agreement."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, ParameterError
from .pipeline import EstimateTrace


@dataclass(frozen=True)
class BlandAltman:
    """Mean difference, its sample standard deviation, and the 95% limits of agreement."""

    mu: float
    sigma: float
    loa_low: float
    loa_high: float


@dataclass(frozen=True)
class EvaluationReport:
    """Aggregate accuracy over a set of recordings.

    ``overall_aae`` is the mean of the per-subject AAEs; ``overall_sd`` is the
    standard deviation of the absolute errors pooled over every window of
    every subject.  Pearson r and Bland-Altman limits are likewise pooled.
    """

    per_subject_aae: dict[str, float]
    overall_aae: float
    overall_sd: float
    pearson_r: float
    bland_altman: BlandAltman
    per_subject_median_ms: dict[str, float]


def _paired(est, truth) -> tuple[np.ndarray, np.ndarray]:
    est = np.asarray(est, dtype=float)
    truth = np.asarray(truth, dtype=float)
    if est.shape != truth.shape or est.ndim != 1:
        raise ParameterError(f"length mismatch: {est.shape} vs {truth.shape}")
    if est.size == 0:
        raise ParameterError("empty sequences")
    return est, truth


def aae(est, truth) -> float:
    """Mean absolute difference between estimated and true BPM."""
    est, truth = _paired(est, truth)
    return float(np.mean(np.abs(est - truth)))


def pearson(est, truth) -> float:
    """Product-moment correlation between estimates and truth."""
    est, truth = _paired(est, truth)
    if est.size < 2:
        raise ParameterError("need at least two samples")
    if est.std() == 0 or truth.std() == 0:
        raise DegenerateInputError("zero variance input to pearson")
    return float(np.corrcoef(est, truth)[0, 1])


def bland_altman(est, truth) -> BlandAltman:
    """Bland-Altman statistics of est - truth with mu +- 1.96 sigma limits."""
    est, truth = _paired(est, truth)
    if est.size < 2:
        raise ParameterError("need at least two samples")
    d = est - truth
    mu = float(d.mean())
    sigma = float(d.std(ddof=1))
    return BlandAltman(mu, sigma, mu - 1.96 * sigma, mu + 1.96 * sigma)


def evaluate_traces(traces: list[EstimateTrace]) -> EvaluationReport:
    """Build the aggregate report from per-recording traces (truth required)."""
    if not traces:
        raise ParameterError("no traces to evaluate")
    per_subject: dict[str, float] = {}
    per_subject_ms: dict[str, float] = {}
    all_est, all_truth = [], []
    for tr in sorted(traces, key=lambda t: t.subject_id):
        truth = tr.truths
        if truth is None:
            raise ParameterError(f"trace for {tr.subject_id!r} has no ground truth")
        est = tr.estimates
        per_subject[tr.subject_id] = aae(est, truth)
        per_subject_ms[tr.subject_id] = tr.median_ms
        all_est.append(est)
        all_truth.append(truth)
    est = np.concatenate(all_est)
    truth = np.concatenate(all_truth)
    abs_err = np.abs(est - truth)
    return EvaluationReport(
        per_subject_aae=per_subject,
        overall_aae=float(np.mean(list(per_subject.values()))),
        overall_sd=float(abs_err.std(ddof=1)),
        pearson_r=pearson(est, truth),
        bland_altman=bland_altman(est, truth),
        per_subject_median_ms=per_subject_ms,
    )
