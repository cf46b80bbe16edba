"""Evaluation metrics: Spearman (rank-Pearson with average ranks), Pearson, accuracy.

Ties get fractional (average) ranks and Spearman is computed as Pearson over
those ranks, the correct general form; the popular 1 - 6*sum(d^2)/... shortcut
is only valid tie-free and lives in the test suite as an oracle. Sums use
math.fsum: the paper-scale evaluations correlate tens of thousands of values
with small variances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class EvaluationReport:
    """Joint quality report for one predictions-vs-gold comparison."""

    r_s: float
    rho: float
    accuracy: float
    n: int
    threshold_gold: float
    threshold_pred: float

    def to_dict(self) -> dict:
        return {
            "r_s": self.r_s,
            "rho": self.rho,
            "accuracy": self.accuracy,
            "n": self.n,
            "threshold_gold": self.threshold_gold,
            "threshold_pred": self.threshold_pred,
        }


def average_ranks(values) -> np.ndarray:
    """Fractional ranks (1-based); tied values share the mean of their positions.

    Ranks always sum to n(n+1)/2.
    """
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("average_ranks needs a non-empty 1-d sequence")
    n = arr.size
    order = np.argsort(arr, kind="stable")
    sorted_vals = arr[order]
    boundaries = np.flatnonzero(sorted_vals[1:] != sorted_vals[:-1]) + 1
    starts = np.concatenate(([0], boundaries))
    ends = np.concatenate((boundaries, [n]))
    # positions start+1 .. end share rank (start + end + 1) / 2
    tied_rank = (starts + ends + 1) / 2.0
    ranks = np.empty(n, dtype=np.float64)
    ranks[order] = np.repeat(tied_rank, ends - starts)
    return ranks


def pearson(x, y) -> float:
    """Product-moment correlation, clamped to [-1, 1]; fsum-compensated sums."""
    xa = np.asarray(x, dtype=np.float64)
    ya = np.asarray(y, dtype=np.float64)
    if xa.shape != ya.shape or xa.ndim != 1:
        raise ValueError("pearson needs two equal-length 1-d sequences")
    n = xa.size
    if n < 2:
        raise ValueError("pearson needs at least 2 points")
    mx = math.fsum(xa) / n
    my = math.fsum(ya) / n
    dx = xa - mx
    dy = ya - my
    sxx = math.fsum(dx * dx)
    syy = math.fsum(dy * dy)
    if sxx == 0.0 or syy == 0.0:
        raise ValueError("pearson undefined: zero variance input")
    sxy = math.fsum(dx * dy)
    return float(np.clip(sxy / math.sqrt(sxx * syy), -1.0, 1.0))


def spearman(x, y) -> float:
    """Spearman rank correlation: Pearson over fractional ranks."""
    xa = np.asarray(x, dtype=np.float64)
    ya = np.asarray(y, dtype=np.float64)
    if xa.shape != ya.shape or xa.ndim != 1:
        raise ValueError("spearman needs two equal-length 1-d sequences")
    if xa.size < 2:
        raise ValueError("spearman needs at least 2 points")
    if np.all(xa == xa[0]) or np.all(ya == ya[0]):
        raise ValueError("spearman undefined: constant input list")
    return pearson(average_ranks(xa), average_ranks(ya))


def binary_accuracy(pred, gold, threshold_gold: float, threshold_pred: float) -> float:
    """Fraction of items where (pred >= threshold_pred) agrees with (gold >= threshold_gold)."""
    pa = np.asarray(pred, dtype=np.float64)
    ga = np.asarray(gold, dtype=np.float64)
    if pa.shape != ga.shape or pa.ndim != 1 or pa.size == 0:
        raise ValueError("binary_accuracy needs two equal-length non-empty 1-d sequences")
    return float(np.mean((pa >= threshold_pred) == (ga >= threshold_gold)))


def evaluate_ratings(pred, gold, threshold_gold: float = 3.0,
                     threshold_pred: float | None = None) -> EvaluationReport:
    """Compute r_s, rho, and accuracy for paired predictions and gold ratings.

    The gold threshold defaults to 3.0, the midpoint of the 1..5 scale; the
    prediction threshold defaults to the median of the predictions, a
    scale-free split. Both are overridable.
    """
    pa = np.asarray(pred, dtype=np.float64)
    ga = np.asarray(gold, dtype=np.float64)
    if threshold_pred is None:
        threshold_pred = float(np.median(pa))
    return EvaluationReport(
        r_s=spearman(pa, ga),
        rho=pearson(pa, ga),
        accuracy=binary_accuracy(pa, ga, threshold_gold, threshold_pred),
        n=int(pa.size),
        threshold_gold=float(threshold_gold),
        threshold_pred=float(threshold_pred),
    )
