"""Confusion counts, misclassification cost and threshold-sweep curves.

The positive class is always the fault class (label 0), and higher scores
mean "more fault-like".
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dataio import FAULT, FAULT_FREE, DataError
from .svm import CostMatrix


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    tn: int
    fn: int

    def __post_init__(self):
        if min(self.tp, self.fp, self.tn, self.fn) < 0:
            raise ValueError("confusion counts must be nonnegative")

    @property
    def positives(self) -> int:
        return self.tp + self.fn

    @property
    def negatives(self) -> int:
        return self.fp + self.tn

    @property
    def tpr(self) -> float:
        return _ratio(self.tp, self.positives)

    recall = tpr

    @property
    def fpr(self) -> float:
        return _ratio(self.fp, self.negatives)

    @property
    def tnr(self) -> float:
        return _ratio(self.tn, self.negatives)

    @property
    def precision(self) -> float:
        return _ratio(self.tp, self.tp + self.fp)


def _ratio(num, den) -> float:
    return num / den if den else 0.0


def _labels(a, name):
    a = np.asarray(a)
    if a.ndim != 1:
        raise DataError(f"{name} must be one-dimensional")
    if not np.all((a == FAULT) | (a == FAULT_FREE)):
        raise DataError(f"{name} contains labels outside {{0, 1}}")
    return a.astype(np.int64)


def confusion(truth, predicted) -> ConfusionMatrix:
    t = _labels(truth, "truth")
    p = _labels(predicted, "predicted")
    if t.size != p.size:
        raise DataError(f"length mismatch: {t.size} truths vs {p.size} predictions")
    if t.size == 0:
        raise DataError("need at least one prediction")
    fault_t, fault_p = t == FAULT, p == FAULT
    return ConfusionMatrix(
        tp=int(np.count_nonzero(fault_t & fault_p)),
        fp=int(np.count_nonzero(~fault_t & fault_p)),
        tn=int(np.count_nonzero(~fault_t & ~fault_p)),
        fn=int(np.count_nonzero(fault_t & ~fault_p)),
    )


def total_cost(cm: ConfusionMatrix, cost: CostMatrix) -> float:
    return cost.c01 * cm.fn + cost.c10 * cm.fp + cost.c00 * cm.tp + cost.c11 * cm.tn


def f_measure(cm: ConfusionMatrix, beta: float = 1.0) -> float:
    """F-beta score; 0 when there are no true positives."""
    if not beta > 0:
        raise ValueError("beta must be positive")
    if cm.tp == 0:
        return 0.0
    p, r = cm.precision, cm.recall
    b2 = beta * beta
    return (1 + b2) * p * r / (b2 * p + r)


def g_mean(cm: ConfusionMatrix) -> float:
    if cm.positives == 0 or cm.negatives == 0:
        raise DataError("G-mean needs both classes present in the truth")
    return math.sqrt(cm.tpr * cm.tnr)


def degenerate_metrics(cm: ConfusionMatrix) -> list:
    """Names of metrics whose value was forced to 0 by a 0/0."""
    out = []
    if cm.tp + cm.fp == 0:
        out.append("precision")
    if cm.tp == 0:
        out.append("f1")
    return out


# ---------------------------------------------------------------- curves


def _sweep(truth, scores):
    """Cumulative (tp, fp) counts after each distinct-score group, walking
    the threshold down from the highest score."""
    t = _labels(truth, "truth")
    s = np.asarray(scores, dtype=np.float64)
    if s.shape != t.shape:
        raise DataError(f"length mismatch: {t.size} truths vs {s.size} scores")
    if not np.all(np.isfinite(s)):
        raise DataError("scores must be finite")
    order = np.argsort(-s, kind="stable")
    s, pos = s[order], t[order] == FAULT
    tp = np.cumsum(pos, dtype=np.int64)
    fp = np.cumsum(~pos, dtype=np.int64)
    ends = np.flatnonzero(np.append(s[1:] != s[:-1], True))
    return tp[ends], fp[ends], s[ends]


@dataclass(frozen=True, eq=False)
class RocCurve:
    """``points`` rows are ``(fpr, tpr, threshold)``; the first row is the
    ``(0, 0)`` sentinel with threshold ``+inf``."""

    points: np.ndarray
    auc: float

    @property
    def fpr(self):
        return self.points[:, 0]

    @property
    def tpr(self):
        return self.points[:, 1]

    @property
    def thresholds(self):
        return self.points[:, 2]


def roc(truth, scores) -> RocCurve:
    tp, fp, thr = _sweep(truth, scores)
    P, N = int(tp[-1]), int(fp[-1])
    if P == 0 or N == 0:
        raise DataError("ROC needs both classes present in the truth")
    tp = np.concatenate([[0], tp])
    fp = np.concatenate([[0], fp])
    # trapezoids in integer units, one division at the end
    twice_area = int(np.sum(np.diff(fp) * (tp[1:] + tp[:-1])))
    auc = twice_area / (2 * P * N)
    points = np.column_stack([fp / N, tp / P, np.concatenate([[np.inf], thr])])
    return RocCurve(points, auc)


def pr_curve(truth, scores) -> np.ndarray:
    """Rows of ``(recall, precision, threshold)``, one per distinct score."""
    tp, fp, thr = _sweep(truth, scores)
    P = int(tp[-1])
    if P == 0:
        raise DataError("precision-recall needs at least one fault sample")
    return np.column_stack([tp / P, tp / (tp + fp), thr])


def mean_roc(curves, grid) -> np.ndarray:
    """Vertical average of several ROC curves on a shared FPR grid.

    Where a curve has a vertical step at some FPR the upper value is used.
    """
    grid = np.asarray(grid, dtype=np.float64)
    acc = np.zeros_like(grid)
    for c in curves:
        fpr, tpr = c.fpr, c.tpr
        # rightmost point with fpr <= g, i.e. top of any vertical run
        k = np.searchsorted(fpr, grid, side="right") - 1
        nxt = np.minimum(k + 1, len(fpr) - 1)
        span = fpr[nxt] - fpr[k]
        frac = np.where(span > 0, (grid - fpr[k]) / np.where(span > 0, span, 1.0), 0.0)
        acc += tpr[k] + frac * (tpr[nxt] - tpr[k])
    return acc / len(curves)


# ---------------------------------------------------------------- files


def _num(v) -> str:
    return format(float(v), ".17g")


def write_curve_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(header + "\n")
        for r in rows:
            fh.write(",".join(_num(v) for v in r) + "\n")


def write_roc_csv(path, curve: RocCurve) -> None:
    write_curve_csv(path, "fpr,tpr,threshold", curve.points)


def write_pr_csv(path, points) -> None:
    write_curve_csv(path, "recall,precision,threshold", points)


def summary(cm: ConfusionMatrix, cost: CostMatrix | None = None, auc: float | None = None) -> dict:
    out = {}
    if auc is not None:
        out["auc"] = auc
    if cost is not None:
        out["total_cost"] = total_cost(cm, cost)
    out["f1"] = f_measure(cm, 1.0)
    out["g_mean"] = g_mean(cm) if cm.positives and cm.negatives else 0.0
    out.update(tp=cm.tp, fp=cm.fp, tn=cm.tn, fn=cm.fn)
    out["precision"] = cm.precision
    out["recall"] = cm.recall
    flags = degenerate_metrics(cm)
    if not (cm.positives and cm.negatives):
        flags.append("g_mean")
    out["degenerate"] = ";".join(flags)
    return out


def format_summary(d: dict) -> str:
    lines = []
    for k, v in d.items():
        lines.append(f"{k}={_num(v) if isinstance(v, float) else v}")
    return "\n".join(lines) + "\n"
