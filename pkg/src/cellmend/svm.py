"""Linear soft-margin SVM with class-dependent misclassification costs.

Fault samples (label 0) are the positive class. Training minimises

    1/2 |w|^2 + C * sum_i cost(y_i) * slack_i

where ``cost`` is ``c01`` for faults (missing a fault) and ``c10`` for
fault-free samples (false alarm). With ``c01 == c10 == 1`` this is the
ordinary soft-margin SVM.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from ._ipm import ipm_dual, snap
from ._smo import smo
from .dataio import FAULT, DataError, Dataset, Sample, Scaler


class ConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class CostMatrix:
    """``cij`` is the cost of predicting class j for a true class-i sample."""

    c00: float = 0.0
    c01: float = 1.0
    c10: float = 1.0
    c11: float = 0.0

    def __post_init__(self):
        for name in ("c00", "c01", "c10", "c11"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise ValueError(f"{name} must be a finite nonnegative number, got {v}")

    @classmethod
    def from_ratio(cls, ratio: float) -> "CostMatrix":
        """Zero diagonal, unit false-alarm cost, missed-fault cost ``ratio``."""
        return cls(c01=float(ratio), c10=1.0)

    @property
    def cost_ratio(self) -> float:
        if self.c10 <= 0:
            raise ValueError("cost ratio undefined when c10 == 0")
        return self.c01 / self.c10


@dataclass(frozen=True)
class SvmHyperparams:
    C: float = 1.0
    tol: float = 1e-6
    max_iterations: int = 10_000_000
    cost: CostMatrix = field(default_factory=CostMatrix)
    # start SMO from an interior-point estimate instead of alpha = 0
    warm_start: bool = True

    def __post_init__(self):
        if not self.C > 0:
            raise ValueError("C must be positive")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if int(self.max_iterations) < 1:
            raise ValueError("max_iterations must be positive")


@dataclass(frozen=True, eq=False)
class SvmModel:
    weights: np.ndarray
    bias: float
    positive_class: int = FAULT
    hyperparams: SvmHyperparams = field(default_factory=SvmHyperparams)
    scaler: Scaler | None = None
    # objective, dual_objective, duality_gap, kkt_violation, iterations, n_support
    meta: dict = field(default_factory=dict)
    objective_history: tuple = ()

    def __post_init__(self):
        w = np.array(self.weights, dtype=np.float64)
        w.setflags(write=False)
        if not np.all(np.isfinite(w)) or not math.isfinite(self.bias):
            raise ValueError("model parameters must be finite")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "bias", float(self.bias))

    def scores(self, X) -> np.ndarray:
        return np.asarray(X, dtype=np.float64) @ self.weights + self.bias

    # ------------------------------------------------------------ persistence

    def to_dict(self) -> dict:
        return {
            "weights": self.weights.tolist(),
            "bias": self.bias,
            "positive_class": self.positive_class,
            "hyperparams": asdict(self.hyperparams),
            "scaler": self.scaler.to_dict() if self.scaler is not None else None,
            "meta": self.meta,
        }

    @classmethod
    def from_dict(cls, d) -> "SvmModel":
        hp = dict(d["hyperparams"])
        hp["cost"] = CostMatrix(**hp["cost"])
        scaler = Scaler.from_dict(d["scaler"]) if d.get("scaler") else None
        return cls(np.array(d["weights"]), d["bias"], d["positive_class"],
                   SvmHyperparams(**hp), scaler, dict(d.get("meta", {})))

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "SvmModel":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def _bias(y, alpha, ub, G):
    # average y_i * grad_i over free vectors; midpoint of the feasible range otherwise
    yg = y * G
    at_ub = alpha >= ub
    at_lb = alpha <= 0
    free = ~(at_ub | at_lb)
    if free.any():
        rho = yg[free].mean()
    else:
        upper = (at_ub & (y < 0)) | (at_lb & (y > 0))
        lower = (at_ub & (y > 0)) | (at_lb & (y < 0))
        hi = yg[upper].min() if upper.any() else np.inf
        lo = yg[lower].max() if lower.any() else -np.inf
        rho = 0.5 * (hi + lo) if np.isfinite(hi) and np.isfinite(lo) else (hi if np.isfinite(hi) else lo)
    return -float(rho)


def train_svm(train: Dataset, hp: SvmHyperparams = SvmHyperparams(), scaler: Scaler | None = None) -> SvmModel:
    """Fit the cost-weighted linear SVM by SMO.

    Features are used as given; standardise them first. ``scaler`` is only
    recorded on the model so it can be persisted alongside the weights.
    Unless ``hp.warm_start`` is off, SMO starts from a rounded
    interior-point solution of the dual, which cuts the number of pair
    updates by orders of magnitude on overlapping classes. Raises
    :class:`ConvergenceError` when the KKT violation is still above
    ``hp.tol`` after ``hp.max_iterations`` pair updates.
    """
    if train.count(0) == 0 or train.count(1) == 0:
        raise DataError("training data must contain both classes")
    cost = hp.cost
    if cost.c01 <= 0 or cost.c10 <= 0:
        raise ValueError("off-diagonal costs must be positive to train")

    X = np.ascontiguousarray(train.X, dtype=np.float64)
    y = np.where(train.y == FAULT, 1.0, -1.0)
    ub = hp.C * np.where(y > 0, cost.c01, cost.c10)
    n = len(y)

    alpha0 = snap(ipm_dual(X, y, ub), y, ub) if hp.warm_start else np.zeros(n)
    alpha, w, iters, viol, hist = smo(X, y, ub, alpha0, float(hp.tol), int(hp.max_iterations), max(n, 1), True)
    if viol > hp.tol:
        raise ConvergenceError(
            f"SMO stopped after {iters} iterations with KKT violation {viol:.3e} > tol {hp.tol:.1e}"
        )

    G = y * (X @ w) - 1.0
    b = _bias(y, alpha, ub, G)
    margins = y * (X @ w + b)
    half_norm = 0.5 * float(w @ w)
    primal = half_norm + float(ub @ np.maximum(0.0, 1.0 - margins))
    dual = float(alpha.sum()) - half_norm
    meta = {
        "objective": primal,
        "dual_objective": dual,
        "duality_gap": primal - dual,
        "kkt_violation": float(viol),
        "iterations": int(iters),
        "n_support": int(np.count_nonzero(alpha > 0)),
    }
    # history holds 1/2 a'Qa - sum(a), sampled every n pair updates; nonincreasing
    return SvmModel(w, b, FAULT, hp, scaler, meta, tuple(float(v) for v in hist))


def _features(x):
    if isinstance(x, Sample):
        return np.asarray(x.features, dtype=np.float64)
    if isinstance(x, Dataset):
        return x.X
    return np.asarray(x, dtype=np.float64)


def decision_score(model: SvmModel, sample):
    """``w . x + b``; larger means more fault-like.

    Accepts a :class:`Sample`, a feature vector, a 2-D array or a
    :class:`Dataset` (the last two give one score per row).
    """
    s = model.scores(_features(sample))
    return float(s) if np.ndim(s) == 0 else s


def predict(model: SvmModel, sample, threshold: float = 0.0):
    """Label 0 (fault) where the score reaches ``threshold``, else 1."""
    s = np.asarray(decision_score(model, sample))
    labels = np.where(s >= threshold, FAULT, 1 - FAULT)
    return int(labels) if labels.ndim == 0 else labels
