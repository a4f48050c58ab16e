"""Labeled KPI datasets: representation, CSV persistence, splitting, scaling.

Labels follow the network convention used throughout the package:
``0`` is a fault measurement, ``1`` is fault-free.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np

FAULT = 0
FAULT_FREE = 1

FEATURE_NAMES = (
    "retainability",
    "ho_success_rate",
    "rsrp",
    "rsrq",
    "sinr",
    "throughput",
    "distance",
)
N_FEATURES = len(FEATURE_NAMES)
CSV_HEADER = "label," + ",".join(FEATURE_NAMES)


class DataError(ValueError):
    """Invalid dataset contents or file."""


def _frozen(a, dtype):
    a = np.array(a, dtype=dtype, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Sample:
    features: tuple
    label: int

    def __post_init__(self):
        if len(self.features) != N_FEATURES:
            raise DataError(f"expected {N_FEATURES} features, got {len(self.features)}")
        if not all(math.isfinite(v) for v in self.features):
            raise DataError("features must be finite")
        if self.label not in (FAULT, FAULT_FREE):
            raise DataError(f"label must be 0 or 1, got {self.label!r}")


@dataclass(frozen=True, eq=False)
class Dataset:
    """An ordered, immutable collection of labeled KPI vectors.

    ``X`` has shape ``(n, 7)`` and ``y`` shape ``(n,)``. Both arrays are
    read-only copies of whatever was passed in.
    """

    X: np.ndarray
    y: np.ndarray
    feature_names: tuple = field(default=FEATURE_NAMES)

    def __post_init__(self):
        X = _frozen(self.X, np.float64)
        y = _frozen(self.y, np.int64)
        if X.ndim == 1 and X.size == 0:
            X = _frozen(np.empty((0, len(self.feature_names))), np.float64)
        if X.ndim != 2 or X.shape[0] != y.shape[0]:
            raise DataError(f"shape mismatch: X {X.shape}, y {y.shape}")
        if X.shape[1] != len(self.feature_names):
            raise DataError(f"expected {len(self.feature_names)} features, got {X.shape[1]}")
        if not np.all(np.isfinite(X)):
            raise DataError("features must be finite")
        if y.size and not np.all((y == FAULT) | (y == FAULT_FREE)):
            raise DataError("labels must be 0 or 1")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "feature_names", tuple(self.feature_names))

    @classmethod
    def from_samples(cls, samples) -> "Dataset":
        samples = list(samples)
        X = np.array([s.features for s in samples], dtype=np.float64).reshape(len(samples), N_FEATURES)
        y = np.array([s.label for s in samples], dtype=np.int64)
        return cls(X, y)

    def __len__(self):
        return self.y.shape[0]

    def __getitem__(self, i) -> Sample:
        return Sample(tuple(float(v) for v in self.X[i]), int(self.y[i]))

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            self.feature_names == other.feature_names
            and np.array_equal(self.X, other.X)
            and np.array_equal(self.y, other.y)
        )

    def count(self, label: int) -> int:
        return int(np.count_nonzero(self.y == label))

    @property
    def minority_label(self) -> int:
        # fault wins ties so balanced sets still have a well-defined target class
        return FAULT if self.count(FAULT) <= self.count(FAULT_FREE) else FAULT_FREE

    @property
    def majority_label(self) -> int:
        return 1 - self.minority_label

    @property
    def imbalance_ratio(self) -> float:
        lo, hi = sorted((self.count(FAULT), self.count(FAULT_FREE)))
        if hi == 0:
            raise DataError("empty dataset has no imbalance ratio")
        return lo / hi

    def subset(self, idx) -> "Dataset":
        idx = np.asarray(idx, dtype=np.int64)
        return Dataset(self.X[idx], self.y[idx], self.feature_names)

    def with_features(self, X) -> "Dataset":
        return Dataset(X, self.y, self.feature_names)


def concat(*parts: Dataset) -> Dataset:
    return Dataset(
        np.vstack([p.X for p in parts]),
        np.concatenate([p.y for p in parts]),
        parts[0].feature_names,
    )


# ---------------------------------------------------------------- CSV


def _fmt(v: float) -> str:
    return format(v, ".17g")


def load_csv(path) -> Dataset:
    if not os.path.exists(path):
        raise FileNotFoundError(f"dataset not found: {path}")
    with open(path, newline="") as fh:
        lines = fh.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0].rstrip("\r") != CSV_HEADER:
        raise DataError(f"{path}: malformed header, expected {CSV_HEADER!r}")

    X = np.empty((len(lines) - 1, N_FEATURES))
    y = np.empty(len(lines) - 1, dtype=np.int64)
    # rows are numbered as in the file: header is row 1
    for k, line in enumerate(lines[1:]):
        row = k + 2
        fields = line.rstrip("\r").split(",")
        if len(fields) != N_FEATURES + 1:
            raise DataError(f"row {row}: expected {N_FEATURES + 1} fields, got {len(fields)}")
        if fields[0] not in ("0", "1"):
            raise DataError(f"row {row}: label must be 0 or 1, got {fields[0]!r}")
        y[k] = int(fields[0])
        for c, text in enumerate(fields[1:]):
            try:
                v = float(text)
            except ValueError:
                raise DataError(f"row {row}: non-numeric value {text!r} in column {FEATURE_NAMES[c]}") from None
            if not math.isfinite(v):
                raise DataError(f"row {row}: non-finite value {text!r} in column {FEATURE_NAMES[c]}")
            X[k, c] = v
    return Dataset(X, y)


def save_csv(dataset: Dataset, path) -> None:
    if len(dataset) == 0:
        raise DataError("refusing to write an empty dataset")
    rows = [CSV_HEADER]
    for x, label in zip(dataset.X, dataset.y):
        rows.append(str(int(label)) + "," + ",".join(_fmt(v) for v in x))
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(rows) + "\n")


# ---------------------------------------------------------------- splitting


def stratified_split(dataset: Dataset, test_fraction: float = 0.2, seed: int = 0):
    """Split per class: shuffle each class with ``seed``, send the first
    ``round(test_fraction * n_class)`` members to the test partition.

    Returns ``(train, test)``; both keep the original relative order.
    """
    if not 0.0 < test_fraction < 1.0:
        raise ValueError("test_fraction must lie in (0, 1)")
    rng = np.random.default_rng(seed)
    test_mask = np.zeros(len(dataset), dtype=bool)
    for label in (FAULT, FAULT_FREE):
        members = np.flatnonzero(dataset.y == label)
        if members.size < 2:
            raise DataError(f"class {label} has {members.size} samples; need at least 2 to split")
        n_test = int(round(test_fraction * members.size))
        test_mask[rng.permutation(members)[:n_test]] = True
    return dataset.subset(np.flatnonzero(~test_mask)), dataset.subset(np.flatnonzero(test_mask))


# ---------------------------------------------------------------- scaling


@dataclass(frozen=True, eq=False)
class Scaler:
    mean: np.ndarray
    std: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mean", _frozen(self.mean, np.float64))
        object.__setattr__(self, "std", _frozen(self.std, np.float64))
        if np.any(self.std <= 0):
            raise DataError("scaler deviations must be positive")

    def transform(self, X) -> np.ndarray:
        return (np.asarray(X, dtype=np.float64) - self.mean) / self.std

    def inverse(self, Z) -> np.ndarray:
        return np.asarray(Z, dtype=np.float64) * self.std + self.mean

    def to_dict(self) -> dict:
        return {"mean": self.mean.tolist(), "std": self.std.tolist()}

    @classmethod
    def from_dict(cls, d) -> "Scaler":
        return cls(np.array(d["mean"]), np.array(d["std"]))


def fit_scaler(train: Dataset) -> Scaler:
    if len(train) == 0:
        raise DataError("cannot fit a scaler on an empty dataset")
    X = train.X
    exact = np.ptp(X, axis=0) == 0
    # exact constants map to exact zeros
    mean = np.where(exact, X[0], X.mean(axis=0))
    std = X.std(axis=0)
    # spread at rounding level counts as constant too
    constant = exact | (std <= 1e-12 * np.maximum(1.0, np.abs(mean)))
    std = np.where(constant, 1.0, std)
    return Scaler(mean, std)


def apply_scaler(scaler: Scaler, dataset: Dataset) -> Dataset:
    return dataset.with_features(scaler.transform(dataset.X))
