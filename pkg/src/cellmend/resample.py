"""Rebalancing of two-class datasets.

Random over/undersampling, their combination, and SMOTE. Every resampler
returns a new :class:`~cellmend.dataio.Dataset` whose original rows come
first (in input order) followed by any added rows; the class that is not
being resampled is carried over untouched.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .dataio import DataError, Dataset, concat

SMOTE_MODES = ("paper", "canonical")


@dataclass(frozen=True)
class ResampleConfig:
    """Resampling knobs.

    ``target_ratio`` is the desired minority/majority count ratio. ``mode``
    picks the SMOTE direction: ``paper`` extrapolates away from the chosen
    neighbour (``x_i + u * (x_i - x_j)``), ``canonical`` interpolates towards
    it (``x_i + u * (x_j - x_i)``).
    """

    target_ratio: float = 1.0
    k: int = 5
    mode: str = "paper"
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.target_ratio <= 1.0:
            raise ValueError(f"target_ratio must lie in (0, 1], got {self.target_ratio}")
        if int(self.k) < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.mode not in SMOTE_MODES:
            raise ValueError(f"mode must be one of {SMOTE_MODES}, got {self.mode!r}")


def _classes(dataset: Dataset):
    n0, n1 = dataset.count(0), dataset.count(1)
    if n0 == 0 or n1 == 0:
        raise DataError("both classes must be present to resample")
    return dataset.minority_label, dataset.majority_label


def _exact(ratio: float) -> Fraction:
    # shortest decimal repr, so 0.29 means 29/100 and not the binary value just below it
    return Fraction(repr(float(ratio)))


def oversample_target(n_majority: int, ratio: float) -> int:
    """floor(ratio * n_majority), computed exactly."""
    return math.floor(_exact(ratio) * n_majority)


def undersample_target(n_minority: int, ratio: float) -> int:
    """floor(n_minority / ratio), computed exactly."""
    return math.floor(n_minority / _exact(ratio))


def _duplicate(dataset, label, n_target, rng):
    members = np.flatnonzero(dataset.y == label)
    extra = n_target - members.size
    if extra <= 0:
        return dataset
    picks = members[rng.integers(0, members.size, size=extra)]
    return concat(dataset, dataset.subset(picks))


def _thin(dataset, label, n_target, rng):
    members = np.flatnonzero(dataset.y == label)
    if members.size <= n_target:
        return dataset
    keep = np.sort(rng.choice(members, size=n_target, replace=False))
    others = np.flatnonzero(dataset.y != label)
    return dataset.subset(np.sort(np.concatenate([others, keep])))


def random_oversample(dataset: Dataset, config: ResampleConfig = ResampleConfig()) -> Dataset:
    minority, majority = _classes(dataset)
    target = oversample_target(dataset.count(majority), config.target_ratio)
    return _duplicate(dataset, minority, target, np.random.default_rng(config.seed))


def random_undersample(dataset: Dataset, config: ResampleConfig = ResampleConfig()) -> Dataset:
    minority, majority = _classes(dataset)
    target = undersample_target(dataset.count(minority), config.target_ratio)
    if target < 1:
        raise DataError("undersampling target is empty")
    return _thin(dataset, majority, target, np.random.default_rng(config.seed))


def combined_target(n_minority: int, n_majority: int, midpoint: float) -> int:
    return int(round(n_majority * (n_minority / n_majority) ** midpoint))


def combined_resample(dataset: Dataset, config: ResampleConfig = ResampleConfig(),
                      midpoint: float = 0.5) -> Dataset:
    """Undersample the majority to ``round(maj * (min/maj) ** midpoint)``,
    then oversample the minority up to that same count.

    ``midpoint`` 0 reproduces pure oversampling counts and 1 pure
    undersampling counts. The result is always balanced; ``target_ratio`` is
    not used here.
    """
    if not 0.0 <= midpoint <= 1.0:
        raise ValueError("midpoint must lie in [0, 1]")
    minority, majority = _classes(dataset)
    m = combined_target(dataset.count(minority), dataset.count(majority), midpoint)
    rng = np.random.default_rng(config.seed)
    thinned = _thin(dataset, majority, m, rng)
    return _duplicate(thinned, minority, m, rng)


# ---------------------------------------------------------------- SMOTE


@dataclass(frozen=True, eq=False)
class NeighborTable:
    """k nearest minority neighbours of every minority sample.

    ``members[r]`` is the dataset row of the r-th minority sample and
    ``neighbors[r]`` lists minority-local positions (indices into
    ``members``) ordered by distance, ties going to the lower index.
    """

    members: np.ndarray
    neighbors: np.ndarray

    def __len__(self):
        return self.members.size


def _sq_dists(A, B):
    # explicit differences keep ties exact, unlike the |a|^2 - 2ab + |b|^2 expansion
    out = np.empty((A.shape[0], B.shape[0]))
    for start in range(0, A.shape[0], 256):
        block = A[start:start + 256, None, :] - B[None, :, :]
        out[start:start + 256] = np.einsum("ijk,ijk->ij", block, block)
    return out


def knn_minority(dataset: Dataset, k: int) -> NeighborTable:
    if k < 1:
        raise ValueError("k must be >= 1")
    minority, _ = _classes(dataset)
    members = np.flatnonzero(dataset.y == minority)
    m = members.size
    if m < 2:
        raise DataError(f"need at least 2 minority samples for neighbour search, got {m}")
    pts = dataset.X[members]
    d = _sq_dists(pts, pts)
    np.fill_diagonal(d, np.inf)
    order = np.argsort(d, axis=1, kind="stable")[:, : min(k, m - 1)]
    return NeighborTable(members, order)


@dataclass(frozen=True, eq=False)
class SynthesisLog:
    """Provenance of each synthetic row: base row ``i``, neighbour row ``j``
    (both dataset row numbers in the input) and coefficient ``u``."""

    i: np.ndarray
    j: np.ndarray
    u: np.ndarray

    def __len__(self):
        return self.u.size


def _open_unit(rng, n):
    u = rng.random(n)
    while True:
        zero = u == 0.0
        if not zero.any():
            return u
        u[zero] = rng.random(int(zero.sum()))


def smote_with_log(dataset: Dataset, config: ResampleConfig = ResampleConfig()):
    """SMOTE oversampling; returns ``(resampled, log)``.

    Adds ``floor(ratio * n_majority) - n_minority`` synthetic minority rows
    after the originals.
    """
    minority, majority = _classes(dataset)
    table = knn_minority(dataset, config.k)
    n_new = oversample_target(dataset.count(majority), config.target_ratio) - len(table)
    if n_new <= 0:
        empty = np.empty(0, dtype=np.int64)
        return dataset, SynthesisLog(empty, empty, np.empty(0))

    rng = np.random.default_rng(config.seed)
    base = rng.integers(0, len(table), size=n_new)
    col = rng.integers(0, table.neighbors.shape[1], size=n_new)
    u = _open_unit(rng, n_new)
    nbr = table.neighbors[base, col]

    xi = dataset.X[table.members[base]]
    xj = dataset.X[table.members[nbr]]
    if config.mode == "paper":
        xn = xi + u[:, None] * (xi - xj)
    else:
        xn = xi + u[:, None] * (xj - xi)

    synth = Dataset(xn, np.full(n_new, minority, dtype=np.int64), dataset.feature_names)
    log = SynthesisLog(table.members[base], table.members[nbr], u)
    return concat(dataset, synth), log


def smote(dataset: Dataset, config: ResampleConfig = ResampleConfig()) -> Dataset:
    return smote_with_log(dataset, config)[0]


METHODS = {
    "over": random_oversample,
    "under": random_undersample,
    "combined": combined_resample,
    "smote": smote,
}


def resample(dataset: Dataset, method: str, config: ResampleConfig = ResampleConfig()) -> Dataset:
    try:
        fn = METHODS[method]
    except KeyError:
        raise ValueError(f"unknown resampling method {method!r}") from None
    return fn(dataset, config)
