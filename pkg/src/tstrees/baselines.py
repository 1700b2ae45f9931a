"""Comparison methods: statistical feature flattening for static trees and
the three distance-based nearest-neighbour classifiers (independent
Euclidean, independent DTW, dependent DTW)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import Instance, TemporalDataset

#: Distance names accepted by :func:`nn_classify` and the CLI.
DISTANCE_METRICS = ("ed-i", "dtw-i", "dtw-d")


@dataclass(frozen=True)
class FeatureMask:
    """Which per-channel statistics to extract, in (mean, standard deviation,
    skewness, kurtosis) order."""

    mean: bool
    std: bool
    skewness: bool
    kurtosis: bool

    def __post_init__(self) -> None:
        if not (self.mean or self.std or self.skewness or self.kurtosis):
            raise ValueError("a feature mask needs at least one bit set")

    @classmethod
    def from_bits(cls, bits: str) -> "FeatureMask":
        cleaned = bits.replace(",", "")
        if len(cleaned) != 4 or any(b not in "01" for b in cleaned):
            raise ValueError(f"feature mask must be four 0/1 bits, got {bits!r}")
        return cls(*(b == "1" for b in cleaned))

    def bits(self) -> str:
        return "".join("1" if b else "0" for b in (self.mean, self.std, self.skewness, self.kurtosis))

    def names(self) -> list[str]:
        return [
            name
            for name, used in zip(("mean", "std", "skew", "kurt"), (self.mean, self.std, self.skewness, self.kurtosis))
            if used
        ]


def _channel_stats(values: np.ndarray, mask: FeatureMask) -> list[float]:
    n = values.shape[0]
    mean = float(values.sum() / n)
    centered = values - mean
    m2 = float((centered**2).sum() / n)
    std = math.sqrt(m2)
    out: list[float] = []
    if mask.mean:
        out.append(mean)
    if mask.std:
        out.append(std)
    if mask.skewness:
        # population skewness; 0 by convention on constant channels
        out.append(float((centered**3).sum() / n) / std**3 if std > 0 else 0.0)
    if mask.kurtosis:
        out.append(float((centered**4).sum() / n) / std**4 if std > 0 else 0.0)
    return out


def extract_features(instance: Instance, mask: FeatureMask) -> np.ndarray:
    """Flatten an instance to per-channel population statistics, channel by
    channel in mask order."""
    feats: list[float] = []
    for ch in range(instance.channel_count):
        feats.extend(_channel_stats(instance.channels[ch], mask))
    return np.array(feats, dtype=np.float64)


def feature_table(dataset: TemporalDataset, mask: FeatureMask) -> tuple[np.ndarray, list[str]]:
    """Feature matrix for a whole dataset plus generated column names."""
    rows = [extract_features(inst, mask) for inst in dataset.instances]
    names = [
        f"{attr}_{stat}" for attr in dataset.attribute_names for stat in mask.names()
    ]
    return np.stack(rows), names


def _check_dims(a: Instance, b: Instance) -> None:
    if a.channels.shape != b.channels.shape:
        raise ValueError(
            f"instances have mismatched shapes {a.channels.shape} vs {b.channels.shape}"
        )


def euclidean_i(a: Instance, b: Instance) -> float:
    """Independent Euclidean distance: the per-channel pointwise Euclidean
    distances, summed over channels."""
    _check_dims(a, b)
    diff = a.channels - b.channels
    return float(np.sqrt((diff**2).sum(axis=1)).sum())


def dtw(a: Sequence[float] | np.ndarray, b: Sequence[float] | np.ndarray) -> float:
    """Unconstrained dynamic time warping with squared-difference local cost.

    Full window, no normalization; the returned value is the accumulated cost
    of the optimal warping path.
    """
    sa = np.asarray(a, dtype=np.float64)
    sb = np.asarray(b, dtype=np.float64)
    if sa.size == 0 or sb.size == 0:
        raise ValueError("dtw requires non-empty sequences")
    cost = (sa[:, None] - sb[None, :]) ** 2
    return _dtw_on_cost(cost.tolist())


def _dtw_on_cost(cost: list[list[float]]) -> float:
    n = len(cost)
    m = len(cost[0])
    inf = math.inf
    prev = [inf] * (m + 1)
    prev[0] = 0.0
    for i in range(1, n + 1):
        row = cost[i - 1]
        cur = [inf] * (m + 1)
        for j in range(1, m + 1):
            best = prev[j]
            if cur[j - 1] < best:
                best = cur[j - 1]
            if prev[j - 1] < best:
                best = prev[j - 1]
            cur[j] = row[j - 1] + best
        prev = cur
    return prev[m]


def dtw_i(a: Instance, b: Instance) -> float:
    """Independent DTW: one warp per channel, distances summed."""
    _check_dims(a, b)
    return sum(dtw(a.channels[ch], b.channels[ch]) for ch in range(a.channel_count))


def dtw_d(a: Instance, b: Instance) -> float:
    """Dependent DTW: a single warp where the local cost at (i, j) is the
    squared Euclidean distance between the column vectors at times i and j."""
    _check_dims(a, b)
    diff = a.channels[:, :, None] - b.channels[:, None, :]
    cost = (diff**2).sum(axis=0)
    return _dtw_on_cost(cost.tolist())


_METRIC_FUNCS = {"ed-i": euclidean_i, "dtw-i": dtw_i, "dtw-d": dtw_d}


def nn_classify(train: TemporalDataset, query: Instance, metric: str) -> int:
    """1-nearest-neighbour class of ``query``; ties go to the lowest training
    index."""
    if not train.instances:
        raise ValueError("nearest neighbour needs a non-empty training set")
    try:
        func = _METRIC_FUNCS[metric]
    except KeyError:
        raise ValueError(f"unknown metric {metric!r}; expected one of {DISTANCE_METRICS}")
    best_idx = 0
    best_dist = func(train.instances[0], query)
    for idx in range(1, len(train.instances)):
        d = func(train.instances[idx], query)
        if d < best_dist:
            best_dist = d
            best_idx = idx
    return train.instances[best_idx].class_index
