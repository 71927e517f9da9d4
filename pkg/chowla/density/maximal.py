"""Discrete Hardy-Littlewood maximal operator on sequences supported in [-N, N]."""

import logging
import math
from dataclasses import dataclass

import numpy as np

from chowla.errors import ParameterError
from chowla.workers import map_ordered

logger = logging.getLogger(__name__)

NORMALIZATIONS = ("radius", "centered")

# Rows of the (position x radius) table built per chunk
_CHUNK = 256


@dataclass
class MaximalReport:
    N: int
    normalization: str
    maximal: np.ndarray
    left: float
    right: float

    @property
    def ratio(self) -> float:
        return self.left / self.right if self.right > 0 else 0.0

    def to_dict(self, *, include_sequence: bool = False) -> dict:
        d = {
            "N": self.N,
            "normalization": self.normalization,
            "left": self.left,
            "right": self.right,
            "ratio": self.ratio,
        }
        if include_sequence:
            d["maximal"] = self.maximal.tolist()
        return d


def maximal_function(values: np.ndarray, normalization: str = "radius") -> np.ndarray:
    """M(n) for every n in [-N, N] (index n + N), radii r = 1..2N.

    ``radius``: M(n) = sup_r (1/r) sum_{|n-m|<=r} a_m.
    ``centered``: the same with 1/(2r+1).
    Beyond r = 2N the window already holds the whole support, so larger
    radii only shrink the average.
    """
    if normalization not in NORMALIZATIONS:
        raise ParameterError(f"normalization must be one of {NORMALIZATIONS}")
    a = np.asarray(values, dtype=np.float64)
    size = a.size
    if size % 2 != 1:
        raise ParameterError("values must have odd length 2N + 1")
    if np.any(a < 0):
        raise ParameterError("values must be nonnegative")

    prefix = np.concatenate([[0.0], np.cumsum(a)])
    radii = np.arange(1, max(size - 1, 1) + 1, dtype=np.int64)
    scale = radii if normalization == "radius" else 2 * radii + 1
    out = np.empty(size, dtype=np.float64)
    for start in range(0, size, _CHUNK):
        pos = np.arange(start, min(start + _CHUNK, size), dtype=np.int64)[:, None]
        lo = np.clip(pos - radii, 0, size)
        hi = np.clip(pos + radii + 1, 0, size)
        sums = prefix[hi] - prefix[lo]
        out[start : start + pos.shape[0]] = np.max(sums / scale, axis=1)
    return out


def hl_maximal(values, normalization: str = "radius") -> MaximalReport:
    """Maximal sequence plus the two sides of the L¹-L² comparison.

    left = (1/N) sum_n M(n), right = sqrt((1/N) sum_n a_n²), both over [-N, N].
    """
    a = np.asarray(values, dtype=np.float64)
    N = (a.size - 1) // 2
    if N < 1:
        raise ParameterError("need N >= 1")
    if not np.any(a):
        return MaximalReport(N, normalization, np.zeros_like(a), 0.0, 0.0)
    M = maximal_function(a, normalization)
    left = math.fsum(M) / N
    right = math.sqrt(math.fsum(a * a) / N)
    return MaximalReport(N, normalization, M, left, right)


def maximal_pilot(
    N: int = 512,
    trials: int = 1000,
    seed: int = 0,
    *,
    normalization: str = "radius",
    workers: int = 1,
) -> dict:
    """Ratios for random 0/1 sequences on [-N, N]; the bound is 1.25 x the worst ratio."""
    seeds = np.random.SeedSequence(seed).spawn(trials)

    def one(ss: np.random.SeedSequence) -> float:
        rng = np.random.Generator(np.random.Philox(ss))
        return hl_maximal(rng.integers(0, 2, size=2 * N + 1), normalization).ratio

    ratios = map_ordered(one, seeds, workers)
    worst = max(ratios)
    logger.info("Maximal pilot N=%d over %d sequences: worst ratio %.4f", N, trials, worst)
    return {
        "N": N,
        "trials": trials,
        "seed": seed,
        "normalization": normalization,
        "mean_ratio": float(np.mean(ratios)),
        "max_ratio": worst,
        "bound": 1.25 * worst,
    }
