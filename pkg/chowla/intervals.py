"""Short-interval sums of λ and μ, optionally twisted by a real character.

Sums run over h consecutive integers, S(n) = f(n) + ... + f(n+h-1), and are
normalised by h. All sums are exact int64; the distribution of |S| is kept
as a histogram over 0..h, so profiles over disjoint windows merge exactly.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from chowla.errors import ParameterError
from chowla.sieve.segment import DEFAULT_BLOCK, plan_blocks, sieve_range
from chowla.workers import map_ordered

logger = logging.getLogger(__name__)

TWIST_KINDS = ("none", "chi3", "chi_eps")
FUNCTIONS = ("lambda", "mu")
QUANTILES = (50, 90, 99)
EPS_GRID = (0.05, 0.1, 0.2)

_CHI3 = np.array([0, 1, -1], dtype=np.int8)


@dataclass(frozen=True)
class TwistSpec:
    kind: str = "none"
    eps: int = 1

    def __post_init__(self):
        if self.kind not in TWIST_KINDS:
            raise ParameterError(f"twist must be one of {TWIST_KINDS}, got {self.kind!r}")
        if self.eps not in (-1, 1):
            raise ParameterError(f"eps must be +1 or -1, got {self.eps}")

    def __str__(self) -> str:
        if self.kind == "chi_eps":
            return f"chi_eps({self.eps:+d})"
        return self.kind


def twist_value(n: int, twist: TwistSpec) -> int:
    """χ(n) for the chosen twist: 1, χ₃(n), or (-eps)^v₂(n)."""
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    if twist.kind == "none":
        return 1
    if twist.kind == "chi3":
        return int(_CHI3[n % 3])
    v2 = (n & -n).bit_length() - 1
    return (-twist.eps) ** v2


def twist_values(n: np.ndarray, twist: TwistSpec) -> np.ndarray:
    """Vectorised twist_value over an int64 array of n >= 1."""
    if twist.kind == "none":
        return np.ones(n.shape, dtype=np.int8)
    if twist.kind == "chi3":
        return _CHI3[n % 3]
    if twist.eps == -1:
        return np.ones(n.shape, dtype=np.int8)
    v2 = np.log2((n & -n).astype(np.float64)).astype(np.int64)
    return np.where(v2 % 2 == 0, 1, -1).astype(np.int8)


def twisted_values(start: int, length: int, fn: str, twist: TwistSpec) -> np.ndarray:
    """f(n)·χ(n) for n in [start, start + length) as int8."""
    if fn not in FUNCTIONS:
        raise ParameterError(f"function must be one of {FUNCTIONS}, got {fn!r}")
    seg = sieve_range(start, length)
    base = seg.lambda_values() if fn == "lambda" else seg.mu_values()
    if twist.kind == "none":
        return base
    n = np.arange(start, start + length, dtype=np.int64)
    return (base * twist_values(n, twist)).astype(np.int8)


def sliding_sums(values: np.ndarray, h: int) -> np.ndarray:
    """S[i] = values[i] + ... + values[i+h-1], exactly, for every full window."""
    if h < 1:
        raise ParameterError(f"h must be >= 1, got {h}")
    csum = np.concatenate([[0], np.cumsum(values, dtype=np.int64)])
    return csum[h:] - csum[:-h]


@dataclass
class DiscrepancyProfile:
    function: str
    twist: str
    h: int
    window: tuple[int, int]
    histogram: np.ndarray
    quantile_levels: tuple[int, ...] = QUANTILES
    eps_grid: tuple[float, ...] = EPS_GRID

    @property
    def count(self) -> int:
        return int(self.histogram.sum())

    @property
    def mean_abs(self) -> float:
        weighted = int(np.dot(np.arange(self.h + 1, dtype=np.int64), self.histogram))
        return float(Fraction(weighted, self.h * self.count))

    def quantile(self, q: float) -> float:
        """Smallest |S|/h with at least q percent of windows at or below it."""
        need = Fraction(q) / 100 * self.count
        cumulative = np.cumsum(self.histogram)
        idx = int(np.searchsorted(cumulative, float(need), side="left"))
        while idx > 0 and cumulative[idx - 1] >= need:
            idx -= 1
        while cumulative[idx] < need:
            idx += 1
        return idx / self.h

    @property
    def quantiles(self) -> dict[int, float]:
        return {q: self.quantile(q) for q in self.quantile_levels}

    def exceed_fraction(self, eps: float) -> float:
        """Fraction of windows with |S|/h > eps."""
        threshold = Fraction(str(eps)) * self.h
        first = int(threshold) + 1
        above = int(self.histogram[first:].sum()) if first <= self.h else 0
        return above / self.count

    @property
    def exceed(self) -> dict[float, float]:
        return {eps: self.exceed_fraction(eps) for eps in self.eps_grid}

    def merge(self, other: "DiscrepancyProfile") -> "DiscrepancyProfile":
        """Combine with a profile over the adjacent window."""
        if (self.function, self.twist, self.h) != (other.function, other.twist, other.h):
            raise ParameterError("profiles differ in function, twist or h")
        if other.window[0] != self.window[1] + 1:
            raise ParameterError("profiles must cover adjacent windows")
        return DiscrepancyProfile(
            self.function,
            self.twist,
            self.h,
            (self.window[0], other.window[1]),
            self.histogram + other.histogram,
            self.quantile_levels,
            self.eps_grid,
        )

    def to_dict(self) -> dict:
        return {
            "function": self.function,
            "twist": self.twist,
            "h": self.h,
            "window": list(self.window),
            "mean_abs": self.mean_abs,
            "quantiles": {str(q): v for q, v in self.quantiles.items()},
            "exceed": {str(e): v for e, v in self.exceed.items()},
        }


def interval_profile(
    fn: str,
    h: int,
    window: tuple[int, int],
    twist: TwistSpec | None = None,
    *,
    quantiles: tuple[int, ...] = QUANTILES,
    eps_grid: tuple[float, ...] = EPS_GRID,
    block: int = DEFAULT_BLOCK,
    workers: int = 1,
) -> DiscrepancyProfile:
    """Exact profile of |S(n)|/h over every n in the window."""
    twist = twist or TwistSpec()
    if h < 1:
        raise ParameterError(f"h must be >= 1, got {h}")
    lo, hi = window
    if lo < 1:
        raise ParameterError(f"window must start at n >= 1, got {lo}")
    if hi - lo + 1 < h:
        raise ParameterError(f"window [{lo}, {hi}] narrower than h = {h}")
    if fn not in FUNCTIONS:
        raise ParameterError(f"function must be one of {FUNCTIONS}, got {fn!r}")

    def work(b: tuple[int, int]) -> np.ndarray:
        s, n = b
        sums = sliding_sums(twisted_values(s, n + h - 1, fn, twist), h)
        return np.bincount(np.abs(sums), minlength=h + 1)

    histogram = np.zeros(h + 1, dtype=np.int64)
    for part in map_ordered(work, plan_blocks(lo, hi - lo + 1, block), workers):
        histogram += part
    profile = DiscrepancyProfile(fn, str(twist), h, (lo, hi), histogram, tuple(quantiles), tuple(eps_grid))
    logger.info(
        "Interval profile %s·%s h=%d over [%d, %d]: mean_abs %.5f",
        fn, twist, h, lo, hi, profile.mean_abs,
    )
    return profile


def chi3_endgame(k: int, N: int, fn: str = "lambda", **kwargs) -> dict:
    """Mean over n <= N of |sum_{j=0}^{3k} f(n+j)χ₃(n+j)|, against the value 2k."""
    if k < 1:
        raise ParameterError(f"k must be >= 1, got {k}")
    h = 3 * k + 1
    profile = interval_profile(fn, h, (1, N), TwistSpec("chi3"), **kwargs)
    mean_sum = profile.mean_abs * h
    return {
        "function": fn,
        "k": k,
        "N": N,
        "mean_abs_sum": mean_sum,
        "scenario": 2 * k,
        "ratio": mean_sum / (2 * k),
    }


@dataclass
class Coincidence:
    lo: int
    N: int
    eps: int
    pairs: int = 0
    coincidences: int = 0

    @property
    def fraction(self) -> float | None:
        return self.coincidences / self.pairs if self.pairs else None

    def to_dict(self) -> dict:
        return {
            "lo": self.lo,
            "N": self.N,
            "eps": self.eps,
            "pairs": self.pairs,
            "coincidences": self.coincidences,
            "fraction": self.fraction,
        }


def mu_chi_coincidence(
    N: int,
    eps: int = 1,
    *,
    lo: int = 1,
    block: int = DEFAULT_BLOCK,
    workers: int = 1,
) -> Coincidence:
    """Among n in [lo, N] with μ²(n) = μ²(n+1) = 1, how often μχ(n) = μχ(n+1).

    χ is the completely multiplicative character with χ(p) = +1 for odd p
    and χ(2) = -eps. ``fraction`` is None when no such n exists.
    """
    twist = TwistSpec("chi_eps", eps)
    if lo < 1 or N < lo:
        raise ParameterError(f"invalid window [{lo}, {N}]")

    def work(b: tuple[int, int]) -> tuple[int, int]:
        s, n = b
        v = twisted_values(s, n + 1, "mu", twist)
        a, c = v[:-1], v[1:]
        both = (a != 0) & (c != 0)
        return int(np.count_nonzero(both)), int(np.count_nonzero(both & (a == c)))

    result = Coincidence(lo=lo, N=N, eps=eps)
    for pairs, same in map_ordered(work, plan_blocks(lo, N - lo + 1, block), workers):
        result.pairs += pairs
        result.coincidences += same
    logger.info("μχ coincidence eps=%+d over [%d, %d]: %s", eps, lo, N, result.fraction)
    return result
