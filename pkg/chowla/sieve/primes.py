"""Prime tables: a simple numpy sieve and its segmented variant for intervals."""

import logging
from functools import lru_cache
from math import isqrt

import numpy as np

from chowla.errors import ParameterError

logger = logging.getLogger(__name__)


@lru_cache(maxsize=16)
def _base_sieve(n: int) -> np.ndarray:
    flags = np.ones(n + 1, dtype=bool)
    flags[:2] = False
    flags[4::2] = False
    for p in range(3, isqrt(n) + 1, 2):
        if flags[p]:
            flags[p * p :: 2 * p] = False
    primes = np.flatnonzero(flags).astype(np.int64)
    primes.setflags(write=False)
    return primes


def primes_upto(n: int) -> np.ndarray:
    """All primes p <= n as a read-only int64 array."""
    if n < 2:
        return np.empty(0, dtype=np.int64)
    return _base_sieve(int(n))


def primes_in(lo: int, hi: int) -> np.ndarray:
    """Primes in the closed interval [lo, hi], sieved segment-wise from the base primes."""
    lo = max(int(lo), 2)
    hi = int(hi)
    if hi < lo:
        return np.empty(0, dtype=np.int64)
    if hi <= 1 << 20:
        base = primes_upto(hi)
        return base[np.searchsorted(base, lo) :]

    flags = np.ones(hi - lo + 1, dtype=bool)
    for p in primes_upto(isqrt(hi)).tolist():
        first = max(p * p, -(-lo // p) * p)
        flags[first - lo :: p] = False
    return np.flatnonzero(flags).astype(np.int64) + lo


def is_prime_table(hi: int) -> np.ndarray:
    """Boolean lookup table t with t[n] True exactly for primes n <= hi."""
    table = np.zeros(int(hi) + 1, dtype=bool)
    table[primes_upto(hi)] = True
    return table


def odd_primes_in(lo: int, hi: int) -> list[int]:
    primes = primes_in(lo, hi)
    return [int(p) for p in primes if p != 2]


def prime_interval(lo: int, hi: int, *, minimum: int = 1) -> list[int]:
    """Odd primes in [lo, hi]; raises ParameterError if fewer than ``minimum`` exist."""
    primes = odd_primes_in(lo, hi)
    if len(primes) < minimum:
        raise ParameterError(
            f"interval [{lo}, {hi}] holds {len(primes)} odd primes, need {minimum}"
        )
    return primes
