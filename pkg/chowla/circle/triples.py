"""Prime triples (p1, p2, p3) in (X, 3X] x (5X, 7X] x (3X, 5X] with m = -p1 + p2 - p3."""

import logging
from dataclasses import dataclass

import numpy as np

from chowla.errors import ParameterError
from chowla.sieve.primes import is_prime_table, primes_in, primes_upto
from chowla.workers import map_ordered

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TripleSpec:
    X: int
    m: int
    A: int = 0
    w: int = 1
    k: int = 1
    a1: int = 0
    a2: int = 0

    def __post_init__(self):
        if self.X < 1:
            raise ParameterError(f"X must be positive, got {self.X}")
        if self.m % 2 == 0:
            raise ParameterError(f"m must be odd, got {self.m}")
        if abs(self.m) > self.X:
            raise ParameterError(f"m = {self.m} outside [-X, X]")
        if self.w < 1:
            raise ParameterError(f"w must be >= 1, got {self.w}")
        if self.k < 1:
            raise ParameterError(f"k must be >= 1, got {self.k}")

    @property
    def intervals(self) -> tuple[tuple[int, int], tuple[int, int], tuple[int, int]]:
        X = self.X
        return (X + 1, 3 * X), (5 * X + 1, 7 * X), (3 * X + 1, 5 * X)

    def to_dict(self) -> dict:
        return {"X": self.X, "m": self.m, "A": self.A, "w": self.w, "k": self.k, "a1": self.a1, "a2": self.a2}


def _square_free_below(values, squares: np.ndarray):
    """True where no q² with q <= w divides the value."""
    values = np.asarray(values, dtype=np.int64)
    if not squares.size:
        return np.ones(values.shape, dtype=bool)
    return np.all(values[..., None] % squares != 0, axis=-1)


def _count(spec: TripleSpec, workers: int) -> int:
    (lo1, hi1), (lo2, hi2), (lo3, hi3) = spec.intervals
    p1s = primes_in(lo1, hi1)
    p3s = primes_in(lo3, hi3)
    is_p2 = is_prime_table(hi2)
    squares = primes_upto(spec.w) ** 2
    k2 = spec.k * spec.k

    def per_p1(p1: int) -> int:
        if k2 > 1 and (p1 - spec.a1) % k2:
            return 0
        if not _square_free_below(spec.A - p1, squares):
            return 0
        p2 = spec.m + p1 + p3s
        ok = (p2 >= lo2) & (p2 <= hi2)
        p2 = p2[ok]
        p2 = p2[is_p2[p2]]
        if k2 > 1:
            p2 = p2[(p2 - spec.a2) % k2 == 0]
        return int(np.count_nonzero(_square_free_below(spec.A - p1 + p2, squares)))

    return sum(map_ordered(per_p1, p1s.tolist(), workers))


def count_triples(spec: TripleSpec, *, workers: int = 1) -> int:
    """Triples with A - p1 and A - p1 + p2 free of p² for every p <= w."""
    if spec.k != 1:
        raise ParameterError("use count_triples_in_classes for a congruence condition")
    count = _count(spec, workers)
    logger.info("Triples X=%d m=%d A=%d w=%d: %d", spec.X, spec.m, spec.A, spec.w, count)
    return count


def count_triples_in_classes(spec: TripleSpec, *, workers: int = 1) -> int:
    """count_triples restricted to p1 ≡ a1 and p2 ≡ a2 (mod k²)."""
    if spec.k == 0:
        raise ParameterError("k must be nonzero")
    if any(spec.k % (p * p) == 0 for p in primes_upto(int(spec.k**0.5) + 1).tolist()):
        raise ParameterError(f"k = {spec.k} is not squarefree")
    count = _count(spec, workers)
    logger.info(
        "Triples X=%d m=%d in classes (k=%d, a1=%d, a2=%d): %d",
        spec.X, spec.m, spec.k, spec.a1, spec.a2, count,
    )
    return count


def enumerate_triples(m: int, X: int) -> list[tuple[int, int, int]]:
    """Every prime triple in the three intervals with -p1 + p2 - p3 = m."""
    spec = TripleSpec(X, m)
    (lo1, hi1), (lo2, hi2), (lo3, hi3) = spec.intervals
    p3s = primes_in(lo3, hi3)
    is_p2 = is_prime_table(hi2)
    out = []
    for p1 in primes_in(lo1, hi1).tolist():
        p2 = m + p1 + p3s
        ok = (p2 >= lo2) & (p2 <= hi2)
        ok[ok] = is_p2[p2[ok]]
        out.extend((p1, int(b), int(c)) for b, c in zip(p2[ok], p3s[ok]))
    return out


def brute_force_triples(spec: TripleSpec) -> int:
    """Three nested loops over the interval primes; the reference for count_triples."""
    (lo1, hi1), (lo2, hi2), (lo3, hi3) = spec.intervals
    squares = [q * q for q in primes_upto(spec.w).tolist()]
    k2 = spec.k * spec.k
    count = 0
    for p1 in primes_in(lo1, hi1).tolist():
        for p2 in primes_in(lo2, hi2).tolist():
            for p3 in primes_in(lo3, hi3).tolist():
                if -p1 + p2 - p3 != spec.m:
                    continue
                if k2 > 1 and ((p1 - spec.a1) % k2 or (p2 - spec.a2) % k2):
                    continue
                if any((spec.A - p1) % s == 0 or (spec.A - p1 + p2) % s == 0 for s in squares):
                    continue
                count += 1
    return count


def _cumulative(S: int, L: int) -> int:
    """Number of (i, l) in [1, L]² with i + l <= S."""
    if S <= 1:
        return 0
    if S <= L + 1:
        return S * (S - 1) // 2
    if S <= 2 * L:
        return L * (L + 1) // 2 + (L - 1) * L // 2 - (2 * L - S) * (2 * L + 1 - S) // 2
    return L * L


def lattice_count(m: int, X: int) -> int:
    """#{(n1, n2, n3) in the three intervals : m = -n1 + n2 - n3}, in closed form."""
    if X < 1:
        raise ParameterError(f"X must be positive, got {X}")
    L = 2 * X
    # n1 = X + i, n2 = 5X + j, n3 = 3X + l gives j = (m - X) + i + l
    t = m - X
    return _cumulative(L - t, L) - _cumulative(-t, L)


def lattice_count_direct(m: int, X: int) -> int:
    return sum(
        1
        for n1 in range(X + 1, 3 * X + 1)
        for n3 in range(3 * X + 1, 5 * X + 1)
        if 5 * X < m + n1 + n3 <= 7 * X
    )
