"""Joint distribution of (f(n), f(n+1)) for f = μ and f = λ."""

import logging
from dataclasses import dataclass

import numpy as np

from chowla.errors import ParameterError
from chowla.sieve.segment import DEFAULT_BLOCK, plan_blocks, sieve_range
from chowla.workers import map_ordered

logger = logging.getLogger(__name__)

VALUES = (-1, 0, 1)


def _label(v: int) -> str:
    return "0" if v == 0 else f"{v:+d}"


@dataclass
class PairTable:
    """counts[i][j] counts n in [1, N-1] with (f(n), f(n+1)) = (VALUES[i], VALUES[j])."""

    N: int
    counts: list[list[int]]

    @property
    def total(self) -> int:
        return sum(sum(row) for row in self.counts)

    def count(self, a: int, b: int) -> int:
        return self.counts[a + 1][b + 1]

    def frequency(self, a: int, b: int) -> float:
        total = self.total
        return self.count(a, b) / total if total else 0.0

    @property
    def frequencies(self) -> list[list[float]]:
        total = self.total or 1
        return [[c / total for c in row] for row in self.counts]

    def symmetry_gaps(self) -> dict[str, float]:
        return {
            "plus_minus": abs(self.frequency(1, -1) - self.frequency(-1, 1)),
            "plus_plus": abs(self.frequency(1, 1) - self.frequency(-1, -1)),
        }

    def squarefree_pair_frequency(self) -> float:
        """Frequency of μ²(n) = μ²(n+1) = 1."""
        return sum(self.frequency(a, b) for a in (-1, 1) for b in (-1, 1))

    def to_dict(self) -> dict:
        cells = {
            f"{_label(a)},{_label(b)}": {
                "count": self.count(a, b),
                "frequency": self.frequency(a, b),
            }
            for a in VALUES
            for b in VALUES
        }
        return {"N": self.N, "total": self.total, "cells": cells}

    def rows(self) -> list[dict]:
        return [
            {"N": self.N, "a": a, "b": b, "count": self.count(a, b), "frequency": self.frequency(a, b)}
            for a in VALUES
            for b in VALUES
        ]


def _pair_counts(values: np.ndarray) -> np.ndarray:
    codes = (values[:-1].astype(np.int64) + 1) * 3 + (values[1:].astype(np.int64) + 1)
    return np.bincount(codes, minlength=9)


def _pair_table(N: int, source: str, block: int, workers: int) -> PairTable:
    if N < 2:
        raise ParameterError(f"N must be >= 2, got {N}")

    def work(b: tuple[int, int]) -> np.ndarray:
        s, n = b
        seg = sieve_range(s, n + 1)
        values = seg.mu_values() if source == "mu" else seg.lambda_values()
        return _pair_counts(values)

    plan = plan_blocks(1, N - 1, block)
    counts = np.zeros(9, dtype=np.int64)
    for part in map_ordered(work, plan, workers):
        counts += part
    table = PairTable(N=N, counts=counts.reshape(3, 3).tolist())
    logger.info("%s pair table over [1, %d]: %d pairs", source, N, table.total)
    return table


def mobius_pair_table(N: int, *, block: int = DEFAULT_BLOCK, workers: int = 1) -> PairTable:
    """Empirical 3x3 table of (μ(n), μ(n+1)) over n in [1, N-1]."""
    return _pair_table(N, "mu", block, workers)


def liouville_pair_table(N: int, *, block: int = DEFAULT_BLOCK, workers: int = 1) -> PairTable:
    """The same table for λ; only the four (±1, ±1) cells are populated."""
    return _pair_table(N, "lambda", block, workers)


def squarefree_pair_density(N: int, **kwargs) -> float:
    """Frequency of μ²(n) = μ²(n+1) = 1 over n in [1, N-1]; tends to c = prod_p (1 - 2/p²)."""
    return mobius_pair_table(N, **kwargs).squarefree_pair_frequency()
