"""Edge statistics and the three-hop connection between an odd and an even vertex set."""

import logging
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from chowla.errors import ParameterError
from chowla.graph.components import validate_path
from chowla.graph.profinite import ProfiniteSample, trial_rng
from chowla.sieve.oracle import is_prime
from chowla.sieve.primes import primes_in

logger = logging.getLogger(__name__)

EDGE_STREAM = 4


def _odd_prime_gap(a: int, b: int) -> int:
    q = abs(a - b)
    if q < 3 or not is_prime(q):
        raise ParameterError(f"gap |{a} - {b}| = {q} is not an odd prime")
    return q


@dataclass
class EdgeProbability:
    a: int
    b: int
    q: int
    trials: int
    hits: int

    @property
    def frequency(self) -> float:
        return self.hits / self.trials

    @property
    def expected(self) -> float:
        return 1 / self.q

    def to_dict(self) -> dict:
        return {
            "a": self.a,
            "b": self.b,
            "q": self.q,
            "trials": self.trials,
            "hits": self.hits,
            "frequency": self.frequency,
            "expected": self.expected,
        }


def _uniform_residues(q: int, trials: int, seed: int, stream: int) -> np.ndarray:
    u = trial_rng(seed, stream, EDGE_STREAM).random(trials)
    return np.floor(u * q).astype(np.int64)


def edge_probability_test(a: int, b: int, trials: int, seed: int = 0) -> EdgeProbability:
    """Empirical P(q | n + a) for q = |a - b| over independent residues of n mod q."""
    q = _odd_prime_gap(a, b)
    if trials < 1:
        raise ParameterError(f"trials must be positive, got {trials}")
    r = _uniform_residues(q, trials, seed, 0)
    hits = int(np.count_nonzero((r + a) % q == 0))
    return EdgeProbability(a, b, q, trials, hits)


def joint_edge_probability(
    edge1: tuple[int, int], edge2: tuple[int, int], trials: int, seed: int = 0
) -> dict:
    """Joint and marginal frequencies of two edges with distinct gap primes."""
    q1, q2 = _odd_prime_gap(*edge1), _odd_prime_gap(*edge2)
    if q1 == q2:
        raise ParameterError("the two edges must have distinct gap primes")
    hit1 = (_uniform_residues(q1, trials, seed, 1) + min(edge1)) % q1 == 0
    hit2 = (_uniform_residues(q2, trials, seed, 2) + min(edge2)) % q2 == 0
    f1, f2 = hit1.mean(), hit2.mean()
    return {
        "q1": q1,
        "q2": q2,
        "trials": trials,
        "first": float(f1),
        "second": float(f2),
        "joint": float(np.mean(hit1 & hit2)),
        "product": float(f1 * f2),
    }


def crt_edge_identity(q1: int, q2: int, a1: int = 0, a2: int = 0) -> dict:
    """Exact P(q1 | n + a1), P(q2 | n + a2) and their joint probability over Z/(q1 q2)."""
    for q in (q1, q2):
        if q < 3 or not is_prime(q):
            raise ParameterError(f"{q} is not an odd prime")
    if q1 == q2:
        raise ParameterError("gap primes must be distinct")
    modulus = q1 * q2
    n = np.arange(modulus, dtype=np.int64)
    first = (n + a1) % q1 == 0
    second = (n + a2) % q2 == 0
    p1 = Fraction(int(first.sum()), modulus)
    p2 = Fraction(int(second.sum()), modulus)
    joint = Fraction(int(np.count_nonzero(first & second)), modulus)
    return {"q1": q1, "q2": q2, "first": p1, "second": p2, "joint": joint, "holds": joint == p1 * p2}


# --- Three hops ---


def hop_intervals(X: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Primes in (X, 3X], (5X, 7X] and (3X, 5X]."""
    return primes_in(X + 1, 3 * X), primes_in(5 * X + 1, 7 * X), primes_in(3 * X + 1, 5 * X)


def _reciprocals(primes: np.ndarray, size: int, offset: int = 0) -> np.ndarray:
    out = np.zeros(size, dtype=np.float64)
    out[primes - offset] = 1.0 / primes
    return out


def first_moment(A: list[int], B: list[int], X: int) -> float:
    """Sum over a in A, b in B and prime triples with b = a - p1 + p2 - p3 of 1/(p1 p2 p3)."""
    if not A or not B:
        return 0.0
    I1, I2, I3 = hop_intervals(X)
    size = 7 * X + 1
    u1, u2, u3 = _reciprocals(I1, size), _reciprocals(I2, size), _reciprocals(I3, size)
    # t(s) = sum 1/(p1 p3) over p1 + p3 = s, then T(m) = sum_s t(s) u2(m + s)
    t = np.convolve(u1, u3)
    corr = np.correlate(u2, t, mode="full")
    # corr[k] holds sum_s u2[s + k - (len(t) - 1)] t[s], i.e. m = k - (len(t) - 1)
    shift = t.size - 1
    diffs = np.subtract.outer(np.asarray(B), np.asarray(A)).ravel()
    idx = diffs + shift
    valid = (idx >= 0) & (idx < corr.size)
    return float(corr[idx[valid]].sum())


@dataclass
class ThreeHopResult:
    status: str  # found | absent | vacuous
    X: int
    expectation: float
    path: list[int] = field(default_factory=list)
    primes: tuple[int, int, int] | None = None
    paths_found: int = 0
    valid: bool | None = None

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "X": self.X,
            "path": self.path,
            "primes": list(self.primes) if self.primes else None,
            "paths_found": self.paths_found,
            "valid": self.valid,
            "expectation": self.expectation,
        }


def three_hop_search(
    sample: ProfiniteSample,
    A,
    B,
    X: int,
    *,
    exhaustive: bool = False,
) -> ThreeHopResult:
    """Look for a path a, a - p1, a - p1 + p2, b with p1, p2, p3 in the three hop intervals.

    A must hold odd and B even integers of [0, X]. With ``exhaustive`` the search
    counts every such path instead of stopping at the first.
    """
    A, B = sorted(set(A)), sorted(set(B))
    if any(a % 2 == 0 for a in A) or any(b % 2 for b in B):
        raise ParameterError("A must hold odd and B even integers")
    if any(not 0 <= v <= X for v in A + B):
        raise ParameterError(f"A and B must lie in [0, {X}]")
    if X < 1:
        raise ParameterError(f"X must be positive, got {X}")
    if sample.P < 7 * X:
        raise ParameterError(f"P = {sample.P} must cover 7X = {7 * X}")

    expectation = first_moment(A, B, X)
    if not A or not B:
        return ThreeHopResult("vacuous", X, expectation)

    I1, I2, I3 = hop_intervals(X)
    r1, r2, r3 = sample.residues_of(I1), sample.residues_of(I2), sample.residues_of(I3)
    targets = set(B)
    result = ThreeHopResult("absent", X, expectation)
    for a in A:
        if not sample.is_vertex(a):
            continue
        for p1 in I1[(r1 + a) % I1 == 0].tolist():
            c = a - p1
            if not sample.is_vertex(c):
                continue
            for p2 in I2[(r2 + c) % I2 == 0].tolist():
                d = c + p2
                if not sample.is_vertex(d):
                    continue
                # p3 | n + b with b = d - p3 is the same as p3 | n + d
                for p3 in I3[(r3 + d) % I3 == 0].tolist():
                    b = d - p3
                    if b not in targets or not sample.is_vertex(b):
                        continue
                    result.paths_found += 1
                    if result.status != "found":
                        path = [a, c, d, b]
                        result.status, result.path, result.primes = "found", path, (p1, p2, p3)
                        result.valid = validate_path(sample, path)
                    if not exhaustive:
                        return result
    logger.debug("Three-hop search X=%d: %s (%d paths)", X, result.status, result.paths_found)
    return result
