"""Weighted ensembles of k-step prime paths start, start + p1, ..., start + p1 + ... + pk.

The p_i are distinct primes from an interval I, every partial sum is a vertex,
and a path lies in the graph when p_i | n + (partial sum before step i). The
weight of a path is the product over its steps of 1 / sum(1/p), the sum
running over the p in I that keep the next partial sum a vertex.
"""

import logging
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from chowla.errors import ParameterError
from chowla.graph.profinite import WALK_STREAM, ProfiniteSample, sample_profinite, trial_rng
from chowla.sieve.primes import prime_interval
from chowla.workers import map_ordered

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PathEnsembleParams:
    k: int
    primes: tuple[int, ...]

    def __post_init__(self):
        if self.k < 1 or self.k % 2 == 0:
            raise ParameterError(f"k must be a positive odd integer, got {self.k}")
        if len(self.primes) < self.k:
            raise ParameterError(f"I holds {len(self.primes)} odd primes, need at least k = {self.k}")
        if any(p % 2 == 0 for p in self.primes):
            raise ParameterError("I must contain odd primes only")

    @classmethod
    def from_interval(cls, k: int, imin: int, imax: int) -> "PathEnsembleParams":
        if k < 1 or k % 2 == 0:
            raise ParameterError(f"k must be a positive odd integer, got {k}")
        return cls(k, tuple(prime_interval(imin, imax, minimum=k)))

    @property
    def imin(self) -> int:
        return self.primes[0]

    @property
    def imax(self) -> int:
        return self.primes[-1]

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.primes, dtype=np.int64)

    def to_dict(self) -> dict:
        return {"k": self.k, "imin": self.imin, "imax": self.imax, "size": len(self.primes)}


def asymptotic_parameters(X: float) -> dict:
    """w = log⁵X, I = [exp(√log X), X^(1/200)] and the odd k of the asymptotic argument.

    At reachable X the interval is empty; these are printed next to the desk-scale choices.
    """
    L = math.log(X)
    lll = math.log(math.log(L)) if L > math.e else 0.0
    k = 100 * math.floor(math.log(L) / math.sqrt(lll)) + 1 if lll > 0 else None
    lo, hi = math.exp(math.sqrt(L)), X ** (1 / 200)
    return {"X": X, "w": L**5, "imin": lo, "imax": hi, "interval_empty": lo > hi, "k": k}


# --- Step normalizers ---


class Normalizers:
    """Memoized step normalizers sum(1/p : p in I, x + p a vertex) keyed by the partial sum x."""

    def __init__(self, sample: ProfiniteSample, params: PathEnsembleParams, *, exact: bool = False):
        self.sample = sample
        self.params = params
        self.exact = exact
        self._primes = params.array
        self._cache: dict[int, tuple[np.ndarray, float | Fraction]] = {}

    def admissible(self, x: int) -> np.ndarray:
        return self.lookup(x)[0]

    def value(self, x: int) -> float | Fraction:
        return self.lookup(x)[1]

    def lookup(self, x: int) -> tuple[np.ndarray, float | Fraction]:
        hit = self._cache.get(x)
        if hit is None:
            lo = x + self.params.imin
            mask = self.sample.vertex_mask(lo, x + self.params.imax)
            admissible = self._primes[mask[self._primes - self.params.imin]]
            if self.exact:
                ps = admissible.tolist()
                denominator = math.prod(ps)
                total = Fraction(sum(denominator // p for p in ps), denominator)
            else:
                total = math.fsum(1.0 / admissible) if admissible.size else 0.0
            hit = self._cache[x] = (admissible, total)
        return hit


def step_normalizer(
    prefix_sum: int, params: PathEnsembleParams, sample: ProfiniteSample, *, exact: bool = False
) -> float | Fraction | None:
    """sum(1/p) over p in I with prefix_sum + p a vertex; None when no p qualifies."""
    total = Normalizers(sample, params, exact=exact).value(prefix_sum)
    return total if total else None


# --- Ensemble statistics ---


def _pair_factor(steps1: list[tuple[int, int]], steps2: list[tuple[int, int]]) -> float:
    """P(both paths in the graph) times the product of all their primes.

    Each step is (partial sum before the step, prime). A prime used by both paths
    must see the same residue of -n, otherwise the two events are disjoint.
    """
    needed: dict[int, int] = {}
    factor = 1.0
    for x, p in steps1 + steps2:
        r = (-x) % p
        if p in needed:
            if needed[p] != r:
                return 0.0
            factor *= p
        else:
            needed[p] = r
    return factor


@dataclass
class EnsembleReport:
    params: PathEnsembleParams
    start: int
    start_is_vertex: bool
    paths: int
    s1: float
    endpoints: Counter
    collision: float
    expected_s1: float
    pair_sum: float
    endpoint_pair_sum: float
    walks: int
    trial: int = 0

    @property
    def distinct_endpoints(self) -> int:
        return len(self.endpoints)

    def to_dict(self) -> dict:
        return {
            "trial": self.trial,
            "k": self.params.k,
            "start": self.start,
            "start_is_vertex": self.start_is_vertex,
            "paths": self.paths,
            "s1": self.s1,
            "distinct_endpoints": self.distinct_endpoints,
            "endpoints": {str(m): c for m, c in sorted(self.endpoints.items())},
            "collision": self.collision,
            "expected_s1": self.expected_s1,
            "pair_sum": self.pair_sum,
            "endpoint_pair_sum": self.endpoint_pair_sum,
            "walks": self.walks,
        }


def _random_walk(norms: Normalizers, start: int, k: int, rng: np.random.Generator) -> list[tuple[int, int]] | None:
    """One weighted walk; None if it stalls. Steps are (partial sum, prime)."""
    steps = []
    x = start
    for _ in range(k):
        admissible, total = norms.lookup(x)
        if not admissible.size:
            return None
        probs = (1.0 / admissible) / float(total)
        p = int(admissible[min(np.searchsorted(np.cumsum(probs), rng.random(), side="right"), admissible.size - 1)])
        steps.append((x, p))
        x += p
    return steps


def path_ensemble_stats(
    sample: ProfiniteSample,
    params: PathEnsembleParams,
    start: int = 0,
    *,
    walks: int = 64,
    exact: bool = True,
) -> EnsembleReport:
    """Realised S1 with endpoint diagnostics, plus walk estimates of its conditional moments.

    With ``exact`` the path weights are accumulated as Fractions and converted
    once at the end. A start that is not a vertex gives an empty report with
    ``start_is_vertex`` False.
    """
    k = params.k
    if sample.P < start + k * params.imax:
        raise ParameterError(f"P = {sample.P} must cover start + k·max(I) = {start + k * params.imax}")
    norms = Normalizers(sample, params)
    weights = Normalizers(sample, params, exact=True) if exact else norms
    primes = params.array
    residues = sample.residues_of(primes)
    start_is_vertex = sample.is_vertex(start)

    endpoint_weight: dict[int, Fraction | float] = {}
    endpoints: Counter = Counter()
    count = 0
    one = Fraction(1) if exact else 1.0
    # depth-first over paths inside the graph
    stack: list[tuple[int, int, Fraction | float, frozenset]] = []
    if start_is_vertex:
        stack.append((start, 0, one, frozenset()))
    while stack:
        x, depth, weight, used = stack.pop()
        if depth == k:
            count += 1
            endpoints[x] += 1
            endpoint_weight[x] = endpoint_weight.get(x, 0) + weight
            continue
        total = weights.value(x)
        if not total:
            continue
        hits = primes[(residues + x) % primes == 0]
        for p in hits.tolist():
            if p not in used and sample.is_vertex(x + p):
                stack.append((x + p, depth + 1, weight / total, used | {p}))
    sums = list(endpoint_weight.values())
    s1 = float(sum(sums, 0 * one))
    collision = float(sum((s * s for s in sums), 0 * one))

    expected, pair, endpoint_pair = 0.0, 0.0, 0.0
    if walks and start_is_vertex:
        rng = trial_rng(sample.seed or 0, sample.trial, WALK_STREAM)
        drawn = [_random_walk(norms, start, k, rng) for _ in range(walks)]
        complete = [s is not None and len({p for _, p in s}) == k for s in drawn]
        expected = sum(complete) / walks
        halves = walks // 2
        pair_terms, end_terms = [], []
        for i in range(halves):
            s, t = drawn[2 * i], drawn[2 * i + 1]
            ok = complete[2 * i] and complete[2 * i + 1]
            f = _pair_factor(s, t) if ok else 0.0
            pair_terms.append(f)
            same_end = ok and sum(p for _, p in s) == sum(p for _, p in t)
            end_terms.append(f if same_end else 0.0)
        if halves:
            pair = math.fsum(pair_terms) / halves
            endpoint_pair = math.fsum(end_terms) / halves

    return EnsembleReport(
        params=params,
        start=start,
        start_is_vertex=start_is_vertex,
        paths=count,
        s1=s1,
        endpoints=endpoints,
        collision=collision,
        expected_s1=expected,
        pair_sum=pair,
        endpoint_pair_sum=endpoint_pair,
        walks=walks,
        trial=sample.trial,
    )


def exact_expected_s1(sample: ProfiniteSample, params: PathEnsembleParams, start: int = 0) -> Fraction:
    """sum over paths of w_γ / (p1 ... pk) in exact arithmetic, given the vertex set.

    Enumerates every path, so only meant for small I and k.
    """
    norms = Normalizers(sample, params, exact=True)
    if not sample.is_vertex(start):
        return Fraction(0)

    def walk(x: int, depth: int, used: frozenset) -> Fraction:
        if depth == params.k:
            return Fraction(1)
        admissible, total = norms.lookup(x)
        if not total:
            return Fraction(0)
        acc = Fraction(0)
        for p in admissible.tolist():
            if p not in used:
                acc += Fraction(1, p) / total * walk(x + p, depth + 1, used | {p})
        return acc

    return walk(start, 0, frozenset())


@dataclass
class EnsembleSummary:
    """Trial records; means run over the trials whose start is a vertex."""

    params: PathEnsembleParams
    w: int
    seed: int
    records: list[dict]

    @property
    def conditioned(self) -> list[dict]:
        return [r for r in self.records if r["start_is_vertex"]]

    def mean(self, key: str) -> float:
        rows = self.conditioned
        return math.fsum(r[key] for r in rows) / len(rows) if rows else 0.0

    def to_dict(self) -> dict:
        rows = self.conditioned
        return {
            **self.params.to_dict(),
            "w": self.w,
            "seed": self.seed,
            "trials": len(self.records),
            "conditioned": len(rows),
            "mean_s1": self.mean("s1"),
            "mean_s1_squared": math.fsum(r["s1"] ** 2 for r in rows) / max(len(rows), 1),
            "mean_collision": self.mean("collision"),
            "mean_expected_s1": self.mean("expected_s1"),
            "mean_pair_sum": self.mean("pair_sum"),
            "mean_endpoint_pair_sum": self.mean("endpoint_pair_sum"),
            "mean_distinct_endpoints": self.mean("distinct_endpoints"),
        }


def ensemble_trials(
    params: PathEnsembleParams,
    trials: int,
    seed: int = 0,
    *,
    w: int = 50,
    start: int = 0,
    walks: int = 64,
    exact: bool = True,
    workers: int = 1,
) -> EnsembleSummary:
    P = max(start + params.k * params.imax, w)

    def one(trial: int) -> dict:
        sample = sample_profinite(P, w, seed, trial)
        return path_ensemble_stats(sample, params, start, walks=walks, exact=exact).to_dict()

    records = map_ordered(one, range(trials), workers)
    summary = EnsembleSummary(params, w, seed, records)
    logger.info(
        "Path ensemble k=%d over %d trials (%d with start a vertex): mean S1 %.4f",
        params.k, trials, len(summary.conditioned), summary.mean("s1"),
    )
    return summary
