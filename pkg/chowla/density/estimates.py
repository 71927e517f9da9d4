"""Density estimation for sign patterns, run sets and linear changes of variable.

Densities are reported over a ladder of scale windows instead of a single
limit: min/max over the ladder stand in for liminf/limsup. Each window
reports the plain frequency and the 1/n-weighted (logarithmic) frequency.
"""

import logging
import math
from collections.abc import Callable
from dataclasses import asdict, dataclass, field

import numpy as np

from chowla.density.patterns import SignPattern, match_mask, source_values
from chowla.errors import ParameterError
from chowla.sieve.primes import primes_upto
from chowla.sieve.segment import DEFAULT_BLOCK, plan_blocks, sieve_range
from chowla.workers import map_ordered

logger = logging.getLogger(__name__)

# Rosser-Schoenfeld: π(x) < 1.25506 x / log x for x > 1.
_PI_CONSTANT = 1.25506


@dataclass
class DensityEstimate:
    matches: int
    window_total: int
    frequency: float
    log_frequency: float
    window: tuple[int, int]

    def to_dict(self) -> dict:
        d = asdict(self)
        d["window"] = list(self.window)
        return d


@dataclass
class DensityReport:
    pattern: str
    which: str
    estimates: list[DensityEstimate] = field(default_factory=list)

    @property
    def lower(self) -> float:
        return min(e.frequency for e in self.estimates)

    @property
    def upper(self) -> float:
        return max(e.frequency for e in self.estimates)

    @property
    def log_lower(self) -> float:
        return min(e.log_frequency for e in self.estimates)

    @property
    def log_upper(self) -> float:
        return max(e.log_frequency for e in self.estimates)

    @property
    def final(self) -> DensityEstimate:
        return self.estimates[-1]

    def to_dict(self) -> dict:
        return {
            "pattern": self.pattern,
            "which": self.which,
            "scales": [e.to_dict() for e in self.estimates],
            "liminf": self.lower,
            "limsup": self.upper,
            "log_liminf": self.log_lower,
            "log_limsup": self.log_upper,
        }

    def rows(self) -> list[dict]:
        """One flat record per scale, for CSV export."""
        return [
            {"pattern": self.pattern, "which": self.which, **e.to_dict()}
            for e in self.estimates
        ]


def default_scales(N: int, depth: int = 6) -> list[tuple[int, int]]:
    """The geometric ladder [1, N·2^-j] for j = depth, ..., 0."""
    his = sorted({max(1, N >> j) for j in range(depth + 1)})
    return [(1, hi) for hi in his]


def _validate_scales(scales: list[tuple[int, int]]) -> list[tuple[int, int]]:
    if not scales:
        raise ParameterError("at least one scale window is required")
    out = []
    for lo, hi in scales:
        if lo < 1 or hi < lo:
            raise ParameterError(f"invalid scale window [{lo}, {hi}]")
        out.append((int(lo), int(hi)))
    for (_, a), (_, b) in zip(out, out[1:]):
        if b <= a:
            raise ParameterError("scales must be strictly increasing")
    return out


_EXACT_HARMONIC_LIMIT = 1 << 20


def harmonic_number(n: int) -> float:
    """H(n) = sum_{m <= n} 1/m; asymptotic expansion above 2^20 (error < 1e-25)."""
    if n <= 0:
        return 0.0
    if n <= _EXACT_HARMONIC_LIMIT:
        return math.fsum(1.0 / np.arange(1, n + 1, dtype=np.float64))
    return math.log(n) + np.euler_gamma + 1 / (2 * n) - 1 / (12 * n**2) + 1 / (120 * n**4)


def _harmonic(lo: int, hi: int) -> float:
    if hi < lo:
        return 0.0
    if hi - lo <= _EXACT_HARMONIC_LIMIT:
        return math.fsum(1.0 / np.arange(lo, hi + 1, dtype=np.float64))
    return harmonic_number(hi) - harmonic_number(lo - 1)


def count_windows(
    mask_fn: Callable[[int, int], np.ndarray],
    first_n: int,
    scales: list[tuple[int, int]],
    *,
    block: int = DEFAULT_BLOCK,
    workers: int = 1,
) -> list[tuple[int, float]]:
    """Stream match counts and 1/n sums over every scale window.

    ``mask_fn(s, n)`` returns a boolean mask for the candidates
    first_n + (s - 1) + i, i < n. Per-block partial sums are merged in
    block order so results do not depend on ``workers``.
    """
    top = max(hi for _, hi in scales)
    span = top - first_n + 1
    if span < 1:
        return [(0, 0.0) for _ in scales]
    plan = plan_blocks(1, span, block)

    def work(b: tuple[int, int]) -> list[tuple[int, float]]:
        s, n = b
        mask = mask_fn(s, n)
        hits = np.flatnonzero(mask).astype(np.int64) + (first_n + s - 1)
        out = []
        for lo, hi in scales:
            sel = hits[(hits >= lo) & (hits <= hi)]
            out.append((int(sel.size), float(np.sum(1.0 / sel.astype(np.float64)))))
        return out

    partials = map_ordered(work, plan, workers)
    totals = [(0, 0.0)] * len(scales)
    for part in partials:
        totals = [(c + pc, h + ph) for (c, h), (pc, ph) in zip(totals, part)]
    logger.debug("Counted %d blocks over %d scales", len(plan), len(scales))
    return totals


def _estimates(
    totals: list[tuple[int, float]], first_n: int, scales: list[tuple[int, int]]
) -> list[DensityEstimate]:
    estimates = []
    for (matches, hsum), (lo, hi) in zip(totals, scales):
        a = max(lo, first_n)
        total = max(0, hi - a + 1)
        log_total = _harmonic(a, hi)
        estimates.append(
            DensityEstimate(
                matches=matches,
                window_total=total,
                frequency=matches / total if total else 0.0,
                log_frequency=min(1.0, hsum / log_total) if log_total else 0.0,
                window=(lo, hi),
            )
        )
    return estimates


def pattern_density(
    pattern: SignPattern,
    scales: list[tuple[int, int]] | None = None,
    *,
    N: int | None = None,
    which: str = "lambda",
    w: int | None = None,
    depth: int = 6,
    block: int = DEFAULT_BLOCK,
    workers: int = 1,
) -> DensityReport:
    """Per-scale plain and logarithmic densities of ``pattern``.

    Without explicit ``scales`` the default ladder over [1, N] is used. The
    sieve runs once, block by block, with enough padding that every counted
    n has its whole pattern window inside the sieved range.
    """
    pattern.check_source(which)
    if which == "mu2w" and w is None:
        raise ParameterError("source 'mu2w' needs a squarefree bound w")
    if scales is None:
        if N is None:
            raise ParameterError("either scales or N is required")
        scales = default_scales(N, depth)
    scales = _validate_scales(scales)
    first_n = pattern.k + 1

    def mask_fn(s: int, n: int) -> np.ndarray:
        seg = sieve_range(s, n + pattern.width - 1, w if which == "mu2w" else None)
        return match_mask(source_values(seg, which), pattern)

    totals = count_windows(mask_fn, first_n, scales, block=block, workers=workers)
    report = DensityReport(str(pattern), which, _estimates(totals, first_n, scales))
    logger.info(
        "Pattern %s on %s: frequency %.6f at [%d, %d]",
        pattern, which, report.final.frequency, *report.final.window,
    )
    return report


def run_density(a: float, N: int, **kwargs) -> DensityEstimate:
    """Density of t <= N with λ(n) = +1 for every integer n in (t - a, t + a).

    The open window contains the integers with |n - t| <= ceil(a) - 1, so
    this is the density of the all-plus pattern of that half-width; t runs
    over the integers with the whole window inside [1, N + h].
    """
    if a <= 0:
        raise ParameterError(f"a must be positive, got {a}")
    h = math.ceil(a) - 1
    report = pattern_density(SignPattern.run(h), [(1, N)], **kwargs)
    return report.final


def sign_balance(N: int, which: str = "lambda", **kwargs) -> dict:
    """|freq(+1) - freq(-1)| over [1, N]; for μ the frequencies are of all n."""
    plus = pattern_density(SignPattern("+"), [(1, N)], which=which, **kwargs).final
    minus = pattern_density(SignPattern("-"), [(1, N)], which=which, **kwargs).final
    return {
        "which": which,
        "N": N,
        "plus": plus.frequency,
        "minus": minus.frequency,
        "gap": abs(plus.frequency - minus.frequency),
    }


def agreement_density(N: int, **kwargs) -> dict:
    """Density of λ(n) = λ(n + 1), split into the ++ and -- parts."""
    pp = pattern_density(SignPattern("++"), [(1, N - 1)], **kwargs).final
    mm = pattern_density(SignPattern("--"), [(1, N - 1)], **kwargs).final
    return {
        "N": N,
        "plus_plus": pp.frequency,
        "minus_minus": mm.frequency,
        "agreement": pp.frequency + mm.frequency,
    }


# --- Constants ---


def euler_tail_bound(P: int) -> float:
    """Upper bound for sum_{p > P} -log(1 - 2/p²).

    From π(x) < 1.25506 x/log x: sum_{p>P} 1/p² <= 2·1.25506/(P log P), and
    -log(1 - x) <= x + x² for x <= 1/2.
    """
    inv_sq = 2 * _PI_CONSTANT / (P * math.log(P))
    return 2 * inv_sq * (1 + 2 / P**2)


def squarefree_w_density(w: int) -> float:
    """prod_{p <= w} (1 - 1/p²)."""
    primes = primes_upto(w).astype(np.float64)
    return float(math.exp(math.fsum(np.log1p(-1.0 / primes**2))))


def predicted_constants(cutoff: int = 1_000_000) -> dict:
    """1/ζ(2), c = prod_p (1 - 2/p²) and the two Möbius pair probabilities.

    c is the product over p <= cutoff; the true value lies in
    [c·exp(-tail_bound), c].
    """
    if cutoff < 3:
        raise ParameterError(f"cutoff must be >= 3, got {cutoff}")
    primes = primes_upto(cutoff).astype(np.float64)
    c = math.exp(math.fsum(np.log1p(-2.0 / primes**2)))
    tail = euler_tail_bound(cutoff)
    inv_zeta2 = 6 / math.pi**2
    return {
        "cutoff": cutoff,
        "inv_zeta2": inv_zeta2,
        "c": c,
        "c_tail_bound": c * -math.expm1(-tail),
        "pair_zero_zero": 1 - 2 * inv_zeta2 + c,
        "pair_sign_zero": (inv_zeta2 - c) / 2,
    }


# --- Linear change of variable ---


def _property_registry() -> dict[str, Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]]:
    return {
        "even": lambda m, lam, mu: m % 2 == 0,
        "odd": lambda m, lam, mu: m % 2 == 1,
        "lambda+": lambda m, lam, mu: lam == 1,
        "lambda-": lambda m, lam, mu: lam == -1,
        "mu+": lambda m, lam, mu: mu == 1,
        "mu-": lambda m, lam, mu: mu == -1,
        "squarefree": lambda m, lam, mu: mu != 0,
    }


PROPERTIES = tuple(_property_registry())


@dataclass
class ChangeOfVariable:
    property: str
    q: int
    r: int
    N: int
    lhs: float
    rhs: float
    log_lhs: float
    log_rhs: float

    @property
    def discrepancy(self) -> float:
        return abs(self.lhs - self.rhs)

    @property
    def log_discrepancy(self) -> float:
        return abs(self.log_lhs - self.log_rhs)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["discrepancy"] = self.discrepancy
        d["log_discrepancy"] = self.log_discrepancy
        return d


def _property_mask(prop: str | SignPattern, M: int, **kwargs) -> np.ndarray:
    """Boolean array over m = 1..M (index m - 1)."""
    if isinstance(prop, SignPattern):
        seg = sieve_range(1, M + prop.l, **kwargs)
        mask = np.zeros(M, dtype=bool)
        hits = match_mask(seg.lambda_values(), prop)  # candidates m = k+1 .. M
        mask[prop.k : prop.k + hits.size] = hits[: M - prop.k]
        return mask

    registry = _property_registry()
    if prop not in registry:
        raise ParameterError(f"unknown property {prop!r}; expected one of {PROPERTIES}")
    if prop in ("even", "odd"):
        return registry[prop](np.arange(1, M + 1, dtype=np.int64), None, None)
    seg = sieve_range(1, M, **kwargs)
    return registry[prop](None, seg.lambda_values(), seg.mu_values())


def change_of_variable_check(
    prop: str | SignPattern, q: int, r: int, N: int, **kwargs
) -> ChangeOfVariable:
    """Compare the density of P(qn + r) with q times the density of P(m), m ≡ r (q).

    Plain: (1/N)#{n <= N: P(qn+r)} against q·(1/M)#{m <= M: P(m), m ≡ r (q)},
    M = qN + r. The logarithmic versions use 1/n and 1/m weights.
    """
    if q < 1:
        raise ParameterError(f"q must be >= 1, got {q}")
    if r < 0:
        raise ParameterError(f"r must be >= 0, got {r}")
    if N < 1:
        raise ParameterError(f"N must be >= 1, got {N}")
    M = q * N + r
    mask = _property_mask(prop, M, **kwargs)

    # qn + r for n = 1..N sits at index q + r - 1, step q
    lhs_hits = mask[q + r - 1 :: q][:N]
    # m ≡ r (mod q), m = m0, m0 + q, ... <= M
    m0 = (r - 1) % q + 1
    rhs_hits = mask[m0 - 1 :: q]

    n = np.arange(1, N + 1, dtype=np.float64)
    m = np.arange(m0, M + 1, q, dtype=np.float64)
    result = ChangeOfVariable(
        property=str(prop),
        q=q,
        r=r,
        N=N,
        lhs=float(np.count_nonzero(lhs_hits) / N),
        rhs=float(q * np.count_nonzero(rhs_hits) / M),
        log_lhs=float(np.sum(1.0 / n[lhs_hits]) / harmonic_number(N)),
        log_rhs=float(q * np.sum(1.0 / m[rhs_hits]) / harmonic_number(M)),
    )
    logger.info(
        "Change of variable %s q=%d r=%d N=%d: discrepancy %.2e",
        result.property, q, r, N, result.discrepancy,
    )
    return result
