"""Singular series, the multiplicative weights f and g, and the main-term prediction."""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from chowla.circle.triples import TripleSpec, lattice_count
from chowla.errors import ParameterError, SingularityError
from chowla.sieve.oracle import factor_oracle, is_prime
from chowla.sieve.primes import primes_upto

logger = logging.getLogger(__name__)


def _prime_divisors(n: int) -> list[int]:
    return [p for p, _ in factor_oracle(abs(n)).prime_powers]


def euler_phi(n: int) -> int:
    if n < 1:
        raise ParameterError(f"n must be positive, got {n}")
    result = n
    for p in _prime_divisors(n):
        result -= result // p
    return result


def _squarefree_primes(n: int) -> list[int]:
    if n < 1:
        raise ParameterError(f"n must be positive, got {n}")
    fact = factor_oracle(n)
    if not fact.is_squarefree:
        raise ParameterError(f"{n} is not squarefree")
    return [p for p, _ in fact.prime_powers]


def _f_prime(p: int) -> Fraction:
    if p == 2:
        raise SingularityError("f(2) is undefined: 1 - 1/(p-1)² vanishes")
    d = p - 1
    return (1 + Fraction(1, d**3)) / (1 - Fraction(1, d**2))


def _g_prime(p: int) -> Fraction:
    return 1 / (1 + Fraction(1, (p - 1) ** 3))


def f_value(n: int) -> Fraction:
    """Multiplicative f at a squarefree n; f(1) = 1."""
    return math.prod((_f_prime(p) for p in _squarefree_primes(n)), start=Fraction(1))


def g_value(n: int) -> Fraction:
    """Multiplicative g at a squarefree n; g(1) = 1."""
    return math.prod((_g_prime(p) for p in _squarefree_primes(n)), start=Fraction(1))


def fg_values(p: int) -> tuple[Fraction, Fraction]:
    """(f(p), g(p)) exactly, for a prime p >= 3."""
    if not is_prime(p):
        raise ParameterError(f"{p} is not prime")
    return _f_prime(p), _g_prime(p)


@dataclass
class SingularData:
    m: int
    value: float
    cutoff: int
    tail_bound: float
    divisors: list[int]
    f_values: dict[int, Fraction] = field(default_factory=dict)
    g_values: dict[int, Fraction] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "S_m": self.value,
            "cutoff": self.cutoff,
            "tail_bound": self.tail_bound,
            "divisors": self.divisors,
            "f_values": {str(p): str(v) for p, v in self.f_values.items()},
            "g_values": {str(p): str(v) for p, v in self.g_values.items()},
        }


def singular_series(m: int, cutoff: int = 100_000, *, primes=()) -> SingularData:
    """𝔖(m) truncated at ``cutoff``; prime divisors of m always enter exactly.

    The p = 2 factor is 2 for odd m. The neglected factors over p > cutoff
    change log 𝔖 by less than ``tail_bound``.
    """
    if m == 0 or m % 2 == 0:
        raise ParameterError(f"m must be odd and nonzero, got {m}")
    if cutoff < 100:
        raise ParameterError(f"cutoff must be >= 100, got {cutoff}")
    divisors = _prime_divisors(m)
    ps = primes_upto(cutoff)[1:]
    ps = ps[~np.isin(ps, divisors)]
    d = (ps - 1).astype(np.float64)
    log_value = math.log(2) + math.fsum(np.log1p(1 / d**3))
    log_value += math.fsum(math.log1p(-1 / (p - 1) ** 2) for p in divisors)
    data = SingularData(
        m=m,
        value=math.exp(log_value),
        cutoff=cutoff,
        tail_bound=2 / cutoff**2,
        divisors=divisors,
    )
    for p in primes:
        data.g_values[p] = _g_prime(p)
        if p != 2:
            data.f_values[p] = _f_prime(p)
    logger.debug("S(%d) = %.12f at cutoff %d", m, data.value, cutoff)
    return data


@dataclass
class MainTerm:
    spec: TripleSpec
    lattice: int
    singular: SingularData
    indicator: bool
    factor: Fraction
    prediction: float

    def to_dict(self) -> dict:
        return {
            **self.spec.to_dict(),
            "G_m": self.lattice,
            "S_m": self.singular.value,
            "indicator": self.indicator,
            "factor": str(self.factor),
            "prediction": self.prediction,
            "tail_bound": self.singular.tail_bound,
        }


def main_term_prediction(spec: TripleSpec, *, cutoff: int = 100_000) -> MainTerm:
    """𝒢(m)𝔖(m)/log³X times the congruence factor f((k, m)) g(k) / (k φ(k)³)."""
    k, m = spec.k, spec.m
    if spec.X < 2:
        raise ParameterError(f"X must be >= 2 for log X, got {spec.X}")
    singular = singular_series(m, cutoff)
    lattice = lattice_count(m, spec.X)
    indicator = math.gcd(k, -spec.a1 + spec.a2 - m) == math.gcd(k, spec.a1) == math.gcd(k, spec.a2) == 1
    factor = Fraction(0)
    if indicator:
        factor = f_value(math.gcd(k, m)) * g_value(k) / (k * euler_phi(k) ** 3)
    prediction = lattice * singular.value / math.log(spec.X) ** 3 * float(factor)
    return MainTerm(spec, lattice, singular, indicator, factor, prediction)
