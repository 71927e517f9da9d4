"""Independent factorization oracle used to cross-check the sieve.

Trial division by the primes below 10⁴, then a deterministic Miller-Rabin
test (bases 2..37, exact for n < 3.3·10²⁴) and Brent's variant of Pollard
rho for any composite cofactor.
"""

import logging
from dataclasses import dataclass, field
from math import gcd, prod

from chowla.errors import ParameterError, RangeError
from chowla.sieve.primes import primes_upto

logger = logging.getLogger(__name__)

U64_MAX = (1 << 64) - 1
TRIAL_LIMIT = 10_000
MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

_SMALL_PRIMES: list[int] = primes_upto(TRIAL_LIMIT).tolist()


@dataclass
class Factorization:
    n: int
    prime_powers: list[tuple[int, int]] = field(default_factory=list)

    @property
    def big_omega(self) -> int:
        return sum(e for _, e in self.prime_powers)

    @property
    def is_squarefree(self) -> bool:
        return all(e == 1 for _, e in self.prime_powers)

    @property
    def liouville(self) -> int:
        return -1 if self.big_omega % 2 else 1

    @property
    def mobius(self) -> int:
        return self.liouville if self.is_squarefree else 0

    def squarefree_below(self, w: int) -> bool:
        """True when no prime p <= w has p² | n."""
        return all(e == 1 for p, e in self.prime_powers if p <= w)

    def value(self) -> int:
        return prod(p**e for p, e in self.prime_powers)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _brent(n: int) -> int:
    """A nontrivial factor of the odd composite n."""
    for c in range(1, n):
        y, r, q, g = 2, 1, 1, 1
        m = 128
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = gcd(abs(x - ys), n)
        if g != n:
            return g
    raise ArithmeticError(f"Pollard rho failed on {n}")


def _split(n: int, out: list[int]) -> None:
    if n == 1:
        return
    if is_prime(n):
        out.append(n)
        return
    d = _brent(n)
    _split(d, out)
    _split(n // d, out)


def factor_oracle(n: int) -> Factorization:
    """Complete factorization of 1 <= n < 2⁶⁴."""
    if n < 1:
        raise ParameterError(f"factor_oracle needs n >= 1, got {n}")
    if n > U64_MAX:
        raise RangeError(f"{n} exceeds the 64-bit integer width")

    powers: dict[int, int] = {}
    m = n
    for p in _SMALL_PRIMES:
        if p * p > m:
            break
        while m % p == 0:
            m //= p
            powers[p] = powers.get(p, 0) + 1

    large: list[int] = []
    if m > 1:
        if m < TRIAL_LIMIT * TRIAL_LIMIT:
            large.append(m)
        else:
            _split(m, large)
    for p in large:
        powers[p] = powers.get(p, 0) + 1

    return Factorization(n=n, prime_powers=sorted(powers.items()))
