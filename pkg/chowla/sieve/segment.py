"""Segmented sieve for λ(n), μ(n) and the truncated squarefree indicator.

Each segment keeps a cofactor array: for every prime power p^k <= end the
multiples of p^k are divided by p once and their Ω-parity flipped, so after
all primes up to √end a cofactor > 1 is a single large prime and flips the
parity one last time.

Packing (bit i of byte i // 8, little-endian within bytes):
- λ: 1 bit per integer, +1 -> 0, -1 -> 1
- μ: 2 bits per integer, code 0 -> 0, 1 -> +1, 2 -> -1
- squarefree_w: 1 bit per integer, 1 when no p <= w has p² | n
"""

import logging
from collections.abc import Iterator
from dataclasses import dataclass
from math import isqrt

import numpy as np

from chowla.errors import ParameterError, RangeError
from chowla.sieve.primes import primes_upto
from chowla.workers import map_ordered

logger = logging.getLogger(__name__)

U64_MAX = (1 << 64) - 1
DEFAULT_BLOCK = 1 << 20

_MU_DECODE = np.array([0, 1, -1], dtype=np.int8)


def check_range(start: int, length: int, *, extra: int = 0) -> int:
    """Validate a range and return its last integer; raises RangeError past 64 bits."""
    if start < 1:
        raise ParameterError(f"start must be >= 1, got {start}")
    if length < 1:
        raise ParameterError(f"len must be >= 1, got {length}")
    end = start + length - 1 + extra
    if end > U64_MAX:
        raise RangeError(f"range [{start}, {end}] exceeds the 64-bit integer width")
    return end


def _pack_bits(bits: np.ndarray) -> np.ndarray:
    return np.packbits(bits.astype(np.uint8), bitorder="little")


def _unpack_bits(packed: np.ndarray, count: int) -> np.ndarray:
    return np.unpackbits(packed, count=count, bitorder="little")


def encode_mu(mu: np.ndarray) -> np.ndarray:
    codes = np.where(mu < 0, 2, mu).astype(np.uint8)
    pairs = np.stack([codes & 1, codes >> 1], axis=1).ravel()
    return _pack_bits(pairs)


def decode_mu(packed: np.ndarray, count: int) -> np.ndarray:
    pairs = _unpack_bits(packed, 2 * count).reshape(count, 2)
    codes = pairs[:, 0] | (pairs[:, 1] << 1)
    if np.any(codes == 3):
        raise ValueError("invalid μ code 3 in packed array")
    return _MU_DECODE[codes]


@dataclass(eq=False)
class SieveSegment:
    """Bit-packed λ, μ and (optionally) μ²_w values over [start, start + length)."""

    start: int
    length: int
    lam_bits: np.ndarray
    mu_bits: np.ndarray
    sqf_bits: np.ndarray | None = None
    w: int | None = None

    @property
    def stop(self) -> int:
        return self.start + self.length

    @classmethod
    def from_values(
        cls,
        start: int,
        lam: np.ndarray,
        mu: np.ndarray,
        sqf: np.ndarray | None = None,
        w: int | None = None,
    ) -> "SieveSegment":
        return cls(
            start=int(start),
            length=int(len(lam)),
            lam_bits=_pack_bits(lam < 0),
            mu_bits=encode_mu(mu),
            sqf_bits=_pack_bits(sqf) if sqf is not None else None,
            w=w if sqf is not None else None,
        )

    def lambda_values(self) -> np.ndarray:
        """λ(n) for every n in the segment, as int8 ±1."""
        bits = _unpack_bits(self.lam_bits, self.length)
        return (1 - 2 * bits.astype(np.int8)).astype(np.int8)

    def mu_values(self) -> np.ndarray:
        return decode_mu(self.mu_bits, self.length)

    def squarefree_w_values(self) -> np.ndarray:
        if self.sqf_bits is None:
            raise ParameterError("segment was sieved without a squarefree bound w")
        return _unpack_bits(self.sqf_bits, self.length).astype(bool)

    def squarefree_values(self) -> np.ndarray:
        """True μ²(n), decoded from the μ array."""
        return self.mu_values() != 0

    def _index(self, n: int) -> int:
        if not self.start <= n < self.stop:
            raise ParameterError(f"{n} outside segment [{self.start}, {self.stop})")
        return n - self.start

    def lambda_at(self, n: int) -> int:
        i = self._index(n)
        return -1 if (self.lam_bits[i >> 3] >> (i & 7)) & 1 else 1

    def mu_at(self, n: int) -> int:
        i = 2 * self._index(n)
        code = ((self.mu_bits[i >> 3] >> (i & 7)) & 3)
        return int(_MU_DECODE[code])

    def slice(self, lo: int, hi: int) -> "SieveSegment":
        """The sub-segment [lo, hi)."""
        a, b = self._index(lo), self._index(hi - 1) + 1
        sqf = self.squarefree_w_values()[a:b] if self.sqf_bits is not None else None
        return SieveSegment.from_values(
            lo, self.lambda_values()[a:b], self.mu_values()[a:b], sqf, self.w
        )

    def concat(self, other: "SieveSegment") -> "SieveSegment":
        """Join with the segment that starts where this one stops."""
        if other.start != self.stop:
            raise ParameterError(
                f"segments not contiguous: {self.stop} != {other.start}"
            )
        if self.w != other.w:
            raise ParameterError(f"segments sieved with different w: {self.w}, {other.w}")
        return join_segments([self, other])

    def summary(self) -> dict:
        lam = self.lambda_values()
        mu = self.mu_values()
        result = {
            "start": self.start,
            "len": self.length,
            "lambda_plus": int(np.count_nonzero(lam > 0)),
            "lambda_minus": int(np.count_nonzero(lam < 0)),
            "mu_plus": int(np.count_nonzero(mu > 0)),
            "mu_zero": int(np.count_nonzero(mu == 0)),
            "mu_minus": int(np.count_nonzero(mu < 0)),
        }
        result["squarefree_fraction"] = 1 - result["mu_zero"] / self.length
        if self.sqf_bits is not None:
            result["w"] = self.w
            result["squarefree_w_fraction"] = float(self.squarefree_w_values().mean())
        return result

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SieveSegment):
            return NotImplemented
        if (self.start, self.length, self.w) != (other.start, other.length, other.w):
            return False
        if (self.sqf_bits is None) != (other.sqf_bits is None):
            return False
        same = np.array_equal(self.lam_bits, other.lam_bits) and np.array_equal(
            self.mu_bits, other.mu_bits
        )
        if self.sqf_bits is not None:
            same = same and np.array_equal(self.sqf_bits, other.sqf_bits)
        return bool(same)


def join_segments(segments: list[SieveSegment]) -> SieveSegment:
    """Concatenate contiguous segments.

    Packed arrays are concatenated directly when every segment but the last
    has a length divisible by 8; otherwise values are decoded and repacked.
    """
    if not segments:
        raise ParameterError("no segments to join")
    if len(segments) == 1:
        return segments[0]
    for left, right in zip(segments, segments[1:]):
        if right.start != left.stop:
            raise ParameterError(f"segments not contiguous at {left.stop}")

    first = segments[0]
    has_sqf = first.sqf_bits is not None
    if all(s.length % 8 == 0 for s in segments[:-1]):
        return SieveSegment(
            start=first.start,
            length=sum(s.length for s in segments),
            lam_bits=np.concatenate([s.lam_bits for s in segments]),
            mu_bits=np.concatenate([s.mu_bits for s in segments]),
            sqf_bits=np.concatenate([s.sqf_bits for s in segments]) if has_sqf else None,
            w=first.w,
        )

    return SieveSegment.from_values(
        first.start,
        np.concatenate([s.lambda_values() for s in segments]),
        np.concatenate([s.mu_values() for s in segments]),
        np.concatenate([s.squarefree_w_values() for s in segments]) if has_sqf else None,
        first.w,
    )


def _sieve_block(start: int, length: int, w: int | None, primes: np.ndarray) -> SieveSegment:
    end = start + length - 1
    rem = np.arange(length, dtype=np.uint64) + np.uint64(start)
    parity = np.zeros(length, dtype=np.uint8)
    squarefree = np.ones(length, dtype=bool)
    sqf_w = np.ones(length, dtype=bool) if w is not None else None

    for p in primes.tolist():
        if p * p > end:
            break
        divisor = np.uint64(p)
        pk, k = p, 1
        while pk <= end:
            idx = slice((-start) % pk, None, pk)
            rem[idx] //= divisor
            parity[idx] ^= 1
            if k == 2:
                squarefree[idx] = False
                if sqf_w is not None and p <= w:
                    sqf_w[idx] = False
            pk *= p
            k += 1

    parity ^= (rem > 1).astype(np.uint8)
    lam = (1 - 2 * parity.astype(np.int8)).astype(np.int8)
    mu = np.where(squarefree, lam, 0).astype(np.int8)
    return SieveSegment.from_values(start, lam, mu, sqf_w, w)


def plan_blocks(start: int, length: int, block: int) -> list[tuple[int, int]]:
    block = max(8, block - block % 8)
    return [(s, min(block, start + length - s)) for s in range(start, start + length, block)]


def sieve_range(
    start: int,
    length: int,
    w: int | None = None,
    *,
    block: int = DEFAULT_BLOCK,
    workers: int = 1,
) -> SieveSegment:
    """Sieve [start, start + length) block by block and join the results.

    Blocks are independent; the joined segment does not depend on ``block``
    or ``workers``.
    """
    end = check_range(start, length)
    if w is not None and w < 2:
        raise ParameterError(f"w must be >= 2, got {w}")
    primes = primes_upto(isqrt(end))
    plan = plan_blocks(start, length, block)
    logger.debug("Sieving [%d, %d] in %d blocks", start, end, len(plan))
    parts = map_ordered(lambda b: _sieve_block(b[0], b[1], w, primes), plan, workers)
    return join_segments(parts)


def sieve_lambda(start: int, length: int, **kwargs) -> SieveSegment:
    """λ(n) = (-1)^Ω(n) over [start, start + length)."""
    return sieve_range(start, length, **kwargs)


def sieve_mu(start: int, length: int, **kwargs) -> SieveSegment:
    """μ(n) over [start, start + length): λ(n) on squarefree n, else 0."""
    return sieve_range(start, length, **kwargs)


def sieve_squarefree_w(start: int, length: int, w: int, **kwargs) -> SieveSegment:
    """The μ²_w indicator: 1 exactly when no prime p <= w has p² | n."""
    if w < 2:
        raise ParameterError(f"w must be >= 2, got {w}")
    return sieve_range(start, length, w, **kwargs)


def iter_segments(
    start: int,
    length: int,
    *,
    block: int = DEFAULT_BLOCK,
    overlap: int = 0,
    w: int | None = None,
) -> Iterator[SieveSegment]:
    """Stream sieved blocks covering [start, start + length).

    Each yielded segment extends ``overlap`` integers past its block so that
    windowed statistics can look ahead without re-sieving.
    """
    end = check_range(start, length, extra=overlap)
    primes = primes_upto(isqrt(end))
    for s, n in plan_blocks(start, length, block):
        yield _sieve_block(s, n + overlap, w, primes)
