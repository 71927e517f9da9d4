from chowla.sieve.cache import read_segment, segment_checksum, write_segment
from chowla.sieve.oracle import Factorization, factor_oracle, is_prime
from chowla.sieve.primes import primes_in, primes_upto
from chowla.sieve.segment import (
    SieveSegment,
    iter_segments,
    sieve_lambda,
    sieve_mu,
    sieve_range,
    sieve_squarefree_w,
)

__all__ = [
    "Factorization",
    "SieveSegment",
    "factor_oracle",
    "is_prime",
    "iter_segments",
    "primes_in",
    "primes_upto",
    "read_segment",
    "segment_checksum",
    "sieve_lambda",
    "sieve_mu",
    "sieve_range",
    "sieve_squarefree_w",
    "write_segment",
]
