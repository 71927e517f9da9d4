import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chowla.errors import CacheFormatError, ParameterError, RangeError
from chowla.sieve import (
    factor_oracle,
    is_prime,
    primes_in,
    primes_upto,
    read_segment,
    segment_checksum,
    sieve_lambda,
    sieve_mu,
    sieve_range,
    sieve_squarefree_w,
    write_segment,
)
from chowla.sieve.cache import decode_segment, encode_segment, load_or_sieve
from chowla.sieve.segment import U64_MAX, iter_segments, join_segments


# --- Examples ---


def test_lambda_first_ten():
    seg = sieve_lambda(1, 10)
    assert seg.lambda_values().tolist() == [1, -1, -1, 1, -1, 1, -1, -1, 1, 1]


def test_lambda_of_one():
    assert sieve_lambda(1, 1).lambda_at(1) == 1


def test_mu_first_ten():
    assert sieve_mu(1, 10).mu_values().tolist() == [1, -1, -1, 0, -1, 1, -1, 0, 0, 1]


def test_mu_of_four():
    assert sieve_mu(4, 1).mu_at(4) == 0


def test_window_at_one_million_matches_oracle():
    seg = sieve_range(10**6, 1000)
    lam = seg.lambda_values()
    mu = seg.mu_values()
    for i, n in enumerate(range(10**6, 10**6 + 1000)):
        f = factor_oracle(n)
        assert lam[i] == f.liouville
        assert mu[i] == f.mobius


def test_squarefree_w_only_checks_small_primes():
    assert sieve_squarefree_w(9, 1, 2).squarefree_w_values().tolist() == [True]
    assert sieve_squarefree_w(4, 1, 2).squarefree_w_values().tolist() == [False]


def test_squarefree_w_density():
    seg = sieve_squarefree_w(1, 10**4, 50)
    expected = math.prod(1 - 1 / p**2 for p in primes_upto(50).tolist())
    assert abs(seg.squarefree_w_values().mean() - expected) < 0.02


def test_squarefree_w_below_two_rejected():
    with pytest.raises(ParameterError):
        sieve_squarefree_w(1, 10, 1)


def test_range_overflow_rejected():
    with pytest.raises(RangeError):
        sieve_lambda(U64_MAX - 5, 10)


def test_bad_range_rejected():
    with pytest.raises(ParameterError):
        sieve_lambda(0, 10)
    with pytest.raises(ParameterError):
        sieve_mu(5, 0)


def test_factor_oracle_examples():
    assert factor_oracle(60).prime_powers == [(2, 2), (3, 1), (5, 1)]
    assert factor_oracle(1).prime_powers == []
    assert factor_oracle(999983).prime_powers == [(999983, 1)]


def test_factor_oracle_large_semiprime():
    p, q = 4294967291, 4294967279
    f = factor_oracle(p * q)
    assert f.prime_powers == [(q, 1), (p, 1)]
    assert f.value() == p * q


def test_factor_oracle_rejects_zero_and_overflow():
    with pytest.raises(ParameterError):
        factor_oracle(0)
    with pytest.raises(RangeError):
        factor_oracle(U64_MAX + 1)


def test_is_prime_against_table():
    table = set(primes_upto(5000).tolist())
    assert all(is_prime(n) == (n in table) for n in range(5000))


def test_primes_in_segmented_matches_base():
    lo, hi = (1 << 20) - 1000, (1 << 20) + 5000
    got = primes_in(lo, hi).tolist()
    assert got == [n for n in range(lo, hi + 1) if is_prime(n)]


# --- Invariants ---


def test_mu_is_lambda_on_squarefree(small_segment):
    lam = small_segment.lambda_values()
    mu = small_segment.mu_values()
    nonzero = mu != 0
    assert np.array_equal(mu[nonzero], lam[nonzero])


def test_small_segment_matches_oracle(small_segment, oracle_values):
    lam, mu = oracle_values
    assert small_segment.lambda_values()[:2000].tolist() == lam
    assert small_segment.mu_values()[:2000].tolist() == mu


def test_complete_multiplicativity(small_segment, rng):
    lam = small_segment.lambda_values()
    m = rng.integers(1, 141, size=10_000)
    n = rng.integers(1, 141, size=10_000)
    assert np.array_equal(lam[m * n - 1], lam[m - 1] * lam[n - 1])


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 10**10), st.integers(1, 600))
def test_segment_boundary_independence(a, half):
    whole = sieve_range(a, 2 * half, 7)
    parts = sieve_range(a, half, 7).concat(sieve_range(a + half, half, 7))
    assert whole == parts


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 10**9), st.integers(1, 3000), st.sampled_from([8, 64, 1000]))
def test_block_size_does_not_change_result(a, length, block):
    assert sieve_range(a, length, block=block) == sieve_range(a, length, block=1 << 20)


def test_worker_count_does_not_change_result():
    serial = sieve_range(10**8, 50_000, 50, block=4096)
    threaded = sieve_range(10**8, 50_000, 50, block=4096, workers=4)
    assert serial == threaded


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 10**10), st.integers(1, 40))
def test_oracle_agrees_with_sieve_on_random_windows(a, length):
    seg = sieve_range(a, length)
    for i, n in enumerate(range(a, a + length)):
        f = factor_oracle(n)
        assert seg.lambda_at(n) == f.liouville
        assert seg.mu_at(n) == f.mobius
        assert seg.lambda_values()[i] == f.liouville


def test_slice_and_join(small_segment):
    left = small_segment.slice(1, 101)
    right = small_segment.slice(101, 251)
    assert join_segments([left, right]) == small_segment.slice(1, 251)


def test_iter_segments_with_overlap():
    blocks = list(iter_segments(1, 100, block=32, overlap=5))
    assert [b.start for b in blocks] == [1, 33, 65, 97]
    assert [b.length for b in blocks] == [37, 37, 37, 9]
    full = sieve_range(1, 105)
    for b in blocks:
        assert b == full.slice(b.start, b.stop)


def test_summary_counts(small_segment):
    s = small_segment.summary()
    assert s["lambda_plus"] + s["lambda_minus"] == 20_000
    assert s["mu_plus"] + s["mu_zero"] + s["mu_minus"] == 20_000
    assert s["w"] == 50


@pytest.mark.slow
def test_squarefree_density_at_ten_million():
    seg = sieve_range(1, 10**7, workers=2)
    assert abs(seg.squarefree_values().mean() - 6 / math.pi**2) < 0.002


# --- Binary cache ---


def test_cache_header_layout():
    seg = sieve_range(1, 10, 3)
    data = encode_segment(seg)
    assert data[:4] == b"LMSG"
    assert data[4] == 1
    assert int.from_bytes(data[5:13], "little") == 1
    assert int.from_bytes(data[13:21], "little") == 10
    assert int.from_bytes(data[21:29], "little") == 3
    assert len(data) == 29 + 2 + 3 + 2
    # λ(1..8) = + - - + - + - -  ->  bits 0,1,1,0,1,0,1,1
    assert data[29] == 0b11010110


def test_cache_without_w_omits_mask():
    seg = sieve_range(5, 16)
    data = encode_segment(seg)
    assert int.from_bytes(data[21:29], "little") == 0
    assert len(data) == 29 + 2 + 4
    assert decode_segment(data) == seg


def test_cache_file_round_trip(tmp_path):
    seg = sieve_range(10**6, 777, 50)
    path = tmp_path / "seg.lmsg"
    digest = write_segment(seg, path)
    assert digest == segment_checksum(path)
    assert read_segment(path) == seg
    assert list(tmp_path.iterdir()) == [path]


def test_cache_rejects_corruption():
    data = encode_segment(sieve_range(1, 64))
    with pytest.raises(CacheFormatError):
        decode_segment(b"XXXX" + data[4:])
    with pytest.raises(CacheFormatError):
        decode_segment(data[:-1])


def test_load_or_sieve_reuses_cache(tmp_path):
    seg, digest = load_or_sieve(100, 500, 50, directory=tmp_path)
    again, digest2 = load_or_sieve(100, 500, 50, directory=tmp_path)
    assert seg == again
    assert digest == digest2
