from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chowla.config import LabConfig
from chowla.errors import ParameterError
from chowla.intervals import (
    TwistSpec,
    chi3_endgame,
    interval_profile,
    mu_chi_coincidence,
    sliding_sums,
    twist_value,
    twist_values,
    twisted_values,
)
from chowla.sieve import factor_oracle


def naive_lambda(n):
    return factor_oracle(n).liouville


def naive_mu(n):
    return factor_oracle(n).mobius


# --- Twists ---


def test_twist_examples():
    chi3 = TwistSpec("chi3")
    assert twist_value(6, chi3) == 0
    assert twist_value(5, chi3) == -1
    assert twist_value(1, chi3) == 1
    assert twist_value(8, TwistSpec("chi_eps", 1)) == -1
    assert twist_value(8, TwistSpec("chi_eps", -1)) == 1
    assert twist_value(12, TwistSpec("chi_eps", 1)) == 1
    assert twist_value(7, TwistSpec()) == 1


def test_twist_rejects_bad_input():
    with pytest.raises(ParameterError):
        TwistSpec("chi5")
    with pytest.raises(ParameterError):
        TwistSpec("chi_eps", 0)
    with pytest.raises(ParameterError):
        twist_value(0, TwistSpec("chi3"))


@pytest.mark.parametrize("twist", [TwistSpec(), TwistSpec("chi3"), TwistSpec("chi_eps", 1), TwistSpec("chi_eps", -1)])
def test_vectorised_twist_matches_scalar(twist):
    n = np.arange(1, 3000, dtype=np.int64)
    expected = [twist_value(int(k), twist) for k in n]
    assert twist_values(n, twist).tolist() == expected


@given(st.integers(1, 10**6), st.integers(1, 10**6))
def test_chi_eps_is_completely_multiplicative(a, b):
    twist = TwistSpec("chi_eps", 1)
    assert twist_value(a * b, twist) == twist_value(a, twist) * twist_value(b, twist)


# --- Sliding sums ---


def test_sliding_sums_match_recomputation(rng):
    values = twisted_values(1, 200_000, "lambda", TwistSpec("chi3"))
    h = 91
    sums = sliding_sums(values, h)
    assert sums.size == values.size - h + 1
    for i in rng.integers(0, sums.size, size=1000):
        assert sums[i] == int(values[i : i + h].astype(np.int64).sum())


def test_sliding_sums_rejects_zero_length():
    with pytest.raises(ParameterError):
        sliding_sums(np.ones(5, dtype=np.int8), 0)


# --- Profiles ---


def test_unit_interval_has_mean_one():
    profile = interval_profile("lambda", 1, (1, 5000))
    assert profile.mean_abs == 1.0
    assert profile.quantiles == {50: 1.0, 90: 1.0, 99: 1.0}
    assert profile.exceed_fraction(0.2) == 1.0


def test_mu_profile_matches_naive_scan():
    h, lo, hi = 4, 1, 100
    profile = interval_profile("mu", h, (lo, hi))
    sums = [abs(sum(naive_mu(n + j) for j in range(h))) for n in range(lo, hi + 1)]
    assert profile.count == hi - lo + 1
    assert profile.mean_abs == pytest.approx(float(Fraction(sum(sums), h * len(sums))), abs=1e-15)
    assert profile.histogram.tolist() == [sums.count(v) for v in range(h + 1)]


def test_lambda_profile_matches_naive_oracle():
    h, N = 25, 10_000
    lam = np.array([naive_lambda(n) for n in range(1, N + h)], dtype=np.int64)
    total = sum(abs(int(lam[i : i + h].sum())) for i in range(N))
    profile = interval_profile("lambda", h, (1, N), block=4096)
    assert abs(profile.mean_abs - total / (h * N)) < 1e-12


def test_profile_independent_of_block_and_workers():
    a = interval_profile("lambda", 50, (1, 30_000), TwistSpec("chi3"), block=1 << 20)
    b = interval_profile("lambda", 50, (1, 30_000), TwistSpec("chi3"), block=1000, workers=3)
    assert a.histogram.tolist() == b.histogram.tolist()
    assert a.to_dict() == b.to_dict()


def test_profiles_merge_over_adjacent_windows():
    whole = interval_profile("mu", 30, (1, 20_000))
    left = interval_profile("mu", 30, (1, 7_000))
    right = interval_profile("mu", 30, (7_001, 20_000))
    merged = left.merge(right)
    assert merged.window == (1, 20_000)
    assert merged.histogram.tolist() == whole.histogram.tolist()
    with pytest.raises(ParameterError):
        right.merge(left)


def test_profile_invariants():
    profile = interval_profile("lambda", 40, (1, 20_000))
    assert 0.0 <= profile.mean_abs <= 1.0
    exceed = [profile.exceed_fraction(e) for e in (0.0, 0.05, 0.1, 0.2, 0.5, 1.0)]
    assert all(x >= y for x, y in zip(exceed, exceed[1:]))
    assert exceed[-1] == 0.0
    q = profile.quantiles
    assert q[50] <= q[90] <= q[99]
    d = profile.to_dict()
    assert set(d) == {"function", "twist", "h", "window", "mean_abs", "quantiles", "exceed"}
    assert set(d["quantiles"]) == {"50", "90", "99"}


def test_longer_intervals_average_smaller():
    short = interval_profile("lambda", 10, (1, 200_000))
    long = interval_profile("lambda", 1000, (1, 200_000))
    assert long.mean_abs < short.mean_abs


@pytest.mark.parametrize(
    "kwargs",
    [
        {"fn": "lambda", "h": 0, "window": (1, 100)},
        {"fn": "lambda", "h": 10, "window": (1, 5)},
        {"fn": "lambda", "h": 2, "window": (0, 100)},
        {"fn": "omega", "h": 2, "window": (1, 100)},
    ],
)
def test_profile_rejects_bad_parameters(kwargs):
    with pytest.raises(ParameterError):
        interval_profile(**kwargs)


# --- Endgame and coincidences ---


def test_chi3_endgame_small_scale():
    result = chi3_endgame(5, 50_000)
    assert result["scenario"] == 10
    assert result["ratio"] < 0.5
    assert result["ratio"] == pytest.approx(result["mean_abs_sum"] / 10)


def test_mu_chi_coincidence_matches_enumeration():
    twist = TwistSpec("chi_eps", 1)
    pairs = same = 0
    for n in range(1, 31):
        a, b = naive_mu(n), naive_mu(n + 1)
        if a and b:
            pairs += 1
            same += a * twist_value(n, twist) == b * twist_value(n + 1, twist)
    result = mu_chi_coincidence(30, 1)
    assert (result.pairs, result.coincidences) == (pairs, same)
    assert result.fraction == pytest.approx(same / pairs)


def test_mu_chi_coincidence_absent_for_empty_window():
    result = mu_chi_coincidence(49, 1, lo=48)
    assert result.pairs == 0
    assert result.fraction is None
    assert result.to_dict()["fraction"] is None


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 5000), st.integers(1, 3000), st.sampled_from([1, -1]))
def test_mu_chi_coincidence_block_independent(lo, width, eps):
    a = mu_chi_coincidence(lo + width, eps, lo=lo)
    b = mu_chi_coincidence(lo + width, eps, lo=lo, block=64)
    assert a.to_dict() == b.to_dict()


@pytest.mark.slow
@pytest.mark.parametrize("twist", [TwistSpec(), TwistSpec("chi3")], ids=["lambda", "lambda_chi3"])
def test_interval_acceptance_at_scale(twist):
    ceiling = LabConfig().tolerance("short_interval_ceiling")
    short = interval_profile("lambda", 10, (1, 10**7), twist)
    long = interval_profile("lambda", 1000, (1, 10**7), twist)
    assert long.mean_abs < short.mean_abs
    assert long.mean_abs < ceiling


@pytest.mark.slow
def test_endgame_and_coincidence_at_scale():
    assert chi3_endgame(30, 10**7)["ratio"] < 0.5
    assert abs(mu_chi_coincidence(10**7, 1).fraction - 0.5) < 0.02
