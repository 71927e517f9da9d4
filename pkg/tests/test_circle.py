import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chowla.circle import (
    TripleSpec,
    brute_force_triples,
    count_triples,
    count_triples_in_classes,
    enumerate_triples,
    euler_phi,
    f_value,
    fg_values,
    g_value,
    lattice_count,
    main_term_prediction,
    singular_series,
)
from chowla.circle.triples import lattice_count_direct
from chowla.errors import ParameterError, SingularityError

# --- Triples ---


def test_small_scale_count_matches_brute_force():
    spec = TripleSpec(10, 1)
    assert count_triples(spec) == brute_force_triples(spec)
    assert (11, 53, 41) in enumerate_triples(1, 10)
    assert len(enumerate_triples(1, 10)) == count_triples(spec)


def test_even_m_rejected():
    with pytest.raises(ParameterError):
        TripleSpec(50, 2)
    with pytest.raises(ParameterError):
        TripleSpec(50, 51)


@settings(max_examples=20, deadline=None)
@given(
    st.integers(20, 200).flatmap(
        lambda X: st.tuples(
            st.just(X),
            st.integers(-X, X).filter(lambda m: m % 2),
            st.integers(-50, 50),
            st.sampled_from([1, 2, 3, 7, 50]),
        )
    )
)
def test_count_matches_three_loop_oracle(params):
    X, m, A, w = params
    spec = TripleSpec(X, m, A, w)
    assert count_triples(spec) == brute_force_triples(spec)


def test_count_nonincreasing_in_w():
    counts = [count_triples(TripleSpec(150, 7, 3, w)) for w in (1, 2, 3, 5, 7, 11, 50)]
    assert all(a >= b for a, b in zip(counts, counts[1:]))


def test_count_independent_of_workers():
    spec = TripleSpec(300, -5, 11, 7)
    assert count_triples(spec) == count_triples(spec, workers=4)


def test_classes_with_trivial_modulus_reduce_to_plain_count():
    assert count_triples_in_classes(TripleSpec(120, 3, k=1)) == count_triples(TripleSpec(120, 3))


def test_classes_avoided_by_primes():
    # p1 ≡ 3 (mod 9) forces 3 | p1
    assert count_triples_in_classes(TripleSpec(100, 1, k=3, a1=3, a2=1)) == 0


def test_classes_match_brute_force():
    spec = TripleSpec(90, 5, 2, 3, k=3, a1=1, a2=4)
    assert count_triples_in_classes(spec) == brute_force_triples(spec)


def test_classes_reject_non_squarefree_modulus():
    with pytest.raises(ParameterError):
        count_triples_in_classes(TripleSpec(50, 1, k=4))
    with pytest.raises(ParameterError):
        TripleSpec(50, 1, k=0)


# --- Lattice count ---


def test_lattice_count_small_box():
    assert lattice_count(-1, 1) == 3
    assert lattice_count(4, 1) == 0
    assert lattice_count(-4, 1) == 0


@pytest.mark.parametrize("X", range(1, 51))
def test_lattice_counts_sum_to_box_volume(X):
    assert sum(lattice_count(m, X) for m in range(-3 * X - 2, 3 * X + 3)) == 8 * X**3
    assert lattice_count(3 * X + 1, X) == lattice_count(-3 * X - 1, X) == 0


@pytest.mark.parametrize("X", [1, 2, 5, 9])
def test_lattice_count_matches_enumeration(X):
    for m in range(-3 * X - 1, 3 * X + 2):
        assert lattice_count(m, X) == lattice_count_direct(m, X)


# --- Singular series and f, g ---


def test_singular_series_at_one_is_stable():
    coarse = singular_series(1, 100_000).value
    fine = singular_series(1, 1_000_000).value
    assert abs(coarse - fine) < 1e-6
    assert 2 < coarse < 2 * math.exp(sum(1 / (p - 1) ** 3 for p in (3, 5, 7)) + 0.01)


def test_singular_ratio_three_to_one():
    ratio = singular_series(3).value / singular_series(1).value
    assert ratio == pytest.approx(2 / 3, rel=1e-12)
    assert Fraction(3, 4) / Fraction(9, 8) == Fraction(2, 3)


@given(st.integers(-(10**9), 10**9).filter(lambda m: m % 2))
@settings(max_examples=25, deadline=None)
def test_singular_series_positive(m):
    data = singular_series(m, 1000)
    assert data.value > 0
    assert data.tail_bound == 2 / 1000**2


def test_singular_series_includes_large_divisors():
    p = 1_000_003
    data = singular_series(p, 1000)
    base = singular_series(1, 1000).value
    assert p in data.divisors
    assert data.value == pytest.approx(base * (1 - 1 / (p - 1) ** 2), rel=1e-12)


def test_singular_series_rejects_even_and_small_cutoff():
    with pytest.raises(ParameterError):
        singular_series(4)
    with pytest.raises(ParameterError):
        singular_series(0)
    with pytest.raises(ParameterError):
        singular_series(1, 50)


def test_fg_at_three():
    assert fg_values(3) == (Fraction(3, 2), Fraction(8, 9))


def test_f_at_two_is_singular():
    with pytest.raises(SingularityError):
        fg_values(2)
    with pytest.raises(SingularityError):
        f_value(6)
    assert g_value(2) == Fraction(1, 2)


def test_g_tends_to_one():
    values = [fg_values(p)[1] for p in (3, 5, 7, 11, 101)]
    assert all(a < b for a, b in zip(values, values[1:]))
    assert 0.999999 < values[-1] < 1


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13, 101, 997])
def test_fg_product_identity(p):
    f, g = fg_values(p)
    assert f * g == 1 / (1 - Fraction(1, (p - 1) ** 2))


def test_multiplicative_extensions():
    assert f_value(15) == f_value(3) * f_value(5)
    assert g_value(1) == f_value(1) == 1
    assert euler_phi(1) == 1
    assert euler_phi(36) == 12
    with pytest.raises(ParameterError):
        f_value(9)


# --- Main term ---


def test_main_term_vanishes_off_classes():
    term = main_term_prediction(TripleSpec(100, 1, k=3, a1=3, a2=1))
    assert not term.indicator
    assert term.prediction == 0


def test_main_term_trivial_modulus():
    X = 500
    term = main_term_prediction(TripleSpec(X, 1))
    expected = lattice_count(1, X) * singular_series(1).value / math.log(X) ** 3
    assert term.prediction == pytest.approx(expected, rel=1e-12)
    d = term.to_dict()
    assert {"X", "m", "A", "w", "k", "a1", "a2", "G_m", "S_m", "prediction", "tail_bound"} <= set(d)


@pytest.mark.slow
def test_circle_acceptance_at_scale():
    X = 2000
    observed = count_triples(TripleSpec(X, 1, 0, 50))
    assert 0.3 <= observed / (X**2 / math.log(X) ** 3) <= 3
    plain = count_triples(TripleSpec(X, 1))
    predicted = main_term_prediction(TripleSpec(X, 1)).prediction
    assert 0.5 <= plain / predicted <= 2
    classes = TripleSpec(X, 1, k=3, a1=1, a2=1)
    ratio = count_triples_in_classes(classes) / main_term_prediction(classes).prediction
    assert 1 / 3 <= ratio <= 3
