"""Enumeration-oracle tests: the transformation identity must hold exactly."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from forkjoinq.analytic import harmonics
from forkjoinq.coeffs import w_table
from forkjoinq.errors import DomainError
from forkjoinq.ordstat import (
    DiscreteJointDistribution,
    expected_maximum,
    expected_order_statistic,
    maxima_cdf,
    order_statistic_cdf,
    standard_test_family,
    verify_lt_identity,
)

F = Fraction
HALF = F(1, 2)


def coin(n):
    return DiscreteJointDistribution.iid({0: HALF, 1: HALF}, n)


def all_equal_coin():
    return DiscreteJointDistribution(3, {(0, 0, 0): HALF, (1, 1, 1): HALF}, name="all-equal")


def test_maxima_cdf_examples():
    assert maxima_cdf(coin(2), 2, 0) == F(1, 4)
    d = coin(3)
    assert maxima_cdf(d, 1, max(d.support)) == 1
    assert maxima_cdf(all_equal_coin(), 3, 0) == HALF


def test_order_statistic_cdf_examples():
    assert order_statistic_cdf(coin(2), 1, 0) == F(3, 4)
    d = coin(4)
    for t in d.support:
        assert order_statistic_cdf(d, 4, t) == maxima_cdf(d, 4, t)
    assert order_statistic_cdf(all_equal_coin(), 2, 0) == HALF


def test_order_statistic_cdf_monotone_in_k():
    for d in standard_test_family():
        for k in range(1, d.n):
            for t in d.support:
                assert order_statistic_cdf(d, k, t) >= order_statistic_cdf(d, k + 1, t)


def test_exchangeability_rejected():
    with pytest.raises(DomainError):
        DiscreteJointDistribution(2, {(0, 1): F(3, 4), (1, 0): F(1, 4)})
    with pytest.raises(DomainError):
        DiscreteJointDistribution(2, {(0, 1): F(1, 2), (1, 1): F(1, 2)})
    with pytest.raises(DomainError):
        DiscreteJointDistribution(2, {(0, 0): F(1, 3)})


def test_identity_iid_uniform3_n4():
    d = DiscreteJointDistribution.iid({0: F(1, 3), 1: F(1, 3), 2: F(1, 3)}, 4)
    report = verify_lt_identity(d, w_table(4))
    assert report.passed
    assert report.max_abs_residual == 0


def test_identity_holds_despite_total_dependence():
    report = verify_lt_identity(all_equal_coin(), w_table(3))
    assert report.passed


def test_identity_trivial_n1():
    d = DiscreteJointDistribution.iid({0: HALF, 3: HALF}, 1)
    report = verify_lt_identity(d, w_table(1))
    assert report.passed


def test_identity_standard_family_zero_residual():
    for d in standard_test_family():
        report = verify_lt_identity(d, w_table(d.n))
        assert report.passed, d.name


def test_dimension_mismatch():
    with pytest.raises(DomainError):
        verify_lt_identity(coin(3), w_table(4))


def test_expectations_match_enumeration():
    d = all_equal_coin()
    assert expected_maximum(d, 2) == HALF
    assert expected_order_statistic(d, 1) == HALF


@given(
    st.integers(min_value=2, max_value=5),
    st.lists(st.integers(min_value=1, max_value=6), min_size=2, max_size=3),
    st.integers(min_value=0, max_value=10**6),
)
@settings(max_examples=25, deadline=None, derandomize=True)
def test_identity_on_random_exchangeable_mixtures(n, weights, salt):
    # Random de Finetti mixtures of random two-point marginals: exchangeable,
    # typically dependent, and exactly enumerable.
    total = sum(weights)
    components = []
    for idx, w in enumerate(weights):
        p = F(1 + (salt + idx * 7919) % 9, 10)
        components.append((F(w, total), {0: 1 - p, 1: p}))
    d = DiscreteJointDistribution.mixture(components, n)
    report = verify_lt_identity(d, w_table(n))
    assert report.passed


@pytest.mark.parametrize("n", list(range(1, 21)))
def test_exponential_harmonic_identity(n):
    # E[max of i iid exp(1)] = H_i and E[k-th smallest of n] = H_n - H_{n-k};
    # the weighted identity must reproduce that exactly for every k.
    t = w_table(n)
    for k in range(1, n + 1):
        lhs = sum(t.value(k, i) * harmonics.h(i) for i in range(k, n + 1))
        assert lhs == harmonics.h(n) - harmonics.h(n - k)
