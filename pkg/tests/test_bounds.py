"""Bound formulas: collapses, orderings, and the applicability frontier."""

from fractions import Fraction

import pytest

from forkjoinq.analytic import QueueSpec, harmonics, nelson_basic
from forkjoinq.bounds import (
    ExpOrderMoments,
    bound_set,
    naive_upper,
    refined_upper,
    split_merge_lower,
    split_merge_lower_from_moments,
    split_merge_upper,
    split_merge_upper_from_moments,
    staging_lower,
)
from forkjoinq.coeffs import w_table
from forkjoinq.errors import DomainError, InapplicableError, InstabilityError

F = Fraction


def pspec(n, k, lam, mu=1, service="exponential"):
    return QueueSpec(n=n, k=k, lam=lam, mu=mu, variant="purging", service=service)


def test_exponential_order_moments():
    m = ExpOrderMoments.exponential(3, 2, 1)
    dh = harmonics.h(3) - harmonics.h(1)
    dh2 = harmonics.h2(3) - harmonics.h2(1)
    assert m.mean == dh
    assert m.second_moment == dh2 + dh * dh
    for n in (4, 9):
        means = [ExpOrderMoments.exponential(n, k, 1).mean for k in range(1, n + 1)]
        seconds = [ExpOrderMoments.exponential(n, k, 1).second_moment for k in range(1, n + 1)]
        assert all(b > a for a, b in zip(means, means[1:]))
        assert all(b > a for a, b in zip(seconds, seconds[1:]))
        for mean, second in zip(means, seconds):
            assert second >= mean * mean


def test_split_merge_k1_is_exact_mm1_at_rate_n_mu():
    for n in (2, 3, 10, 25):
        for lam in (0, F(1, 2), F(7, 10)):
            up = split_merge_upper(pspec(n, 1, lam))
            lo = split_merge_lower(pspec(n, 1, lam))
            assert up == lo == F(1) / (n - lam)


def test_split_merge_upper_zero_load():
    assert split_merge_upper(pspec(2, 1, 0)) == F(1, 2)


def test_split_merge_applicability_frontier():
    # Inapplicable exactly when rho >= 1/(H_n - H_{n-k}).
    for n in (10, 25):
        for k in (2, n // 2, n):
            threshold = 1 / (harmonics.h(n) - harmonics.h(n - k))
            for rho in (F(1, 10), F(1, 2), F(7, 10), F(9, 10)):
                sp = pspec(n, k, rho)
                got = split_merge_upper(sp)
                if rho >= threshold:
                    assert got is None
                else:
                    assert got is not None
    assert split_merge_upper(pspec(25, 25, F(7, 10))) is None


def test_naive_upper_matches_lifted_nelson():
    t = w_table(3)
    assert naive_upper(pspec(3, 2, 0), t) == F(5, 6)
    # purging (n,n) equates to non-purging (n,n): the naive bound is the
    # basic-queue estimate itself
    t25 = w_table(25)
    assert naive_upper(pspec(25, 25, F(1, 2)), t25) == nelson_basic(25, F(1, 2), 1).value


def test_naive_upper_finite_where_split_merge_is_not():
    t = w_table(25)
    sp = pspec(25, 20, F(7, 10))
    assert split_merge_upper(sp) is None
    value = naive_upper(sp, t)
    assert value > 0


def test_refined_upper_branches():
    t25 = w_table(25)
    # small rho, small k: the split-merge side is the tighter one
    sp = pspec(25, 2, F(1, 10))
    sm = split_merge_upper(sp)
    assert refined_upper(sp, t25) == min(naive_upper(sp, t25), sm)
    assert sm < naive_upper(sp, t25)
    # k = n: split-merge explodes, the naive branch takes over
    sp = pspec(25, 25, F(7, 10))
    assert refined_upper(sp, t25) == naive_upper(sp, t25)
    # n = k = 1: M/M/1, exactly 2 at rho = 1/2
    assert refined_upper(pspec(1, 1, F(1, 2)), w_table(1)) == 2


def test_staging_lower_values():
    assert staging_lower(pspec(1, 1, F(1, 2))) == 2
    for n in (3, 10):
        for k in range(1, n + 1):
            assert staging_lower(pspec(n, k, 0)) == harmonics.h(n) - harmonics.h(n - k)


def test_staging_dominates_split_merge_lower():
    for n in (5, 25, 30):
        for k in range(2, n + 1, 3):
            for rho in (F(1, 10), F(1, 2), F(9, 10)):
                sp = pspec(n, k, rho)
                assert staging_lower(sp) > split_merge_lower(sp)
    # equality at k = 1
    sp = pspec(25, 1, F(7, 10))
    assert staging_lower(sp) == split_merge_lower(sp)


def test_bound_ordering_grid():
    for n in (5, 15, 30):
        t = w_table(n)
        for k in range(2, n + 1, 2):
            for rho in (F(1, 10), F(3, 10), F(1, 2), F(7, 10), F(9, 10)):
                sp = pspec(n, k, rho)
                lo_sm = split_merge_lower(sp)
                lo_st = staging_lower(sp)
                up_rf = refined_upper(sp, t)
                up_nv = naive_upper(sp, t)
                assert lo_sm <= lo_st <= up_rf <= up_nv


def test_staging_requires_exponential_service():
    with pytest.raises(InapplicableError):
        staging_lower(pspec(3, 2, F(1, 2), service="deterministic"))
    with pytest.raises(InapplicableError):
        split_merge_upper(pspec(3, 2, F(1, 2), service="weibull:2"))


def test_moment_injection_interface():
    # Exponential moments fed through the injection API must reproduce the
    # closed forms, and the API accepts arbitrary caller-supplied moments.
    sp = pspec(4, 2, F(1, 2))
    m = ExpOrderMoments.exponential(4, 2, 1)
    m1 = ExpOrderMoments.exponential(4, 1, 1)
    assert split_merge_upper_from_moments(sp.lam, m.mean, m.second_moment) == split_merge_upper(sp)
    assert (
        split_merge_lower_from_moments(sp.lam, m.mean, m1.mean, m1.second_moment)
        == split_merge_lower(sp)
    )
    assert split_merge_upper_from_moments(F(1), F(2), F(5)) is None


def test_instability_and_variant_guards():
    with pytest.raises(InstabilityError):
        staging_lower(pspec(3, 2, 1))
    with pytest.raises(InstabilityError):
        split_merge_lower(pspec(3, 2, "1.2"))
    with pytest.raises(DomainError):
        bound_set(QueueSpec(3, 2, "0.5", 1, variant="non-purging"), w_table(3))


def test_bound_set_assembly():
    t = w_table(25)
    b = bound_set(pspec(25, 25, F(7, 10)), t)
    assert b.split_merge_upper is None
    assert "split_merge_upper" in b.notes
    assert b.refined_upper == b.naive_upper
    assert b.split_merge_lower <= b.staging_lower <= b.refined_upper

    b1 = bound_set(pspec(25, 1, F(7, 10)), t)
    assert b1.split_merge_upper == b1.split_merge_lower == 1 / F(25 - F(7, 10))
    assert b1.refined_upper == b1.split_merge_upper

    b0 = bound_set(pspec(3, 2, 0), w_table(3))
    assert b0.split_merge_lower <= b0.staging_lower <= b0.refined_upper <= b0.naive_upper
