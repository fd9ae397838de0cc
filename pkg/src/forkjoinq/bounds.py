"""Upper and lower bounds for purging (n,k) fork-join queues.

A purging queue never queues more work than its non-purging twin, so the
lifted Nelson sum for the non-purging queue is an upper bound (the "naive"
bound, finite for every rho < 1). The split-merge system, which blocks all
servers on the head job, bounds from both sides through M/G/1-style terms
built on order statistics of the service time:

  upper:  E[X_(n,k)] + lam E[X_(n,k)^2] / (2 (1 - lam E[X_(n,k)]))
  lower:  E[X_(n,k)] + lam E[X_(n,1)^2] / (2 (1 - lam E[X_(n,1)]))

The split-merge upper bound diverges as lam approaches 1/E[X_(n,k)] and is
meaningless past it, so the refined bound takes the minimum where applicable
and falls back to the naive bound elsewhere. For exponential service the
moments are harmonic-number expressions, and a staging argument gives a lower
bound that strictly dominates the split-merge one for k > 1:

  (H_n - H_{n-k})/mu + rho (H-weighted(n) - H-weighted(n-k))/mu,
  H-weighted(m) = sum_{i=1..m} 1/(i(i-rho)).

k = 1 collapses everything: purging (n,1) is an M/M/1 at rate n*mu and the
split-merge bounds coincide with the exact value 1/(n*mu - lam).

All bounds are evaluated in exact rational arithmetic. An inapplicable
split-merge upper bound is returned as None, not as infinity.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .analytic import QueueSpec, harmonics, nelson_lt
from .coeffs import WTable
from .errors import DomainError, InapplicableError, InstabilityError

__all__ = [
    "ExpOrderMoments",
    "BoundSet",
    "naive_upper",
    "split_merge_upper",
    "split_merge_upper_from_moments",
    "refined_upper",
    "split_merge_lower",
    "split_merge_lower_from_moments",
    "staging_lower",
    "bound_set",
]


@dataclass(frozen=True)
class ExpOrderMoments:
    """First two moments of the k-th smallest of n iid exponential(mu) draws.

    mean = (H_n - H_{n-k}) / mu
    second_moment = [(H2_n - H2_{n-k}) + (H_n - H_{n-k})^2] / mu^2
    """

    n: int
    k: int
    mu: Fraction
    mean: Fraction
    second_moment: Fraction

    @classmethod
    def exponential(cls, n: int, k: int, mu) -> "ExpOrderMoments":
        from .analytic import as_rate

        mu = as_rate(mu)
        if mu <= 0:
            raise DomainError("service rate mu must be positive")
        if not 1 <= k <= n:
            raise DomainError(f"need 1 <= k <= n, got k={k}, n={n}")
        dh = harmonics.h(n) - harmonics.h(n - k)
        dh2 = harmonics.h2(n) - harmonics.h2(n - k)
        return cls(n=n, k=k, mu=mu, mean=dh / mu, second_moment=(dh2 + dh * dh) / (mu * mu))


def _rho_checked(spec: QueueSpec) -> Fraction:
    rho = spec.rho
    if rho >= 1:
        raise InstabilityError(f"rho = {rho} >= 1; bounds require the stability condition rho < 1")
    return rho


def naive_upper(spec: QueueSpec, table: WTable) -> Fraction:
    """Lifted-Nelson sojourn time of the non-purging twin (exact rational, unclipped)."""
    _rho_checked(spec)
    twin = spec.with_variant("non-purging")
    return nelson_lt(twin, table).raw


def split_merge_upper_from_moments(lam: Fraction, mean: Fraction, second_moment: Fraction) -> Fraction | None:
    """M/G/1-style upper bound from caller-supplied order-statistic moments.

    Returns None when lam * mean >= 1 (the bound diverges and then loses
    meaning). This is the injection point for non-exponential service: supply
    numerically computed moments of the k-th order statistic.
    """
    if lam * mean >= 1:
        return None
    return mean + lam * second_moment / (2 * (1 - lam * mean))


def split_merge_upper(spec: QueueSpec) -> Fraction | None:
    """Split-merge upper bound for exponential service; None when inapplicable."""
    _rho_checked(spec)
    _require_exponential(spec)
    m = ExpOrderMoments.exponential(spec.n, spec.k, spec.mu)
    return split_merge_upper_from_moments(spec.lam, m.mean, m.second_moment)


def split_merge_lower_from_moments(
    lam: Fraction, mean_nk: Fraction, mean_n1: Fraction, second_moment_n1: Fraction
) -> Fraction:
    """Split-merge lower bound from caller-supplied moments."""
    if lam * mean_n1 >= 1:
        raise InstabilityError("split-merge lower bound requires lam < 1/E[X_(n,1)]")
    return mean_nk + lam * second_moment_n1 / (2 * (1 - lam * mean_n1))


def split_merge_lower(spec: QueueSpec) -> Fraction:
    """Split-merge lower bound for exponential service (always defined for rho < 1)."""
    _rho_checked(spec)
    _require_exponential(spec)
    m_nk = ExpOrderMoments.exponential(spec.n, spec.k, spec.mu)
    m_n1 = ExpOrderMoments.exponential(spec.n, 1, spec.mu)
    return split_merge_lower_from_moments(spec.lam, m_nk.mean, m_n1.mean, m_n1.second_moment)


def staging_lower(spec: QueueSpec) -> Fraction:
    """Staging-analysis lower bound; exponential (memory-less) service only.

    Tighter than the split-merge lower bound for every k > 1 and equal at
    k = 1.
    """
    rho = _rho_checked(spec)
    _require_exponential(spec)
    n, k, mu = spec.n, spec.k, spec.mu
    base = (harmonics.h(n) - harmonics.h(n - k)) / mu
    stage = rho * (harmonics.h_weighted(n, rho) - harmonics.h_weighted(n - k, rho)) / mu
    return base + stage


def _require_exponential(spec: QueueSpec) -> None:
    if spec.service != "exponential":
        raise InapplicableError(
            f"closed-form moments require exponential service, got {spec.service!r}; "
            "use the *_from_moments variants with caller-supplied moments"
        )


@dataclass
class BoundSet:
    """All applicable bounds for one purging queue, exact rationals.

    ``split_merge_upper`` is None exactly when rho >= 1/(H_n - H_{n-k}).
    ``notes`` records per-bound applicability remarks.
    """

    spec: QueueSpec
    naive_upper: Fraction
    split_merge_upper: Fraction | None
    refined_upper: Fraction
    split_merge_lower: Fraction
    staging_lower: Fraction
    notes: dict[str, str]


def refined_upper(spec: QueueSpec, table: WTable) -> Fraction:
    """Tightest applicable upper bound.

    Falls back to the naive bound where the split-merge bound diverges
    (k >= 2 and rho >= 1/(H_n - H_{n-k})), otherwise takes the smaller of the
    two. k = 1 always returns the split-merge value: there it is the exact
    sojourn time, while the lifted-Nelson sum is at its worst-conditioned
    point and can even go negative.
    """
    sm = split_merge_upper(spec)
    if sm is None:
        return naive_upper(spec, table)
    if spec.k == 1:
        return sm
    return min(naive_upper(spec, table), sm)


def bound_set(spec: QueueSpec, table: WTable) -> BoundSet:
    """Assemble every bound for a purging (n,k) queue."""
    if spec.variant != "purging":
        raise DomainError(f"bounds describe purging queues, got variant {spec.variant!r}")
    naive = naive_upper(spec, table)
    sm_up = split_merge_upper(spec)
    if sm_up is None:
        refined = naive
    elif spec.k == 1:
        refined = sm_up
    else:
        refined = min(naive, sm_up)
    notes = {}
    if sm_up is None:
        notes["split_merge_upper"] = "inapplicable: rho >= 1/(H_n - H_{n-k})"
    if spec.k == 1:
        notes["k=1"] = "split-merge upper and lower coincide with the exact value 1/(n mu - lam)"
    return BoundSet(
        spec=spec,
        naive_upper=naive,
        split_merge_upper=sm_up,
        refined_upper=refined,
        split_merge_lower=split_merge_lower(spec),
        staging_lower=staging_lower(spec),
        notes=notes,
    )
