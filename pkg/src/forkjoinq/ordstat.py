"""Brute-force order-statistic checks for small exchangeable distributions.

Everything here runs in exact rational arithmetic over fully enumerated finite
joint distributions, so the transformation identity

    F_{n,k}(t) = sum_{i=k..n} W[n,k,i] * P(max(X_1..X_i) <= t)

(and its expectation form) can be verified with zero residual, including for
dependent variables. Exchangeability, not independence, is the requirement.

Indexing convention: the k-th order statistic is the k-th smallest value
(the k-th to finish), not the k-th largest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations, product

from .coeffs import WTable
from .errors import DomainError

__all__ = [
    "DiscreteJointDistribution",
    "maxima_cdf",
    "order_statistic_cdf",
    "expected_maximum",
    "expected_order_statistic",
    "verify_lt_identity",
    "LTIdentityReport",
    "standard_test_family",
]

Outcome = tuple[int, ...]


class DiscreteJointDistribution:
    """Finite joint distribution of n exchangeable variables.

    ``pmf`` maps length-n outcome tuples to exact probabilities; missing
    outcomes have probability zero. Construction verifies that probabilities
    sum to exactly 1 and that the pmf is permutation-invariant, checked per
    sorted-tuple equivalence class rather than over all n! permutations.
    """

    def __init__(self, n: int, pmf: dict[Outcome, Fraction], name: str = ""):
        if n < 1:
            raise DomainError("n must be >= 1")
        self.n = n
        self.name = name
        self.pmf = {tuple(o): Fraction(p) for o, p in pmf.items() if p != 0}
        for outcome in self.pmf:
            if len(outcome) != n:
                raise DomainError(f"outcome {outcome} does not have length {n}")
        total = sum(self.pmf.values(), Fraction(0))
        if total != 1:
            raise DomainError(f"probabilities sum to {total}, not 1")
        self._check_exchangeable()
        self.support = tuple(sorted({v for o in self.pmf for v in o}))

    def _check_exchangeable(self) -> None:
        classes: dict[Outcome, Fraction] = {}
        for outcome, p in self.pmf.items():
            classes.setdefault(tuple(sorted(outcome)), p)
        for outcome, p in self.pmf.items():
            if classes[tuple(sorted(outcome))] != p:
                raise DomainError(f"pmf is not exchangeable at outcome {outcome}")
        # Every permutation of a support class must carry the class probability;
        # an absent permutation means probability 0, which breaks invariance.
        for rep in classes:
            for perm in _distinct_permutations(rep):
                if self.pmf.get(perm, Fraction(0)) != classes[rep]:
                    raise DomainError(f"pmf is not exchangeable at outcome {perm}")

    # -- constructors ------------------------------------------------------

    @classmethod
    def iid(cls, marginal: dict[int, Fraction], n: int, name: str = "") -> "DiscreteJointDistribution":
        """Product distribution of n independent copies of ``marginal``."""
        values = sorted(marginal)
        pmf: dict[Outcome, Fraction] = {}
        for outcome in product(values, repeat=n):
            p = Fraction(1)
            for v in outcome:
                p *= Fraction(marginal[v])
            pmf[outcome] = p
        return cls(n, pmf, name=name or f"iid-{n}")

    @classmethod
    def mixture(
        cls,
        components: list[tuple[Fraction, dict[int, Fraction]]],
        n: int,
        name: str = "",
    ) -> "DiscreteJointDistribution":
        """Mixture of iid blocks: exchangeable but dependent for >= 2 components."""
        pmf: dict[Outcome, Fraction] = {}
        for weight, marginal in components:
            part = cls.iid(marginal, n)
            for outcome, p in part.pmf.items():
                pmf[outcome] = pmf.get(outcome, Fraction(0)) + Fraction(weight) * p
        return cls(n, pmf, name=name or f"mixture-{n}")

    @classmethod
    def urn(cls, pool: list[int], n: int, name: str = "") -> "DiscreteJointDistribution":
        """n draws without replacement from ``pool``: exchangeable, negatively dependent."""
        if n > len(pool):
            raise DomainError("cannot draw more times than the pool size")
        pmf: dict[Outcome, Fraction] = {}
        denom = math.perm(len(pool), n)
        for seq in _ordered_draws(tuple(sorted(pool)), n):
            pmf[seq] = pmf.get(seq, Fraction(0)) + Fraction(1, denom)
        return cls(n, pmf, name=name or f"urn-{n}")


def _ordered_draws(pool: Outcome, n: int) -> list[Outcome]:
    if n == 0:
        return [()]
    out = []
    for idx, v in enumerate(pool):
        rest = pool[:idx] + pool[idx + 1 :]
        out += [(v,) + tail for tail in _ordered_draws(rest, n - 1)]
    return out


def _distinct_permutations(rep: Outcome) -> set[Outcome]:
    return set(permutations(rep))


# -- exact functionals -----------------------------------------------------


def maxima_cdf(d: DiscreteJointDistribution, i: int, t) -> Fraction:
    """P(X_1 <= t, ..., X_i <= t); by exchangeability any i coordinates do."""
    if not 1 <= i <= d.n:
        raise DomainError(f"i must be in [1, {d.n}], got {i}")
    return sum((p for o, p in d.pmf.items() if all(v <= t for v in o[:i])), Fraction(0))


def order_statistic_cdf(d: DiscreteJointDistribution, k: int, t) -> Fraction:
    """P(k-th smallest <= t) by full outcome enumeration."""
    if not 1 <= k <= d.n:
        raise DomainError(f"k must be in [1, {d.n}], got {k}")
    return sum((p for o, p in d.pmf.items() if sorted(o)[k - 1] <= t), Fraction(0))


def expected_maximum(d: DiscreteJointDistribution, i: int) -> Fraction:
    """E[max(X_1..X_i)] over the first i coordinates."""
    if not 1 <= i <= d.n:
        raise DomainError(f"i must be in [1, {d.n}], got {i}")
    return sum((p * max(o[:i]) for o, p in d.pmf.items()), Fraction(0))


def expected_order_statistic(d: DiscreteJointDistribution, k: int) -> Fraction:
    """E[k-th smallest]."""
    if not 1 <= k <= d.n:
        raise DomainError(f"k must be in [1, {d.n}], got {k}")
    return sum((p * sorted(o)[k - 1] for o, p in d.pmf.items()), Fraction(0))


@dataclass
class LTIdentityReport:
    """Residuals of the transformation identity on one distribution.

    ``cdf_rows`` holds (k, t, lhs, rhs, residual) for every rank and support
    point; ``expectation_rows`` holds (k, lhs, rhs, residual). All entries are
    exact rationals, so ``passed`` means zero residual everywhere.
    """

    distribution: str
    n: int
    cdf_rows: list[tuple[int, object, Fraction, Fraction, Fraction]]
    expectation_rows: list[tuple[int, Fraction, Fraction, Fraction]]

    @property
    def passed(self) -> bool:
        return all(r[-1] == 0 for r in self.cdf_rows) and all(
            r[-1] == 0 for r in self.expectation_rows
        )

    @property
    def max_abs_residual(self) -> Fraction:
        residuals = [abs(r[-1]) for r in self.cdf_rows] + [abs(r[-1]) for r in self.expectation_rows]
        return max(residuals, default=Fraction(0))


def verify_lt_identity(d: DiscreteJointDistribution, table: WTable) -> LTIdentityReport:
    """Check F_{n,k} = sum_i W[n,k,i] P_i and E_{n,k} = sum_i W[n,k,i] E_i exactly."""
    if table.n != d.n:
        raise DomainError(f"table is for n={table.n}, distribution has n={d.n}")
    cdf_rows = []
    for k in range(1, d.n + 1):
        weights = table.row(k)
        for t in d.support:
            lhs = order_statistic_cdf(d, k, t)
            rhs = sum(
                (weights[i - k] * maxima_cdf(d, i, t) for i in range(k, d.n + 1)),
                Fraction(0),
            )
            cdf_rows.append((k, t, lhs, rhs, lhs - rhs))
    exp_rows = []
    for k in range(1, d.n + 1):
        weights = table.row(k)
        lhs = expected_order_statistic(d, k)
        rhs = sum(
            (weights[i - k] * expected_maximum(d, i) for i in range(k, d.n + 1)),
            Fraction(0),
        )
        exp_rows.append((k, lhs, rhs, lhs - rhs))
    return LTIdentityReport(
        distribution=d.name, n=d.n, cdf_rows=cdf_rows, expectation_rows=exp_rows
    )


def standard_test_family() -> list[DiscreteJointDistribution]:
    """Built-in exchangeable distributions, independent and dependent.

    Used by the CLI ``verify`` command and the test suite. The all-equal coin
    is totally dependent; the mixture and urn members are dependent but
    exchangeable; the iid members cover asymmetric marginals and n up to 6.
    """
    half = Fraction(1, 2)
    family = [
        DiscreteJointDistribution.iid({0: half, 1: half}, 4, name="iid-coin-n4"),
        DiscreteJointDistribution.iid(
            {0: Fraction(1, 3), 1: Fraction(1, 3), 2: Fraction(1, 3)}, 4, name="iid-uniform3-n4"
        ),
        DiscreteJointDistribution.iid(
            {0: half, 1: Fraction(1, 3), 2: Fraction(1, 6)}, 6, name="iid-skewed3-n6"
        ),
        DiscreteJointDistribution(
            3,
            {(0, 0, 0): half, (1, 1, 1): half},
            name="all-equal-coin-n3",
        ),
        DiscreteJointDistribution.mixture(
            [(half, {0: Fraction(3, 4), 1: Fraction(1, 4)}), (half, {0: Fraction(1, 4), 1: Fraction(3, 4)})],
            5,
            name="definetti-mixture-n5",
        ),
        DiscreteJointDistribution.urn([0, 0, 1, 1, 2], 3, name="urn-n3"),
    ]
    return family
