"""Closed-form expected-sojourn-time formulas for fork-join queues.

Two classic approximations for the basic (i,i) exponential fork-join queue:

  Nelson:  T_1 = 1/(mu(1-rho)),  T_2 = (12-rho)/8 * T_1,
           T_i ~= [H_i/H_2 + (4/11)(1 - H_i/H_2) rho] * T_2       (i >= 2)

  Varma:   T_i ~= [H_i + (V_i - H_i) lambda/mu] / (mu - lambda)
           (light-traffic interpolation; the denominator is written here as
           mu - lambda so that i=1 reproduces the exact M/M/1 value)

and their lifts to non-purging (n,k) queues through the order-statistic
transformation weights:

  NT_{n,k} ~= sum_{i=k..n} W[n,k,i] * T_i

with the k = 1 variant carrying the exact first term n/(mu(1-rho)) because
W[n,1,1] = n and T_1 is exact.

Evaluation is exact-rational by default. The weights alternate in sign and
grow combinatorially, so for large n and small k a float64 evaluation of the
lifted sum is dominated by catastrophic cancellation; rational arithmetic
avoids that entirely whenever the inputs are exact decimals. The floating
mode evaluates the combined-bracket form of the lifted sum in ascending index
order and exists for speed and for mixing with externally estimated T_i.

Negative lifted estimates are clipped to zero and flagged, with the raw value
preserved on the result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .coeffs import WTable
from .errors import DomainError, InstabilityError

__all__ = [
    "EXACT",
    "FLOATING",
    "VARIANTS",
    "QueueSpec",
    "ApproxValue",
    "HarmonicCache",
    "harmonics",
    "as_rate",
    "nelson_basic",
    "varma_basic",
    "nelson_lt",
    "varma_lt",
]

EXACT = "exact-rational"
FLOATING = "floating"

VARIANTS = ("basic", "non-purging", "purging", "split-merge")


def as_rate(value) -> Fraction:
    """Coerce a rate given as str, int, Fraction or float to an exact Fraction.

    Decimal strings are exact ("0.1" means 1/10). Floats go through their
    shortest decimal repr so that 0.1 also means 1/10 rather than the binary
    expansion of the nearest double.
    """
    if isinstance(value, float):
        value = repr(value)
    try:
        out = Fraction(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise DomainError(f"cannot parse rate {value!r}") from exc
    if out < 0:
        raise DomainError(f"rates must be non-negative, got {value!r}")
    return out


@dataclass(frozen=True)
class QueueSpec:
    """One (n, k) fork-join queue: fan-out, quorum, rates, variant.

    ``service`` names the sub-queue service distribution; the analytic
    formulas here require "exponential", the simulator also accepts
    "deterministic" and "weibull:<shape>".
    """

    n: int
    k: int
    lam: Fraction
    mu: Fraction
    variant: str = "non-purging"
    service: str = "exponential"

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"n must be >= 1, got {self.n}")
        if not 1 <= self.k <= self.n:
            raise DomainError(f"k must satisfy 1 <= k <= n, got k={self.k}, n={self.n}")
        if self.variant not in VARIANTS:
            raise DomainError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if self.variant == "basic" and self.k != self.n:
            raise DomainError("the basic variant completes on all sub-tasks, so k must equal n")
        object.__setattr__(self, "lam", as_rate(self.lam))
        object.__setattr__(self, "mu", as_rate(self.mu))
        if self.mu <= 0:
            raise DomainError("service rate mu must be positive")
        kind, _, shape_txt = self.service.partition(":")
        if kind not in ("exponential", "deterministic", "weibull"):
            raise DomainError(f"unknown service distribution {self.service!r}")
        if kind == "weibull":
            try:
                shape = float(shape_txt)
            except ValueError:
                raise DomainError(f"weibull needs a numeric shape, got {self.service!r}") from None
            if shape <= 0:
                raise DomainError("weibull shape must be positive")
        elif shape_txt:
            raise DomainError(f"{kind} service takes no parameter, got {self.service!r}")

    @property
    def rho(self) -> Fraction:
        return self.lam / self.mu

    def with_variant(self, variant: str) -> "QueueSpec":
        return QueueSpec(self.n, self.k, self.lam, self.mu, variant, self.service)


@dataclass(frozen=True)
class ApproxValue:
    """A sojourn-time estimate with provenance.

    ``value`` is the clipped, non-negative estimate; ``raw`` keeps the
    pre-clip value for analysis. ``clipped`` can only be set by the lifted
    (nelson-lt / varma-lt) methods.
    """

    value: Fraction | float
    raw: Fraction | float
    method: str
    evaluation: str
    clipped: bool = False

    def __float__(self) -> float:
        return float(self.value)


class HarmonicCache:
    """Lazily extended exact tables of H_i, H_i^(2) and Varma's V_i.

    H_i = sum 1/j, H_i^(2) = sum 1/j^2, and

        V_i = sum_{r=1..i} C(i,r)(-1)^(r-1) sum_{m=1..r} C(r,m) (m-1)! / r^(m+1)

    (V_1 = 1, V_2 = 11/8). All values are Fractions.
    """

    def __init__(self):
        self._h = [Fraction(0)]
        self._h2 = [Fraction(0)]
        self._v = [Fraction(0)]

    def _extend(self, i: int) -> None:
        while len(self._h) <= i:
            j = len(self._h)
            self._h.append(self._h[-1] + Fraction(1, j))
            self._h2.append(self._h2[-1] + Fraction(1, j * j))
        while len(self._v) <= i:
            m_ = len(self._v)
            total = Fraction(0)
            for r in range(1, m_ + 1):
                inner = sum(
                    Fraction(math.comb(r, m) * math.factorial(m - 1), r ** (m + 1))
                    for m in range(1, r + 1)
                )
                total += (-1) ** (r - 1) * math.comb(m_, r) * inner
            self._v.append(total)

    def h(self, i: int) -> Fraction:
        if i < 0:
            raise DomainError(f"harmonic index must be >= 0, got {i}")
        self._extend(i)
        return self._h[i]

    def h2(self, i: int) -> Fraction:
        if i < 0:
            raise DomainError(f"harmonic index must be >= 0, got {i}")
        self._extend(i)
        return self._h2[i]

    def v(self, i: int) -> Fraction:
        if i < 1:
            raise DomainError(f"V index must be >= 1, got {i}")
        self._extend(i)
        return self._v[i]

    def h_weighted(self, m: int, rho: Fraction) -> Fraction:
        """Generalized harmonic sum_{i=1..m} 1/(i(i-rho)); needs rho < 1."""
        if rho >= 1:
            raise InstabilityError("the weighted harmonic sum requires rho < 1")
        return sum((Fraction(1, 1) / (i * (i - rho)) for i in range(1, m + 1)), Fraction(0))


harmonics = HarmonicCache()


def _require_stable(lam: Fraction, mu: Fraction) -> Fraction:
    rho = lam / mu
    if rho >= 1:
        raise InstabilityError(
            f"rho = lambda/mu = {rho} >= 1; analytic formulas require the stability condition rho < 1"
        )
    return rho


def nelson_basic(i: int, lam, mu, evaluation: str = EXACT) -> ApproxValue:
    """Nelson's approximation of the basic (i,i) expected sojourn time.

    Exact for i = 1 (M/M/1). Positive for every i and 0 <= rho < 1.
    """
    if i < 1:
        raise DomainError(f"fan-out must be >= 1, got {i}")
    lam, mu = as_rate(lam), as_rate(mu)
    rho = _require_stable(lam, mu)
    value = _nelson_t(i, rho, mu)
    if evaluation == FLOATING:
        value = float(value)
    elif evaluation != EXACT:
        raise DomainError(f"unknown evaluation mode {evaluation!r}")
    return ApproxValue(value=value, raw=value, method="nelson-basic", evaluation=evaluation)


def _nelson_t(i: int, rho: Fraction, mu: Fraction) -> Fraction:
    t1 = 1 / (mu * (1 - rho))
    if i == 1:
        return t1
    t2 = (12 - rho) / 8 * t1
    hi, h2 = harmonics.h(i), harmonics.h(2)
    return (hi / h2 + Fraction(4, 11) * (1 - hi / h2) * rho) * t2


def varma_basic(i: int, lam, mu, evaluation: str = EXACT) -> ApproxValue:
    """Varma's light-traffic interpolation for the basic (i,i) queue.

    Equals H_i/mu at lam = 0 and the exact M/M/1 value at i = 1.
    """
    if i < 1:
        raise DomainError(f"fan-out must be >= 1, got {i}")
    lam, mu = as_rate(lam), as_rate(mu)
    _require_stable(lam, mu)
    value = _varma_t(i, lam, mu)
    if evaluation == FLOATING:
        value = float(value)
    elif evaluation != EXACT:
        raise DomainError(f"unknown evaluation mode {evaluation!r}")
    return ApproxValue(value=value, raw=value, method="varma-basic", evaluation=evaluation)


def _varma_t(i: int, lam: Fraction, mu: Fraction) -> Fraction:
    hi, vi = harmonics.h(i), harmonics.v(i)
    return (hi + (vi - hi) * lam / mu) / (mu - lam)


def _lt_spec_check(spec: QueueSpec, table: WTable) -> Fraction:
    if spec.variant not in ("non-purging", "basic"):
        raise DomainError(
            f"the lifted approximations describe non-purging queues, got variant {spec.variant!r}"
        )
    if table.n != spec.n:
        raise DomainError(f"weight table is for n={table.n}, queue has n={spec.n}")
    return _require_stable(spec.lam, spec.mu)


def _clip(raw, method: str, evaluation: str) -> ApproxValue:
    clipped = raw < 0
    value = type(raw)(0) if clipped else raw
    return ApproxValue(value=value, raw=raw, method=method, evaluation=evaluation, clipped=clipped)


def nelson_lt(spec: QueueSpec, table: WTable, evaluation: str = EXACT) -> ApproxValue:
    """Lifted Nelson estimate of the non-purging (n,k) expected sojourn time.

    k = n collapses to nelson_basic(n); rho = 0 gives (H_n - H_{n-k})/mu
    exactly in rational mode. Negative raw sums are clipped to 0 and flagged;
    in floating mode this is expected for large n with small k, where the
    alternating weighted sum loses all significance in float64.
    """
    rho = _lt_spec_check(spec, table)
    n, k, mu = spec.n, spec.k, spec.mu
    if evaluation == EXACT:
        total = Fraction(0)
        for i in range(max(k, 2), n + 1):
            total += table.value(k, i) * _nelson_t(i, rho, mu)
        if k == 1:
            total += n * _nelson_t(1, rho, mu)
        return _clip(total, "nelson-lt", evaluation)
    if evaluation != FLOATING:
        raise DomainError(f"unknown evaluation mode {evaluation!r}")
    rho_f, mu_f = float(rho), float(mu)
    h2 = float(harmonics.h(2))
    prefactor = (12.0 - rho_f) / (88.0 * mu_f * (1.0 - rho_f))
    total = 0.0
    for i in range(max(k, 2), n + 1):
        hi = float(harmonics.h(i))
        total += table.value(k, i) * ((11.0 * hi + 4.0 * rho_f * (h2 - hi)) / h2)
    total *= prefactor
    if k == 1:
        total += n / (mu_f * (1.0 - rho_f))
    return _clip(total, "nelson-lt", evaluation)


def varma_lt(spec: QueueSpec, table: WTable, evaluation: str = EXACT) -> ApproxValue:
    """Lifted Varma estimate of the non-purging (n,k) expected sojourn time.

    k = n collapses to varma_basic(n); lam = 0 gives (H_n - H_{n-k})/mu
    exactly. Negative raw sums are clipped to 0 and flagged, mirroring the
    nelson_lt convention.
    """
    rho = _lt_spec_check(spec, table)
    n, k, lam, mu = spec.n, spec.k, spec.lam, spec.mu
    if evaluation == EXACT:
        total = Fraction(0)
        for i in range(k, n + 1):
            total += table.value(k, i) * _varma_t(i, lam, mu)
        return _clip(total, "varma-lt", evaluation)
    if evaluation != FLOATING:
        raise DomainError(f"unknown evaluation mode {evaluation!r}")
    lam_f, mu_f = float(lam), float(mu)
    total = 0.0
    for i in range(k, n + 1):
        hi, vi = float(harmonics.h(i)), float(harmonics.v(i))
        total += table.value(k, i) * ((hi + (vi - hi) * lam_f / mu_f) / (mu_f - lam_f))
    return _clip(total, "varma-lt", evaluation)
