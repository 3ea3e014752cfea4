"""Closed-form polygon-formation probabilities, evaluated exactly.

Event shorthand used throughout: PN is the probability that no p+1 of the
n sticks form a (p+1)-gon, PA that every choice of p+1 does, PR that one
uniformly chosen subset of p+1 does.  Sampling models: pick-up sticks
(independent uniform lengths on [0, 1]), the same truncated to [a, 1],
independent exponential lengths, and the broken stick (a unit stick cut at
n-1 uniform positions).

Everything returns an ``ExactProb``: a reduced big-integer fraction.  The
PN evaluators each run two algebraically distinct routes and assert their
agreement (skipped under ``python -O``).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial, gcd
from typing import Union

from .constraints import m_constants, s_constants
from .errors import DomainError, UnsupportedFormulaError
from .sequences import fib, fib_prefix_sum, t_value

__all__ = [
    "ExactProb",
    "is_vacuous",
    "pn_pickup",
    "pn_pickup_quadrilateral",
    "pn_pickup_truncated",
    "pn_broken",
    "pn_exponential",
    "pa_pickup",
    "pr_pickup",
]

RationalLike = Union[Fraction, int, str]


@dataclass(frozen=True)
class ExactProb:
    """A probability as a fraction of big integers, always in lowest terms."""

    numerator: int
    denominator: int

    def __post_init__(self) -> None:
        if self.denominator < 1:
            raise DomainError(f"denominator must be >= 1, got {self.denominator}")
        if not 0 <= self.numerator <= self.denominator:
            raise DomainError(
                f"{self.numerator}/{self.denominator} is not a probability"
            )
        if gcd(self.numerator, self.denominator) != 1:
            raise DomainError(
                f"{self.numerator}/{self.denominator} is not in lowest terms"
            )

    @classmethod
    def from_fraction(cls, value: Union[Fraction, int]) -> "ExactProb":
        value = Fraction(value)
        return cls(value.numerator, value.denominator)

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    def decimal(self, digits: int = 12) -> str:
        """Fixed-point decimal rendering, rounded half away from zero."""
        if digits < 0:
            raise DomainError(f"digits must be >= 0, got {digits}")
        scaled, rem = divmod(self.numerator * 10**digits, self.denominator)
        if 2 * rem >= self.denominator:
            scaled += 1
        if digits == 0:
            return str(scaled)
        text = str(scaled).rjust(digits + 1, "0")
        return f"{text[:-digits]}.{text[-digits:]}"

    def __float__(self) -> float:
        return self.numerator / self.denominator

    def __str__(self) -> str:
        return f"{self.numerator}/{self.denominator}"


def _require_p(p: int) -> None:
    if p < 2:
        raise DomainError(f"polygon parameter p must be >= 2, got {p}")


def _require_n(n: int) -> None:
    if n < 1:
        raise DomainError(f"stick count n must be >= 1, got {n}")


def is_vacuous(p: int, n: int) -> bool:
    """True when no subset of p+1 sticks exists, so PN and PA hold trivially.

    The convention that both probabilities are 1 in this regime is a
    deliberate choice; callers that surface results should annotate it.
    """
    return n <= p


def _pn_pickup_step_fib(p: int, n: int) -> Fraction:
    # direct product over the step-Fibonacci numbers, corrections on the
    # last p-2 factors
    den = 1
    for i in range(1, n - p + 3):
        den *= fib(p, i)
    for i in range(n - p + 3, n + 1):
        den *= fib(p, i) - sum(
            j * fib(p, i - j - 1) for j in range(1, i - n + p - 1)
        )
    return Fraction(1, den)


def pn_pickup(p: int, n: int) -> ExactProb:
    """PN for n independent uniform [0, 1] lengths.

    Evaluated as the product of reciprocal bound denominators; a direct
    step-Fibonacci product acts as a second route.
    """
    _require_p(p)
    _require_n(n)
    if is_vacuous(p, n):
        return ExactProb(1, 1)
    den = 1
    for m in m_constants(p, n):
        den *= m
    result = Fraction(1, den)
    assert result == _pn_pickup_step_fib(p, n), "PN pickup routes disagree"
    return ExactProb.from_fraction(result)


def pn_pickup_quadrilateral(n: int) -> ExactProb:
    """Tribonacci-only form of pn_pickup(3, n), kept as an independent
    cross-check: 1 / ((T_n - T_{n-2}) * T_1 * ... * T_{n-1})."""
    if n < 4:
        raise DomainError(f"the quadrilateral form needs n >= 4, got {n}")
    den = fib(3, n) - fib(3, n - 2)
    for i in range(1, n):
        den *= fib(3, i)
    return ExactProb.from_fraction(Fraction(1, den))


def pn_pickup_truncated(p: int, n: int, a: RationalLike) -> ExactProb:
    """PN when the lengths are uniform on [a, 1] instead of [0, 1].

    The [0, 1] probability is rescaled by (1 - m_1 a)^n / (1 - a)^n; once a
    reaches the cap 1/m_1 on the shortest stick the event is impossible.
    """
    _require_p(p)
    _require_n(n)
    a = Fraction(a)
    if not 0 <= a < 1:
        raise DomainError(f"truncation point a must be in [0, 1), got {a}")
    if is_vacuous(p, n):
        return ExactProb(1, 1)
    m = m_constants(p, n)
    if m[0] * a >= 1:
        return ExactProb(0, 1)
    den = 1
    for v in m:
        den *= v
    scale = ((1 - m[0] * a) / (1 - a)) ** n
    return ExactProb.from_fraction(scale / den)


def _pn_broken_prefix_sum_form(p: int, n: int) -> Fraction:
    den = 1
    for i in range(1, n - p + 3):
        den *= fib_prefix_sum(p, i)
    for i in range(n - p + 3, n + 1):
        den *= fib_prefix_sum(p, i) - sum(
            j * fib_prefix_sum(p, i - j - 1) for j in range(1, i - n + p - 1)
        )
    return Fraction(factorial(n), den)


def pn_broken(p: int, n: int) -> ExactProb:
    """PN for the n pieces of a unit stick broken at n-1 uniform positions.

    n! times the product of reciprocal broken-stick denominators; the
    prefix-sum product form acts as a second route.
    """
    _require_p(p)
    _require_n(n)
    if is_vacuous(p, n):
        return ExactProb(1, 1)
    den = 1
    for s in s_constants(p, n):
        den *= s
    result = Fraction(factorial(n), den)
    assert result == _pn_broken_prefix_sum_form(p, n), "PN broken routes disagree"
    return ExactProb.from_fraction(result)


def pn_exponential(p: int, n: int) -> ExactProb:
    """PN for n independent exponential lengths.

    The rate drops out (both the density factor and the integration
    variable scale cancel), and the value coincides exactly with the
    broken-stick probability.
    """
    _require_p(p)
    _require_n(n)
    if is_vacuous(p, n):
        return ExactProb(1, 1)
    den = 1
    for k in range(1, n - p + 3):
        den *= t_value(p, k)
    for k in range(n - p + 3, n + 1):
        den *= t_value(p, k) - sum(
            j * t_value(p, k - j - 1) for j in range(1, p + k - n - 1)
        )
    return ExactProb.from_fraction(Fraction(factorial(n), den))


def pa_pickup(p: int, n: int) -> ExactProb:
    """PA for n independent uniform [0, 1] lengths.

    Closed forms exist for triangles (1 / 2^(n-2)) and quadrilaterals
    (2 * ((2/3)^(n-3) - (1/2)^(n-2))) only; larger polygons have no known
    closed form and must go through the Monte Carlo estimator.
    """
    _require_p(p)
    _require_n(n)
    if p not in (2, 3):
        raise UnsupportedFormulaError(
            "no closed form for the all-subsets probability with p >= 4; "
            "fall back to the Monte Carlo estimator (simulate --event pa)"
        )
    if is_vacuous(p, n):
        return ExactProb(1, 1)
    if p == 2:
        return ExactProb.from_fraction(Fraction(1, 2 ** (n - 2)))
    value = 2 * (Fraction(2, 3) ** (n - 3) - Fraction(1, 2) ** (n - 2))
    return ExactProb.from_fraction(value)


def pr_pickup(p: int) -> ExactProb:
    """PR for independent uniform [0, 1] lengths: 1 - 1/p!, independent of n.

    Conditioning on the chosen subset reduces the event to the n = p + 1
    case, whose PN is 1/p!.
    """
    _require_p(p)
    return ExactProb.from_fraction(1 - Fraction(1, factorial(p)))
