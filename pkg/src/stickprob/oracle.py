"""Independent exact verification routes.

``symbolic_pn_pickup`` evaluates the ordered-lengths probability integral
literally: integrate out the longest stick between its bound forms, then
the next, and so on down to the shortest.  Every bound is affine in the
remaining lengths with rational coefficients, so each step maps a
polynomial to a polynomial and the whole computation stays exact.  The
integrator shares only the bound *forms* with the production code (the
minimum forms and the vector-route maximum forms), never the closed-form
denominators, which is what makes it an oracle for them.

``r_vector`` iterates the linear recurrence obeyed by the exponents in
the stepwise integration of exponential tails; its entries must line up
with step-Fibonacci numbers, giving a second, algebra-only check.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial
from typing import Iterator, Mapping, Union

from .closedform import ExactProb
from .constraints import max_length_form, min_length_form
from .errors import DomainError, ResourceLimitError

__all__ = [
    "DEFAULT_SIZE_GUARD",
    "MultiPoly",
    "integration_chain",
    "symbolic_pn_pickup",
    "symbolic_pn_truncated",
    "intermediates_vanish_at_max",
    "r_vector",
]

DEFAULT_SIZE_GUARD = 8

RationalLike = Union[Fraction, int, str]


class MultiPoly:
    """Sparse polynomial in l_1..l_nvars with Fraction coefficients.

    Terms map exponent tuples to nonzero coefficients; only the handful of
    operations the integrator needs are implemented.
    """

    __slots__ = ("nvars", "terms")

    def __init__(
        self,
        nvars: int,
        terms: Mapping[tuple[int, ...], Fraction] | None = None,
    ) -> None:
        self.nvars = nvars
        self.terms: dict[tuple[int, ...], Fraction] = {}
        if terms:
            for expo, coeff in terms.items():
                coeff = Fraction(coeff)
                if coeff:
                    self.terms[tuple(expo)] = coeff

    @classmethod
    def constant(cls, nvars: int, value: RationalLike) -> "MultiPoly":
        return cls(nvars, {(0,) * nvars: Fraction(value)})

    @classmethod
    def affine(
        cls,
        nvars: int,
        constant: RationalLike,
        coeffs: Mapping[int, RationalLike],
    ) -> "MultiPoly":
        """constant + sum(coeffs[v] * l_{v+1}) over 0-based variable slots."""
        terms = {(0,) * nvars: Fraction(constant)}
        for var, coeff in coeffs.items():
            expo = [0] * nvars
            expo[var] = 1
            terms[tuple(expo)] = Fraction(coeff)
        return cls(nvars, terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "MultiPoly") -> "MultiPoly":
        out = dict(self.terms)
        for expo, coeff in other.terms.items():
            new = out.get(expo, Fraction(0)) + coeff
            if new:
                out[expo] = new
            else:
                out.pop(expo, None)
        result = MultiPoly(self.nvars)
        result.terms = out
        return result

    def __sub__(self, other: "MultiPoly") -> "MultiPoly":
        return self + (other * Fraction(-1))

    def __mul__(self, other: "MultiPoly | Fraction | int") -> "MultiPoly":
        result = MultiPoly(self.nvars)
        if not isinstance(other, MultiPoly):
            factor = Fraction(other)
            if factor:
                result.terms = {e: c * factor for e, c in self.terms.items()}
            return result
        acc: dict[tuple[int, ...], Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                expo = tuple(a + b for a, b in zip(e1, e2))
                new = acc.get(expo, Fraction(0)) + c1 * c2
                if new:
                    acc[expo] = new
                else:
                    acc.pop(expo, None)
        result.terms = acc
        return result

    __rmul__ = __mul__

    def antiderivative(self, var: int) -> "MultiPoly":
        result = MultiPoly(self.nvars)
        for expo, coeff in self.terms.items():
            lifted = list(expo)
            lifted[var] += 1
            result.terms[tuple(lifted)] = coeff / lifted[var]
        return result

    def substitute(self, var: int, replacement: "MultiPoly") -> "MultiPoly":
        """Replace variable ``var`` by a polynomial (usually an affine bound)."""
        if not self.terms:
            return MultiPoly(self.nvars)
        by_degree: dict[int, MultiPoly] = {}
        for expo, coeff in self.terms.items():
            degree = expo[var]
            reduced = list(expo)
            reduced[var] = 0
            bucket = by_degree.setdefault(degree, MultiPoly(self.nvars))
            key = tuple(reduced)
            new = bucket.terms.get(key, Fraction(0)) + coeff
            if new:
                bucket.terms[key] = new
            else:
                bucket.terms.pop(key, None)
        out = MultiPoly(self.nvars)
        power = MultiPoly.constant(self.nvars, 1)
        for degree in range(max(by_degree) + 1):
            if degree:
                power = power * replacement
            bucket = by_degree.get(degree)
            if bucket is not None and bucket.terms:
                out = out + bucket * power
        return out

    def constant_value(self) -> Fraction:
        """The value of a polynomial with no remaining variables."""
        if not self.terms:
            return Fraction(0)
        if len(self.terms) == 1:
            (expo, coeff), = self.terms.items()
            if not any(expo):
                return coeff
        raise DomainError("polynomial still depends on variables")


def _check_chain_args(p: int, n: int, size_guard: int) -> None:
    if p < 2:
        raise DomainError(f"polygon parameter p must be >= 2, got {p}")
    if n < p + 1:
        raise DomainError(
            f"symbolic integration needs n >= p + 1 = {p + 1}, got {n}"
        )
    if n > size_guard:
        raise ResourceLimitError(
            f"n = {n} exceeds the size guard {size_guard}; the term count "
            "grows factorially, raise the guard explicitly to proceed"
        )


def _upper_bound_poly(p: int, n: int, i: int) -> MultiPoly:
    """Affine polynomial for the cap on stick i (pick-up sticks)."""
    if i == n:
        return MultiPoly.constant(n, 1)
    den, form = max_length_form(p, n, i)
    coeffs = {
        v: Fraction(-form.coeffs[v], den)
        for v in range(form.arity)
        if form.coeffs[v]
    }
    return MultiPoly.affine(n, Fraction(1 - form.constant, den), coeffs)


def _lower_bound_poly(p: int, n: int, i: int) -> MultiPoly:
    form = min_length_form(p, i)
    coeffs = {v: Fraction(c) for v, c in enumerate(form.coeffs) if c}
    return MultiPoly.affine(n, form.constant, coeffs)


def integration_chain(
    p: int, n: int, size_guard: int = DEFAULT_SIZE_GUARD
) -> Iterator[tuple[int, MultiPoly]]:
    """Integrate sticks n, n-1, ..., 2 out of the unit integrand.

    Yields (i, poly) after integrating stick i; poly then depends on
    l_1..l_{i-1} only.  The final yield is the univariate polynomial in
    l_1 whose last integral gives the probability (up to n!).
    """
    _check_chain_args(p, n, size_guard)
    poly = MultiPoly.constant(n, 1)
    for i in range(n, 1, -1):
        var = i - 1
        anti = poly.antiderivative(var)
        poly = anti.substitute(var, _upper_bound_poly(p, n, i)) - anti.substitute(
            var, _lower_bound_poly(p, n, i)
        )
        yield i, poly


def symbolic_pn_pickup(
    p: int, n: int, size_guard: int = DEFAULT_SIZE_GUARD
) -> ExactProb:
    """PN for pick-up sticks by direct iterated integration."""
    final = None
    for _, poly in integration_chain(p, n, size_guard):
        final = poly
    anti = final.antiderivative(0)
    hi = _upper_bound_poly(p, n, 1)
    lo = MultiPoly.constant(n, 0)
    value = (
        anti.substitute(0, hi).constant_value()
        - anti.substitute(0, lo).constant_value()
    )
    return ExactProb.from_fraction(value * factorial(n))


def symbolic_pn_truncated(
    p: int,
    n: int,
    a: RationalLike,
    size_guard: int = DEFAULT_SIZE_GUARD,
) -> ExactProb:
    """PN for lengths uniform on [a, 1], by the same iterated integration.

    Built as the full volume minus the slab with the shortest stick below
    ``a``, rescaled by the density factor 1/(1-a)^n.  Zero once ``a``
    reaches the cap on the shortest stick.
    """
    a = Fraction(a)
    if not 0 <= a < 1:
        raise DomainError(f"truncation point a must be in [0, 1), got {a}")
    final = None
    for _, poly in integration_chain(p, n, size_guard):
        final = poly
    cap = Fraction(1, max_length_form(p, n, 1)[0])
    if a >= cap:
        return ExactProb(0, 1)
    anti = final.antiderivative(0)

    def at(point: Fraction) -> Fraction:
        return anti.substitute(0, MultiPoly.constant(n, point)).constant_value()

    full = at(cap) - at(Fraction(0))
    slab = at(a) - at(Fraction(0))
    value = factorial(n) * (full - slab) / (1 - a) ** n
    return ExactProb.from_fraction(value)


def intermediates_vanish_at_max(
    p: int, n: int, size_guard: int = DEFAULT_SIZE_GUARD
) -> bool:
    """Check that every partial integral collapses to zero when the next
    stick down is pushed to its own maximum.

    Pinning l_{i-1} at its cap forces sticks i..n onto one exact
    configuration ending at length 1, so the integral over them has an
    empty interior; the partial results must vanish there identically.
    """
    for i, poly in integration_chain(p, n, size_guard):
        pinned = poly.substitute(i - 2, _upper_bound_poly(p, n, i - 1))
        if not pinned.is_zero():
            return False
    return True


def r_vector(p: int, l: int) -> tuple[int, ...]:
    """The l-th state of the integration-exponent recurrence, starting from
    the all-ones vector.

    One step sends entry 1 to itself plus (p-1) copies of the last entry,
    and entry i (for i >= 2) to entry i-1 plus (p-i) copies of the last
    entry.  Exact big-integer arithmetic, applied step by step; l stays
    small at desk scale so repeated application beats exponentiation on
    clarity.
    """
    if p < 2:
        raise DomainError(f"polygon parameter p must be >= 2, got {p}")
    if l < 1:
        raise DomainError(f"the recurrence is defined for l >= 1, got {l}")
    state = [1] * p
    for _ in range(l - 1):
        last = state[-1]
        new = [state[0] + (p - 1) * last]
        for i in range(2, p + 1):
            new.append(state[i - 2] + (p - i) * last)
        state = new
    return tuple(state)
