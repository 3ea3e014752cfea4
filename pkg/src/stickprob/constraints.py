"""Constraint systems on sorted stick lengths for the no-polygon condition.

Once the n lengths are sorted increasingly, "no p+1 of them form a
(p+1)-gon" reduces to the window inequalities
l_{i-p} + ... + l_{i-1} <= l_i.  Propagating these forward bounds every
stick from below by a linear form in the shorter sticks, and from above by

    l_i_max = (1 - f_i(l_1, ..., l_{i-1})) / m_i

with integer coefficients in f_i and a positive integer m_i.  The pick-up
sticks model (independent lengths capped at 1) produces the m_i; the
broken stick model (pieces of a unit stick, so the lengths sum to 1)
produces analogous constants s_i with forms g_i.  Products of the
reciprocal denominators are exactly the closed-form probabilities.

Three derivations of the same denominators live here on purpose:

* closed forms over step-Fibonacci numbers (``m_constants``,
  ``s_constants``) -- the production route;
* accumulation of the window recurrence in coefficient vectors
  (``e_vector``, ``max_length_form``), which also yields the numerator
  forms;
* the inverse-Jacobian row recurrence (``m_constants_via_jacobian``).

Their exact agreement is a core check of the verification suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from random import Random
from typing import Sequence, Union

from .errors import DomainError, InfeasiblePrefixError
from .sequences import fib, fib_prefix_sum

__all__ = [
    "PICKUP",
    "BROKEN",
    "LinearForm",
    "ConstraintSystem",
    "min_length_form",
    "e_vector",
    "max_length_form",
    "m_constants",
    "m_constants_via_jacobian",
    "s_constants",
    "constraint_system",
    "validate_prefix",
    "check_max_min_identity",
    "sample_feasible_prefix",
]

PICKUP = "pickup"
BROKEN = "broken"
_MODELS = (PICKUP, BROKEN)

Rational = Union[Fraction, int]


def _check_model(model: str) -> None:
    if model not in _MODELS:
        raise DomainError(f"model must be one of {_MODELS}, got {model!r}")


def _check_system(p: int, n: int) -> None:
    if p < 2:
        raise DomainError(f"polygon parameter p must be >= 2, got {p}")
    if n < p + 1:
        raise DomainError(
            f"constraint systems need n >= p + 1 = {p + 1} sticks, got {n}"
        )


@dataclass(frozen=True)
class LinearForm:
    """constant + sum(coeffs[j] * l_{j+1}) over exactly ``arity`` lengths."""

    arity: int
    coeffs: tuple[int, ...]
    constant: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        if self.arity < 0:
            raise DomainError(f"arity must be >= 0, got {self.arity}")
        if len(self.coeffs) != self.arity:
            raise DomainError(
                f"{len(self.coeffs)} coefficients for arity {self.arity}"
            )
        if any(not isinstance(c, int) for c in self.coeffs):
            raise DomainError("coefficients must be integers")

    @classmethod
    def zero(cls, arity: int = 0) -> "LinearForm":
        return cls(arity, (0,) * arity)

    def evaluate(self, lengths: Sequence[Rational]) -> Fraction:
        if len(lengths) != self.arity:
            raise DomainError(
                f"form reads {self.arity} lengths, got {len(lengths)}"
            )
        total = self.constant
        for c, x in zip(self.coeffs, lengths):
            if c:
                total += c * Fraction(x)
        return total

    def is_zero(self) -> bool:
        return self.constant == 0 and not any(self.coeffs)

    def __str__(self) -> str:
        parts = []
        for j in range(self.arity, 0, -1):
            c = self.coeffs[j - 1]
            if c:
                parts.append(f"l{j}" if c == 1 else f"{c}*l{j}")
        if self.constant:
            parts.append(str(self.constant))
        return " + ".join(parts) if parts else "0"


def min_length_form(p: int, i: int) -> LinearForm:
    """Lower bound for stick i: zero, the previous stick, or the window sum."""
    if p < 2:
        raise DomainError(f"polygon parameter p must be >= 2, got {p}")
    if i < 1:
        raise DomainError(f"stick index must be >= 1, got {i}")
    coeffs = [0] * (i - 1)
    if 1 < i < p + 1:
        coeffs[i - 2] = 1  # ordering only: l_i >= l_{i-1}
    elif i >= p + 1:
        for j in range(1, p + 1):
            coeffs[i - j - 1] = 1  # sum of the p previous sticks
    return LinearForm(i - 1, tuple(coeffs))


@lru_cache(maxsize=None)
def e_vector(p: int, k: int) -> tuple[int, ...]:
    """Coefficient vector e_k over a window of p consecutive lengths.

    e_1, e_0, ..., e_{2-p} are the unit vectors (1 in slot 2-k) and every
    e_k with k >= 2 is the sum of the p vectors before it, mirroring the
    recurrence of the lengths themselves.  The leading entry of e_k is the
    k-th p-step Fibonacci number.
    """
    if p < 2:
        raise DomainError(f"polygon parameter p must be >= 2, got {p}")
    if k < 2 - p:
        raise DomainError(f"e-vectors are defined for k >= {2 - p}, got {k}")
    if k <= 1:
        unit = [0] * p
        unit[1 - k] = 1
        return tuple(unit)
    block = [e_vector(p, m) for m in range(k - p, k)]
    return tuple(sum(col) for col in zip(*block))


@lru_cache(maxsize=None)
def _short_e_vector(p: int, i: int, k: int) -> tuple[int, ...]:
    """e-vector variant for a stick i < p, whose window is cut short.

    Sticks between i+1 and p are only bound by ordering, so the chain
    repeats (1, 0, ..., 0) until the full p-term recurrence can start.
    """
    if not 1 <= i < p:
        raise DomainError(f"short vectors need 1 <= i < p, got i={i}, p={p}")
    if k < 2 - i:
        raise DomainError(f"short e-vectors are defined for k >= {2 - i}")
    if k <= 1:
        unit = [0] * i
        unit[1 - k] = 1
        return tuple(unit)
    if k <= p + 1 - i:
        return (1,) + (0,) * (i - 1)
    block = [_short_e_vector(p, i, m) for m in range(k - p, k)]
    return tuple(sum(col) for col in zip(*block))


def max_length_form(
    p: int, n: int, i: int, model: str = PICKUP
) -> tuple[int, LinearForm]:
    """Upper bound data for stick i, as (denominator, numerator form), so
    that l_i_max = (1 - form(l_1, ..., l_{i-1})) / denominator.

    Pick-up sticks: chaining the window inequalities from stick i up to
    stick n and capping l_n at 1 leaves the single vector e_{n-i+1} (cut
    short when i < p); its leading entry is the denominator and its tail
    gives the coefficients on the previous sticks.  Broken stick: the cap
    is the unit total length instead, so the chain vectors for sticks
    i..n accumulate and every earlier stick picks up one extra unit
    coefficient from the total.

    Stick n itself needs no form (its cap is the constant 1) and is
    rejected here.
    """
    _check_model(model)
    _check_system(p, n)
    if not 1 <= i <= n - 1:
        raise DomainError(f"max forms cover sticks 1..{n - 1}, got {i}")
    if i >= p:
        width = p

        def vec(m: int) -> tuple[int, ...]:
            return e_vector(p, m)

    else:
        width = i

        def vec(m: int) -> tuple[int, ...]:
            return _short_e_vector(p, i, m)

    if model == PICKUP:
        acc = list(vec(n - i + 1))
    else:
        acc = [0] * width
        for m in range(1, n - i + 2):
            acc = [a + b for a, b in zip(acc, vec(m))]
    coeffs = [0] * (i - 1)
    for t in range(1, width):
        coeffs[i - t - 1] = acc[t]
    if model == BROKEN:
        coeffs = [c + 1 for c in coeffs]
    return acc[0], LinearForm(i - 1, tuple(coeffs))


def m_constants(p: int, n: int) -> tuple[int, ...]:
    """Pick-up sticks denominators m_1..m_n via the step-Fibonacci closed
    form: m_i = F_{n-i+1} minus a weighted tail for the first p-2 sticks."""
    _check_system(p, n)
    out = []
    for i in range(1, n + 1):
        v = fib(p, n - i + 1)
        if i <= p - 2:
            v -= sum(j * fib(p, n - i - j) for j in range(1, p - i))
        out.append(v)
    return tuple(out)


def s_constants(p: int, n: int) -> tuple[int, ...]:
    """Broken-stick denominators s_1..s_{n-1}; s_n = 1 is implied.

    Same shape as ``m_constants`` with every step-Fibonacci number
    replaced by its prefix sum.
    """
    _check_system(p, n)
    out = []
    for i in range(1, n):
        v = fib_prefix_sum(p, n - i + 1)
        if i <= p - 2:
            v -= sum(k * fib_prefix_sum(p, n - i - k) for k in range(1, p - i))
        out.append(v)
    return tuple(out)


def m_constants_via_jacobian(p: int, n: int) -> tuple[int, ...]:
    """The m-vector by an independent route: rows of the inverse of the
    change of variables y_i = l_i - l_i_min.

    Row i is all ones up to slot i for i <= p; afterwards each row is the
    sum of the p rows above it plus a unit in slot i.  Row n reads off
    (m_1, ..., m_n).
    """
    _check_system(p, n)
    rows: list[list[int]] = []
    for i in range(1, p + 1):
        rows.append([1] * i + [0] * (n - i))
    for i in range(p + 1, n + 1):
        row = [sum(col) for col in zip(*rows[i - p - 1 : i - 1])]
        row[i - 1] += 1
        rows.append(row)
    return tuple(rows[n - 1])


@dataclass(frozen=True)
class ConstraintSystem:
    """All bound forms for one (p, n, model) triple, sticks indexed 1..n.

    Denominators come from the closed forms; numerator forms come from the
    vector route.  The two routes agree exactly (verified elsewhere), so
    mixing them is safe.
    """

    p: int
    n: int
    model: str
    min_forms: tuple[LinearForm, ...]
    max_denominators: tuple[int, ...]
    max_numerator_forms: tuple[LinearForm, ...]

    def bounds(self, prefix: Sequence[Rational]) -> tuple[Fraction, Fraction]:
        """The [min, max] interval for stick len(prefix)+1 given a prefix."""
        i = len(prefix) + 1
        if not 1 <= i <= self.n:
            raise DomainError(f"prefix selects stick {i}, valid range 1..{self.n}")
        lo = self.min_forms[i - 1].evaluate(prefix)
        hi = Fraction(
            1 - self.max_numerator_forms[i - 1].evaluate(prefix),
            self.max_denominators[i - 1],
        )
        return Fraction(lo), hi


@lru_cache(maxsize=None)
def constraint_system(p: int, n: int, model: str = PICKUP) -> ConstraintSystem:
    _check_model(model)
    _check_system(p, n)
    if model == PICKUP:
        denominators = m_constants(p, n)
    else:
        denominators = s_constants(p, n) + (1,)
    mins = []
    numerators = []
    for i in range(1, n + 1):
        mins.append(min_length_form(p, i))
        if i <= n - 1:
            numerators.append(max_length_form(p, n, i, model)[1])
        else:
            numerators.append(LinearForm.zero(n - 1))
    if denominators[-1] != 1:
        raise RuntimeError(f"terminal denominator is {denominators[-1]}, not 1")
    for a, b in zip(denominators, denominators[1:]):
        if a < b:
            raise RuntimeError(
                f"denominators not nonincreasing for p={p}, n={n}, {model}"
            )
    return ConstraintSystem(
        p, n, model, tuple(mins), tuple(denominators), tuple(numerators)
    )


def validate_prefix(
    system: ConstraintSystem, prefix: Sequence[Rational]
) -> tuple[Fraction, ...]:
    """Check l_1..l_k each sit inside their bound interval; return Fractions."""
    vals = tuple(Fraction(x) for x in prefix)
    if len(vals) > system.n:
        raise DomainError(f"prefix longer than n = {system.n}")
    for j in range(1, len(vals) + 1):
        lo, hi = system.bounds(vals[: j - 1])
        if not lo <= vals[j - 1] <= hi:
            raise InfeasiblePrefixError(
                f"l_{j} = {vals[j - 1]} outside [{lo}, {hi}] "
                f"({system.model}, p={system.p}, n={system.n})"
            )
    return vals


def check_max_min_identity(
    p: int,
    n: int,
    lengths_prefix: Sequence[Rational],
    model: str = PICKUP,
) -> bool:
    """Exact check of the telescoping identity linking consecutive bound
    intervals at i = len(prefix) + 1:

        m_i * (l_i_max - l_i_min) == m_{i-1} * (l_{i-1}_max - l_{i-1})

    with every bound evaluated from the constraint forms on the given
    feasible prefix.  The right-hand factor subtracts the realized
    l_{i-1}, which is what the two pinned length sequences in the
    derivation actually equate.  Valid for i up to n in the pick-up model
    and up to n-1 in the broken model (the last broken piece is determined
    by the others, so its interval does not telescope).
    """
    system = constraint_system(p, n, model)
    vals = validate_prefix(system, lengths_prefix)
    i = len(vals) + 1
    top = n if model == PICKUP else n - 1
    if not 2 <= i <= top:
        raise DomainError(
            f"identity covers prefixes of 1..{top - 1} lengths, got {len(vals)}"
        )
    lo_i, hi_i = system.bounds(vals)
    _, hi_prev = system.bounds(vals[:-1])
    lhs = system.max_denominators[i - 1] * (hi_i - lo_i)
    rhs = system.max_denominators[i - 2] * (hi_prev - vals[-1])
    return lhs == rhs


def sample_feasible_prefix(
    p: int,
    n: int,
    k: int,
    rng: Random,
    model: str = PICKUP,
    max_denominator: int = 64,
) -> tuple[Fraction, ...]:
    """Draw l_1..l_k inside the constraint region, each uniform on a
    rational grid over its own [min, max] interval.

    Feasible by construction; endpoints are included deliberately so the
    degenerate pinned configurations get exercised too.
    """
    if not 1 <= k <= n - 1:
        raise DomainError(f"prefix length must be 1..{n - 1}, got {k}")
    if max_denominator < 1:
        raise DomainError("max_denominator must be >= 1")
    system = constraint_system(p, n, model)
    prefix: list[Fraction] = []
    for _ in range(k):
        lo, hi = system.bounds(prefix)
        t = Fraction(rng.randrange(max_denominator + 1), max_denominator)
        prefix.append(lo + (hi - lo) * t)
    return tuple(prefix)
