"""p-step Fibonacci numbers and the sums built from them.

Every closed form in this package is a product of reciprocals of values
derived from the p-step Fibonacci sequence: F_1 = 1, the p-1 terms before
it are 0, and each later term is the sum of the previous p terms (p = 2
gives Fibonacci, p = 3 Tribonacci).  Values are plain Python ints on
purpose: they leave 64-bit range near i = 90 already for p = 2, and the
probability formulas multiply long runs of them.
"""

from __future__ import annotations

import threading

from .errors import DomainError

__all__ = ["StepFibTable", "fib", "fib_prefix_sum", "t_value"]


class StepFibTable:
    """Memoized p-step Fibonacci numbers, extended on demand.

    Lookups behave like a pure function of the index: extension is
    serialized by a lock, published entries are never mutated, and nothing
    is evicted (index ranges stay tiny at desk scale).  Indices below the
    initial zero block (lowest defined index: 2 - p) are rejected rather
    than treated as zeros.
    """

    def __init__(self, p: int) -> None:
        if p < 2:
            raise DomainError(f"step count p must be >= 2, got {p}")
        self.p = p
        self.low = 2 - p
        self._vals = [0] * (p - 1) + [1]  # F_{2-p} .. F_1
        self._lock = threading.Lock()

    def fib(self, i: int) -> int:
        """F_i^p, defined for i >= 2 - p."""
        if i < self.low:
            raise DomainError(
                f"F_{i} with step count {self.p} is undefined: "
                f"indices below {self.low} lie outside the initial block"
            )
        pos = i - self.low
        if pos >= len(self._vals):
            with self._lock:
                while pos >= len(self._vals):
                    self._vals.append(sum(self._vals[-self.p:]))
        return self._vals[pos]

    def prefix_sum(self, i: int) -> int:
        """SF_i^p = F_1^p + ... + F_i^p, defined for i >= 1."""
        if i < 1:
            raise DomainError(f"prefix sums need i >= 1, got {i}")
        return sum(self.fib(j) for j in range(1, i + 1))


_TABLES: dict[int, StepFibTable] = {}
_TABLES_LOCK = threading.Lock()


def _table(p: int) -> StepFibTable:
    table = _TABLES.get(p)
    if table is None:
        with _TABLES_LOCK:
            table = _TABLES.setdefault(p, StepFibTable(p))
    return table


def fib(p: int, i: int) -> int:
    """The i-th p-step Fibonacci number F_i^p."""
    return _table(p).fib(i)


def fib_prefix_sum(p: int, i: int) -> int:
    """SF_i^p, the sum of the first i p-step Fibonacci numbers."""
    return _table(p).prefix_sum(i)


def t_value(p: int, k: int) -> int:
    """t_k for the exponential-lengths formula: t_1 = 1, t_k = 0 for
    2 - p <= k <= 0, and t_k = 1 + sum of the previous p values.

    Equals fib_prefix_sum(p, k) for every k >= 1, but is generated by its
    own recurrence so the two routes can be checked against each other.
    """
    if p < 2:
        raise DomainError(f"step count p must be >= 2, got {p}")
    if k < 1:
        raise DomainError(f"t_k is generated for k >= 1 only, got {k}")
    vals = [0] * (p - 1) + [1]  # t_{2-p} .. t_1
    for _ in range(k - 1):
        vals.append(1 + sum(vals[-p:]))
    return vals[-1]
