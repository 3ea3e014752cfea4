"""Named consistency checks spanning the whole package.

Two suites: ``exact`` runs every identity that must hold with zero
tolerance (different derivations of the same constants, closed forms
against the symbolic integrator, predicate algebra), and ``mc`` shakes
every closed form against seeded Monte Carlo at 4 standard errors.  The
CLI ``verify`` command renders the results as JSON and exits nonzero if
anything failed.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial, gcd
from random import Random

from . import constraints, montecarlo, oracle
from .closedform import (
    pa_pickup,
    pn_broken,
    pn_exponential,
    pn_pickup,
    pn_pickup_quadrilateral,
    pn_pickup_truncated,
    pr_pickup,
)
from .constraints import (
    check_max_min_identity,
    e_vector,
    m_constants,
    m_constants_via_jacobian,
    max_length_form,
    s_constants,
    sample_feasible_prefix,
)
from .montecarlo import (
    ALL_POLYGON,
    NO_POLYGON,
    RANDOM_SUBSET_POLYGON,
    DistributionSpec,
    EventSpec,
    estimate,
)
from .sequences import fib, fib_prefix_sum, t_value

__all__ = [
    "CheckResult",
    "ConcordanceTarget",
    "concordance_targets",
    "run_concordance",
    "run_suite",
    "EXACT_CHECKS",
    "MC_BASE_SEED",
]

MC_BASE_SEED = 20250810


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


def _result(name: str, failures: list[str]) -> CheckResult:
    if failures:
        shown = "; ".join(failures[:4])
        if len(failures) > 4:
            shown += f"; and {len(failures) - 4} more"
        return CheckResult(name, False, shown)
    return CheckResult(name, True)


# ---------------------------------------------------------------------------
# exact suite
# ---------------------------------------------------------------------------


def check_t_matches_prefix_sums() -> CheckResult:
    bad = [
        f"p={p} k={k}"
        for p in range(2, 7)
        for k in range(1, 41)
        if t_value(p, k) != fib_prefix_sum(p, k)
    ]
    return _result("t_matches_prefix_sums", bad)


def check_doubling_inside_initial_window() -> CheckResult:
    bad = [
        f"p={p} i={i}"
        for p in range(2, 9)
        for i in range(2, p + 1)
        if fib(p, i + 1) != 2 * fib(p, i)
    ]
    return _result("doubling_inside_initial_window", bad)


def check_prefix_sum_telescopes() -> CheckResult:
    bad = [
        f"p={p} i={i}"
        for p in range(2, 7)
        for i in range(2, 41)
        if fib_prefix_sum(p, i) - fib_prefix_sum(p, i - 1) != fib(p, i)
    ]
    return _result("prefix_sum_telescopes", bad)


def check_weighted_tail_collapses_to_index() -> CheckResult:
    # q == F_{q+1} - sum_{j=1}^{q-2} j F_{q-j} whenever q <= p
    bad = [
        f"p={p} q={q}"
        for p in range(3, 11)
        for q in range(3, p + 1)
        if q != fib(p, q + 1) - sum(j * fib(p, q - j) for j in range(1, q - 1))
    ]
    return _result("weighted_tail_collapses_to_index", bad)


def check_triple_derivation_of_m() -> CheckResult:
    bad = []
    for p in range(2, 7):
        for n in range(p + 1, 31):
            closed = m_constants(p, n)
            jac = m_constants_via_jacobian(p, n)
            vec = tuple(
                max_length_form(p, n, i)[0] for i in range(1, n)
            ) + (1,)
            if not closed == jac == vec:
                bad.append(f"p={p} n={n}")
    return _result("triple_derivation_of_m", bad)


def check_s_matches_vector_route() -> CheckResult:
    bad = []
    for p in range(2, 7):
        for n in range(p + 1, 31):
            closed = s_constants(p, n)
            vec = tuple(
                max_length_form(p, n, i, constraints.BROKEN)[0]
                for i in range(1, n)
            )
            if closed != vec:
                bad.append(f"p={p} n={n}")
    return _result("s_matches_vector_route", bad)


def check_e_vector_leads_with_step_fib() -> CheckResult:
    bad = [
        f"p={p} k={k}"
        for p in range(2, 7)
        for k in range(1, 31)
        if e_vector(p, k)[0] != fib(p, k)
    ]
    return _result("e_vector_leads_with_step_fib", bad)


def check_fibonacci_max_forms_for_triangles() -> CheckResult:
    bad = []
    for n in range(3, 21):
        for i in range(2, n):
            den, form = max_length_form(2, n, i)
            expected = constraints.LinearForm(
                i - 1, (0,) * (i - 2) + (fib(2, n - i),)
            )
            if den != fib(2, n - i + 1) or form != expected:
                bad.append(f"n={n} i={i}")
    return _result("fibonacci_max_forms_for_triangles", bad)


def check_broken_prefix_sums_for_triangles() -> CheckResult:
    bad = [
        f"n={n} i={i}"
        for n in range(3, 21)
        for i in range(1, n)
        if s_constants(2, n)[i - 1] != fib_prefix_sum(2, n - i + 1)
    ]
    return _result("broken_prefix_sums_for_triangles", bad)


def check_denominators_nonincreasing() -> CheckResult:
    bad = []
    for p in range(2, 7):
        for n in range(p + 1, 31):
            m = m_constants(p, n)
            if any(a < b for a, b in zip(m, m[1:])) or m[-1] < 1:
                bad.append(f"p={p} n={n}")
    return _result("denominators_nonincreasing", bad)


def check_interval_telescoping_identity(
    prefixes_per_system: int = 200,
) -> CheckResult:
    rng = Random(1105)
    bad = []
    for p in (2, 3, 4):
        for n in range(p + 1, 9):
            for _ in range(prefixes_per_system):
                k = rng.randint(1, n - 1)
                prefix = sample_feasible_prefix(p, n, k, rng)
                if not check_max_min_identity(p, n, prefix):
                    bad.append(f"p={p} n={n} prefix={prefix}")
    return _result("interval_telescoping_identity", bad)


def check_quadrilateral_form_agrees() -> CheckResult:
    bad = [
        f"n={n}"
        for n in range(4, 21)
        if pn_pickup(3, n).fraction != pn_pickup_quadrilateral(n).fraction
    ]
    return _result("quadrilateral_form_agrees", bad)


def check_triangle_product_inverts_fibonorial() -> CheckResult:
    bad = []
    for n in range(3, 21):
        prod = 1
        for i in range(1, n + 1):
            prod *= fib(2, i)
        if pn_pickup(2, n).fraction * prod != 1:
            bad.append(f"n={n}")
    return _result("triangle_product_inverts_fibonorial", bad)


def check_all_gone_reduction_factorial() -> CheckResult:
    bad = [
        f"n={n}"
        for n in range(3, 13)
        if pn_pickup(n - 1, n).fraction != Fraction(1, factorial(n - 1))
    ]
    return _result("all_gone_reduction_factorial", bad)


def check_broken_reduction_power_of_two() -> CheckResult:
    bad = [
        f"n={n}"
        for n in range(3, 13)
        if pn_broken(n - 1, n).fraction != Fraction(n, 2 ** (n - 1))
    ]
    return _result("broken_reduction_power_of_two", bad)


def check_exponential_matches_broken() -> CheckResult:
    bad = [
        f"p={p} n={n}"
        for p in range(2, 6)
        for n in range(p + 1, 13)
        if pn_exponential(p, n).fraction != pn_broken(p, n).fraction
    ]
    return _result("exponential_matches_broken", bad)


def check_complement_at_minimal_n() -> CheckResult:
    bad = [
        f"p={p}"
        for p in (2, 3)
        if pa_pickup(p, p + 1).fraction != 1 - pn_pickup(p, p + 1).fraction
    ]
    return _result("complement_at_minimal_n", bad)


def check_truncated_nonincreasing_in_cutoff() -> CheckResult:
    bad = []
    for p, n in ((2, 3), (2, 5), (3, 4), (3, 6)):
        cap = Fraction(1, m_constants(p, n)[0])
        grid = [cap * Fraction(j, 16) for j in range(17)]
        values = [pn_pickup_truncated(p, n, a).fraction for a in grid]
        if any(x < y for x, y in zip(values, values[1:])):
            bad.append(f"p={p} n={n} not nonincreasing")
        if values[-1] != 0:
            bad.append(f"p={p} n={n} endpoint {values[-1]} != 0")
        if values[0] != pn_pickup(p, n).fraction:
            bad.append(f"p={p} n={n} a=0 mismatch")
    return _result("truncated_nonincreasing_in_cutoff", bad)


def check_probabilities_reduced_and_in_range() -> CheckResult:
    bad = []
    probs = []
    for p in range(2, 6):
        for n in range(1, 13):
            probs.append(pn_pickup(p, n))
            probs.append(pn_broken(p, n))
            probs.append(pn_exponential(p, n))
            if p in (2, 3):
                probs.append(pa_pickup(p, n))
        probs.append(pr_pickup(p))
    for prob in probs:
        if not 0 <= prob.fraction <= 1:
            bad.append(f"{prob} out of range")
        if gcd(prob.numerator, prob.denominator) != 1:
            bad.append(f"{prob} not reduced")
    return _result("probabilities_reduced_and_in_range", bad)


def check_symbolic_integration_matches_closed_form() -> CheckResult:
    grid = [(p, n) for p in (2, 3) for n in range(p + 1, 8)]
    grid += [(4, 5), (4, 6)]
    bad = [
        f"p={p} n={n}"
        for p, n in grid
        if oracle.symbolic_pn_pickup(p, n).fraction != pn_pickup(p, n).fraction
    ]
    return _result("symbolic_integration_matches_closed_form", bad)


def check_symbolic_truncated_matches_closed_form() -> CheckResult:
    cases = [
        (2, 3, Fraction(1, 4)),
        (2, 3, Fraction(0)),
        (2, 3, Fraction(1, 2)),
        (2, 4, Fraction(1, 10)),
        (3, 4, Fraction(1, 8)),
    ]
    bad = []
    for p, n, a in cases:
        sym = oracle.symbolic_pn_truncated(p, n, a).fraction
        if sym != pn_pickup_truncated(p, n, a).fraction:
            bad.append(f"p={p} n={n} a={a}")
    if oracle.symbolic_pn_truncated(2, 3, Fraction(1, 4)).fraction != Fraction(4, 27):
        bad.append("reference value 4/27 missed")
    return _result("symbolic_truncated_matches_closed_form", bad)


def check_partial_integrals_vanish_at_max() -> CheckResult:
    bad = [
        f"p={p} n={n}"
        for p, n in ((2, 4), (2, 6), (3, 5), (4, 6))
        if not oracle.intermediates_vanish_at_max(p, n)
    ]
    return _result("partial_integrals_vanish_at_max", bad)


def check_matrix_recurrence_matches_step_fib() -> CheckResult:
    bad = []
    for p in range(2, 7):
        for l in range(1, 31):
            r = oracle.r_vector(p, l)
            if r[p - 1] != fib(p, l):
                bad.append(f"p={p} l={l} last entry")
                continue
            if p >= 2 and r[p - 2] != fib(p, l + 1):
                bad.append(f"p={p} l={l} second-to-last entry")
                continue
            for i in range(1, p - 1):
                expected = fib(p, l + p - i) - sum(
                    (p - i - j) * fib(p, l + j - 1) for j in range(1, p - i)
                )
                if r[i - 1] != expected:
                    bad.append(f"p={p} l={l} entry {i}")
                    break
    return _result("matrix_recurrence_matches_step_fib", bad)


EXACT_CHECKS = (
    check_t_matches_prefix_sums,
    check_doubling_inside_initial_window,
    check_prefix_sum_telescopes,
    check_weighted_tail_collapses_to_index,
    check_triple_derivation_of_m,
    check_s_matches_vector_route,
    check_e_vector_leads_with_step_fib,
    check_fibonacci_max_forms_for_triangles,
    check_broken_prefix_sums_for_triangles,
    check_denominators_nonincreasing,
    check_interval_telescoping_identity,
    check_quadrilateral_form_agrees,
    check_triangle_product_inverts_fibonorial,
    check_all_gone_reduction_factorial,
    check_broken_reduction_power_of_two,
    check_exponential_matches_broken,
    check_complement_at_minimal_n,
    check_truncated_nonincreasing_in_cutoff,
    check_probabilities_reduced_and_in_range,
    check_symbolic_integration_matches_closed_form,
    check_symbolic_truncated_matches_closed_form,
    check_partial_integrals_vanish_at_max,
    check_matrix_recurrence_matches_step_fib,
)


# ---------------------------------------------------------------------------
# Monte Carlo suite
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConcordanceTarget:
    label: str
    event: EventSpec
    dist: DistributionSpec
    n: int
    exact: Fraction


def concordance_targets() -> tuple[ConcordanceTarget, ...]:
    """Every closed form worth shaking statistically, with its exact value."""
    targets: list[ConcordanceTarget] = []

    def add(label, kind, dist, p, n, exact):
        targets.append(
            ConcordanceTarget(label, EventSpec(kind, p), dist, n, exact)
        )

    uniform = DistributionSpec.uniform01()
    broken = DistributionSpec.broken_stick()
    expo = DistributionSpec.exponential(1.0)
    trunc = DistributionSpec.uniform_truncated(0.1)

    for n in range(3, 8):
        add(f"pn-pickup-p2-n{n}", NO_POLYGON, uniform, 2, n,
            pn_pickup(2, n).fraction)
    for n in range(4, 8):
        add(f"pn-pickup-p3-n{n}", NO_POLYGON, uniform, 3, n,
            pn_pickup(3, n).fraction)
    for n in range(3, 7):
        add(f"pn-broken-p2-n{n}", NO_POLYGON, broken, 2, n,
            pn_broken(2, n).fraction)
    for n in range(3, 6):
        add(f"pn-exponential-p2-n{n}", NO_POLYGON, expo, 2, n,
            pn_exponential(2, n).fraction)
    for n in range(3, 5):
        add(f"pn-truncated-p2-n{n}-a1/10", NO_POLYGON, trunc, 2, n,
            pn_pickup_truncated(2, n, Fraction(1, 10)).fraction)
    for n in range(3, 7):
        add(f"pa-pickup-p2-n{n}", ALL_POLYGON, uniform, 2, n,
            pa_pickup(2, n).fraction)
    for n in range(4, 7):
        add(f"pa-pickup-p3-n{n}", ALL_POLYGON, uniform, 3, n,
            pa_pickup(3, n).fraction)
    for p in (2, 3):
        add(f"pr-pickup-p{p}", RANDOM_SUBSET_POLYGON, uniform, p, 6,
            pr_pickup(p).fraction)
    return tuple(targets)


def run_concordance(
    trials: int = 10**6,
    seed: int = MC_BASE_SEED,
    workers: int = 1,
    retry_factor: int = 10,
) -> list[CheckResult]:
    """Compare every target against its closed form at 4 standard errors.

    A single miss is rerun once at retry_factor times the trials before it
    counts as a failure; a genuine defect will not survive the tighter
    interval, while an unlucky draw almost always will.
    """
    results = []
    for offset, target in enumerate(concordance_targets()):
        est = estimate(
            target.event, target.dist, target.n, trials, seed + offset, workers
        )
        diff = abs(est.p_hat - float(target.exact))
        retried = False
        if diff > 4 * est.std_err:
            est = estimate(
                target.event,
                target.dist,
                target.n,
                trials * retry_factor,
                seed + offset,
                workers,
            )
            diff = abs(est.p_hat - float(target.exact))
            retried = True
        passed = diff <= 4 * est.std_err
        z = diff / est.std_err if est.std_err else float(diff > 0) * float("inf")
        detail = (
            f"p_hat={est.p_hat:.6f} exact={float(target.exact):.6f} "
            f"z={z:.2f} trials={est.trials}"
        )
        if retried:
            detail += " (retried)"
        results.append(CheckResult(f"mc_concordance[{target.label}]", passed, detail))
    return results


def check_workers_bit_identical(trials: int, seed: int) -> CheckResult:
    bad = []
    cases = [
        (EventSpec(NO_POLYGON, 2), DistributionSpec.uniform01(), 5),
        (EventSpec(RANDOM_SUBSET_POLYGON, 2), DistributionSpec.broken_stick(), 5),
    ]
    for event, dist, n in cases:
        runs = [
            estimate(event, dist, n, trials, seed, workers=w) for w in (1, 4, 8)
        ]
        if len({(r.successes, r.p_hat) for r in runs}) != 1:
            bad.append(f"{event.kind}/{dist.kind}")
    return _result("workers_bit_identical", bad)


def check_exponential_rate_invariant(trials: int, seed: int) -> CheckResult:
    event = EventSpec(NO_POLYGON, 2)
    lo = estimate(event, DistributionSpec.exponential(1.0), 4, trials, seed)
    hi = estimate(event, DistributionSpec.exponential(5.0), 4, trials, seed + 1)
    joint = (lo.std_err**2 + hi.std_err**2) ** 0.5
    ok = abs(lo.p_hat - hi.p_hat) <= 4 * joint
    return CheckResult(
        "exponential_rate_invariant",
        ok,
        f"rate1={lo.p_hat:.6f} rate5={hi.p_hat:.6f} joint_sigma={joint:.2e}",
    )


def check_predicate_scale_invariance(seed: int) -> CheckResult:
    rng = Random(seed)
    bad = []
    for _ in range(500):
        n = rng.randint(2, 9)
        p = rng.randint(2, 4)
        lengths = sorted(rng.random() for _ in range(n))
        scale = rng.choice((0.001, 0.5, 3.0, 1000.0))
        scaled = [scale * x for x in lengths]
        if montecarlo.no_polygon(lengths, p) != montecarlo.no_polygon(scaled, p):
            bad.append(f"no_polygon n={n} p={p}")
        if montecarlo.all_polygon(lengths, p) != montecarlo.all_polygon(scaled, p):
            bad.append(f"all_polygon n={n} p={p}")
    return _result("predicate_scale_invariance", bad)


def check_events_mutually_exclusive(seed: int) -> CheckResult:
    rng = Random(seed)
    bad = []
    for _ in range(500):
        p = rng.randint(2, 4)
        n = rng.randint(p + 1, 10)
        lengths = sorted(rng.random() for _ in range(n))
        if montecarlo.no_polygon(lengths, p) and montecarlo.all_polygon(lengths, p):
            bad.append(f"n={n} p={p}")
    return _result("events_mutually_exclusive", bad)


def run_suite(
    suite: str = "all",
    trials: int = 10**6,
    seed: int = MC_BASE_SEED,
    workers: int = 1,
) -> list[CheckResult]:
    if suite not in ("all", "exact", "mc"):
        raise ValueError(f"unknown suite {suite!r}")
    results: list[CheckResult] = []
    if suite in ("all", "exact"):
        for check in EXACT_CHECKS:
            results.append(check())
    if suite in ("all", "mc"):
        results.append(check_predicate_scale_invariance(seed))
        results.append(check_events_mutually_exclusive(seed + 1))
        results.append(check_workers_bit_identical(min(trials, 10**6), seed))
        results.append(check_exponential_rate_invariant(trials, seed))
        results.extend(run_concordance(trials=trials, seed=seed, workers=workers))
    return results
