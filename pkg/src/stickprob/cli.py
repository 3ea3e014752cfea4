"""Command-line interface.

Usage sketches::

    stickprob compute pn --model pickup --p 2 --n 4
    stickprob compute pn --model truncated --p 2 --n 3 --a 1/4
    stickprob compute pa --p 3 --n 6
    stickprob compute pr --p 2
    stickprob simulate --event pn --model broken --p 2 --n 4 --trials 1000000 --seed 42
    stickprob table pn --model pickup --p 2:4 --n 3:10 --output csv
    stickprob constants fib --p 3 --i 1:10
    stickprob constants m --p 3 --n 6
    stickprob constants emax --p 2 --n 5 --i 3
    stickprob verify --suite exact

Exact values cross this boundary as num/den strings or {"num", "den"}
objects, never floats.  Reports are JSON on stdout (CSV for tables on
request).  Exit status: 0 success, 1 verify found a failing identity,
2 usage error, 3 no closed form exists for the request (the message names
the Monte Carlo fallback).  Ranges use inclusive lo:hi syntax.  The only
environment variable honoured is STICKPROB_WORKERS, the default worker
count for simulation.
"""

from __future__ import annotations

import csv
import io
import json
import os
import sys
from dataclasses import asdict
from fractions import Fraction

import click

from .closedform import (
    ExactProb,
    is_vacuous,
    pa_pickup,
    pn_broken,
    pn_exponential,
    pn_pickup,
    pn_pickup_truncated,
    pr_pickup,
)
from .errors import DomainError, ResourceLimitError, UnsupportedFormulaError
from .montecarlo import (
    ALL_POLYGON,
    NO_POLYGON,
    RANDOM_SUBSET_POLYGON,
    DistributionSpec,
    EventSpec,
    estimate,
)
from .constraints import (
    BROKEN,
    PICKUP,
    LinearForm,
    m_constants,
    max_length_form,
    s_constants,
)
from .sequences import fib
from .verify import MC_BASE_SEED, run_suite

SCHEMA_VERSION = 1

_EVENT_KINDS = {"pn": NO_POLYGON, "pa": ALL_POLYGON, "pr": RANDOM_SUBSET_POLYGON}
_MODELS = ("pickup", "broken", "exponential", "truncated")


def _default_workers() -> int:
    raw = os.environ.get("STICKPROB_WORKERS")
    if raw is None:
        return 1
    try:
        workers = int(raw)
    except ValueError as exc:
        raise click.UsageError(f"STICKPROB_WORKERS must be an integer, got {raw!r}") from exc
    if workers < 1:
        raise click.UsageError("STICKPROB_WORKERS must be >= 1")
    return workers


def _parse_fraction(text: str, flag: str) -> Fraction:
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise click.UsageError(f"{flag} expects a num/den rational, got {text!r}") from exc
    return value


def _parse_range(text: str, flag: str) -> tuple[int, int]:
    parts = text.split(":")
    try:
        if len(parts) == 1:
            lo = hi = int(parts[0])
        elif len(parts) == 2:
            lo, hi = int(parts[0]), int(parts[1])
        else:
            raise ValueError
    except ValueError as exc:
        raise click.UsageError(f"{flag} expects an integer or lo:hi range, got {text!r}") from exc
    if lo > hi:
        raise click.UsageError(f"{flag}: empty range {text!r}")
    return lo, hi


def _exact_payload(prob: ExactProb, digits: int) -> dict:
    return {
        "exact": {"num": prob.numerator, "den": prob.denominator},
        "decimal": prob.decimal(digits),
    }


def _form_payload(form: LinearForm) -> dict:
    return {
        "arity": form.arity,
        "coeffs": list(form.coeffs),
        "constant": str(form.constant),
        "text": str(form),
    }


def _emit(payload: dict) -> None:
    click.echo(json.dumps(payload, indent=2))


def _closed_form_value(problem, model, p, n, a):
    """The exact probability for a (problem, model) pair, or None when no
    closed form is in scope."""
    try:
        if problem == "pn":
            if model == "pickup":
                return pn_pickup(p, n)
            if model == "broken":
                return pn_broken(p, n)
            if model == "exponential":
                return pn_exponential(p, n)
            if model == "truncated":
                return pn_pickup_truncated(p, n, a)
        if problem == "pa" and model == "pickup":
            return pa_pickup(p, n)
        if problem == "pr" and model == "pickup":
            return pr_pickup(p)
    except UnsupportedFormulaError:
        return None
    return None


@click.group()
def cli() -> None:
    """Exact and Monte Carlo probabilities for stick-length polygon problems."""


# ---------------------------------------------------------------------------
# compute
# ---------------------------------------------------------------------------


@cli.command()
@click.argument("problem", type=click.Choice(["pn", "pa", "pr"]))
@click.option("--model", type=click.Choice(_MODELS), default=None,
              help="Sampling model (pn only; pa/pr are pick-up sticks).")
@click.option("--p", "p", type=int, required=True, help="Polygon parameter: p+1 sides.")
@click.option("--n", "n", type=int, default=None, help="Number of sticks.")
@click.option("--a", "a", type=str, default=None,
              help="Truncation point as num/den (model truncated only).")
@click.option("--decimal-digits", type=int, default=12, show_default=True)
def compute(problem: str, model: str | None, p: int, n: int | None,
            a: str | None, decimal_digits: int) -> None:
    """Evaluate one closed-form probability exactly."""
    a_value = None
    if problem == "pn":
        model = model or "pickup"
        if n is None:
            raise click.UsageError("pn requires --n")
        if model == "truncated":
            if a is None:
                raise click.UsageError("model truncated requires --a")
            a_value = _parse_fraction(a, "--a")
        elif a is not None:
            raise click.UsageError("--a only applies to the truncated model")
    elif problem == "pa":
        if model not in (None, "pickup"):
            click.echo(
                f"no closed form for pa under the {model} model; "
                "fall back to the Monte Carlo estimator (simulate --event pa)",
                err=True,
            )
            sys.exit(3)
        model = "pickup"
        if n is None:
            raise click.UsageError("pa requires --n")
        if a is not None:
            raise click.UsageError("--a only applies to pn with the truncated model")
    else:  # pr
        if model not in (None, "pickup"):
            raise click.UsageError("pr is defined for the pick-up sticks model only")
        model = "pickup"
        if n is not None:
            raise click.UsageError("pr does not depend on --n")
        if a is not None:
            raise click.UsageError("--a only applies to pn with the truncated model")

    try:
        if problem == "pn":
            if model == "pickup":
                prob = pn_pickup(p, n)
            elif model == "broken":
                prob = pn_broken(p, n)
            elif model == "exponential":
                prob = pn_exponential(p, n)
            else:
                prob = pn_pickup_truncated(p, n, a_value)
        elif problem == "pa":
            prob = pa_pickup(p, n)
        else:
            prob = pr_pickup(p)
    except UnsupportedFormulaError as exc:
        click.echo(str(exc), err=True)
        sys.exit(3)
    except DomainError as exc:
        raise click.UsageError(str(exc)) from exc

    result = _exact_payload(prob, decimal_digits)
    if problem in ("pn", "pa"):
        result["vacuous"] = is_vacuous(p, n)
    _emit({
        "schema_version": SCHEMA_VERSION,
        "command": "compute",
        "inputs": {
            "problem": problem,
            "model": model,
            "p": p,
            "n": n,
            "a": str(a_value) if a_value is not None else None,
            "decimal_digits": decimal_digits,
        },
        "result": result,
    })


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------


@cli.command()
@click.option("--event", type=click.Choice(["pn", "pa", "pr"]), required=True)
@click.option("--model", type=click.Choice(_MODELS), default="pickup", show_default=True)
@click.option("--p", "p", type=int, required=True)
@click.option("--n", "n", type=int, required=True)
@click.option("--trials", type=int, default=100_000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--workers", type=int, default=None,
              help="Defaults to STICKPROB_WORKERS, else 1.")
@click.option("--a", "a", type=str, default=None,
              help="Truncation point as num/den (model truncated only).")
@click.option("--rate", type=float, default=None,
              help="Exponential rate (model exponential only).")
@click.option("--decimal-digits", type=int, default=12, show_default=True)
def simulate(event: str, model: str, p: int, n: int, trials: int, seed: int,
             workers: int | None, a: str | None, rate: float | None,
             decimal_digits: int) -> None:
    """Run the seeded Monte Carlo estimator; embeds the matching closed form
    and a z-score when one exists."""
    if workers is None:
        workers = _default_workers()
    a_value = None
    if model == "truncated":
        if a is None:
            raise click.UsageError("model truncated requires --a")
        a_value = _parse_fraction(a, "--a")
        if not 0 <= a_value < 1:
            raise click.UsageError("--a must lie in [0, 1)")
        dist = DistributionSpec.uniform_truncated(float(a_value))
    elif a is not None:
        raise click.UsageError("--a only applies to the truncated model")
    elif model == "exponential":
        dist = DistributionSpec.exponential(rate if rate is not None else 1.0)
    elif model == "broken":
        dist = DistributionSpec.broken_stick()
    else:
        dist = DistributionSpec.uniform01()
    if rate is not None and model != "exponential":
        raise click.UsageError("--rate only applies to the exponential model")

    try:
        spec = EventSpec(_EVENT_KINDS[event], p)
        mc = estimate(spec, dist, n, trials, seed, workers)
    except DomainError as exc:
        raise click.UsageError(str(exc)) from exc

    exact = _closed_form_value(event, model, p, n, a_value)
    z = None
    if exact is not None and mc.std_err > 0:
        z = (mc.p_hat - float(exact)) / mc.std_err
    _emit({
        "schema_version": SCHEMA_VERSION,
        "command": "simulate",
        "inputs": {
            "event": event,
            "model": model,
            "p": p,
            "n": n,
            "trials": trials,
            "seed": seed,
            "workers": workers,
            "a": str(a_value) if a_value is not None else None,
            "rate": dist.rate if model == "exponential" else None,
            "decimal_digits": decimal_digits,
        },
        "result": _exact_payload(exact, decimal_digits) if exact is not None else None,
        "mc": {
            "p_hat": mc.p_hat,
            "std_err": mc.std_err,
            "trials": mc.trials,
            "seed": mc.seed,
            "successes": mc.successes,
            "z_vs_exact": z,
        },
    })


# ---------------------------------------------------------------------------
# table
# ---------------------------------------------------------------------------


@cli.command()
@click.argument("problem", type=click.Choice(["pn", "pa", "pr"]))
@click.option("--model", type=click.Choice(_MODELS), default=None)
@click.option("--p", "p_range", type=str, required=True, help="p or lo:hi range.")
@click.option("--n", "n_range", type=str, default=None, help="n or lo:hi range.")
@click.option("--a", "a", type=str, default=None)
@click.option("--output", type=click.Choice(["json", "csv"]), default="json",
              show_default=True)
@click.option("--decimal-digits", type=int, default=12, show_default=True)
def table(problem: str, model: str | None, p_range: str, n_range: str | None,
          a: str | None, output: str, decimal_digits: int) -> None:
    """Tabulate a closed form over inclusive p and n ranges."""
    p_lo, p_hi = _parse_range(p_range, "--p")
    a_value = None
    if problem == "pr":
        if model not in (None, "pickup"):
            raise click.UsageError("pr is defined for the pick-up sticks model only")
        if n_range is not None:
            raise click.UsageError("pr does not depend on --n")
        model = "pickup"
        grid = [(p, None) for p in range(p_lo, p_hi + 1)]
    else:
        if n_range is None:
            raise click.UsageError(f"{problem} requires --n")
        n_lo, n_hi = _parse_range(n_range, "--n")
        if problem == "pa":
            if model not in (None, "pickup"):
                click.echo(
                    f"no closed form for pa under the {model} model; "
                    "fall back to the Monte Carlo estimator (simulate --event pa)",
                    err=True,
                )
                sys.exit(3)
            model = "pickup"
        else:
            model = model or "pickup"
        if model == "truncated":
            if a is None:
                raise click.UsageError("model truncated requires --a")
            a_value = _parse_fraction(a, "--a")
        elif a is not None:
            raise click.UsageError("--a only applies to the truncated model")
        grid = [(p, n) for p in range(p_lo, p_hi + 1) for n in range(n_lo, n_hi + 1)]

    cells = []
    for p, n in grid:
        try:
            if problem == "pr":
                prob = pr_pickup(p)
            elif problem == "pa":
                prob = pa_pickup(p, n)
            elif model == "pickup":
                prob = pn_pickup(p, n)
            elif model == "broken":
                prob = pn_broken(p, n)
            elif model == "exponential":
                prob = pn_exponential(p, n)
            else:
                prob = pn_pickup_truncated(p, n, a_value)
        except UnsupportedFormulaError as exc:
            click.echo(str(exc), err=True)
            sys.exit(3)
        except DomainError as exc:
            raise click.UsageError(str(exc)) from exc
        cells.append({
            "p": p,
            "n": n,
            "exact": {"num": prob.numerator, "den": prob.denominator},
            "decimal": prob.decimal(decimal_digits),
        })

    if output == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["p", "n", "exact", "decimal"])
        for cell in cells:
            writer.writerow([
                cell["p"],
                "" if cell["n"] is None else cell["n"],
                f"{cell['exact']['num']}/{cell['exact']['den']}",
                cell["decimal"],
            ])
        click.echo(buf.getvalue(), nl=False)
        return
    _emit({
        "schema_version": SCHEMA_VERSION,
        "command": "table",
        "inputs": {
            "problem": problem,
            "model": model,
            "p": p_range,
            "n": n_range,
            "a": str(a_value) if a_value is not None else None,
            "output": output,
            "decimal_digits": decimal_digits,
        },
        "cells": cells,
    })


# ---------------------------------------------------------------------------
# constants
# ---------------------------------------------------------------------------


@cli.group()
def constants() -> None:
    """Emit the integer machinery behind the formulas."""


@constants.command("fib")
@click.option("--p", "p", type=int, required=True)
@click.option("--i", "i_range", type=str, required=True, help="Index or lo:hi range.")
def constants_fib(p: int, i_range: str) -> None:
    """p-step Fibonacci numbers over an index range."""
    lo, hi = _parse_range(i_range, "--i")
    try:
        values = [fib(p, i) for i in range(lo, hi + 1)]
    except DomainError as exc:
        raise click.UsageError(str(exc)) from exc
    _emit({
        "schema_version": SCHEMA_VERSION,
        "command": "constants",
        "inputs": {"kind": "fib", "p": p, "lo": lo, "hi": hi},
        "result": {"values": values},
    })


@constants.command("m")
@click.option("--p", "p", type=int, required=True)
@click.option("--n", "n", type=int, required=True)
def constants_m(p: int, n: int) -> None:
    """Pick-up sticks denominators m_1..m_n."""
    try:
        values = list(m_constants(p, n))
    except DomainError as exc:
        raise click.UsageError(str(exc)) from exc
    _emit({
        "schema_version": SCHEMA_VERSION,
        "command": "constants",
        "inputs": {"kind": "m", "p": p, "n": n},
        "result": {"values": values},
    })


@constants.command("s")
@click.option("--p", "p", type=int, required=True)
@click.option("--n", "n", type=int, required=True)
def constants_s(p: int, n: int) -> None:
    """Broken-stick denominators s_1..s_{n-1} (s_n = 1 implied)."""
    try:
        values = list(s_constants(p, n))
    except DomainError as exc:
        raise click.UsageError(str(exc)) from exc
    _emit({
        "schema_version": SCHEMA_VERSION,
        "command": "constants",
        "inputs": {"kind": "s", "p": p, "n": n},
        "result": {"values": values, "terminal": 1},
    })


@constants.command("emax")
@click.option("--p", "p", type=int, required=True)
@click.option("--n", "n", type=int, required=True)
@click.option("--i", "i", type=int, required=True)
@click.option("--model", type=click.Choice([PICKUP, BROKEN]), default=PICKUP,
              show_default=True)
def constants_emax(p: int, n: int, i: int, model: str) -> None:
    """The upper-bound data for one stick: denominator and numerator form."""
    try:
        den, form = max_length_form(p, n, i, model)
    except DomainError as exc:
        raise click.UsageError(str(exc)) from exc
    _emit({
        "schema_version": SCHEMA_VERSION,
        "command": "constants",
        "inputs": {"kind": "emax", "p": p, "n": n, "i": i, "model": model},
        "result": {
            "denominator": den,
            "numerator_form": _form_payload(form),
            "text": f"l{i}_max = (1 - ({form})) / {den}",
        },
    })


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


@cli.command()
@click.option("--suite", type=click.Choice(["all", "exact", "mc"]), default="all",
              show_default=True)
@click.option("--trials", type=int, default=1_000_000, show_default=True,
              help="Trials per Monte Carlo concordance target.")
@click.option("--seed", type=int, default=MC_BASE_SEED, show_default=True)
@click.option("--workers", type=int, default=None,
              help="Defaults to STICKPROB_WORKERS, else 1.")
def verify(suite: str, trials: int, seed: int, workers: int | None) -> None:
    """Run the named identity checks; exit nonzero if any fail."""
    if workers is None:
        workers = _default_workers()
    try:
        results = run_suite(suite, trials=trials, seed=seed, workers=workers)
    except (DomainError, ResourceLimitError, ValueError) as exc:
        raise click.UsageError(str(exc)) from exc
    payload = {
        "schema_version": SCHEMA_VERSION,
        "command": "verify",
        "inputs": {"suite": suite, "trials": trials, "seed": seed, "workers": workers},
        "checks": [asdict(result) for result in results],
        "passed": all(result.passed for result in results),
    }
    _emit(payload)
    if not payload["passed"]:
        sys.exit(1)


def main() -> None:
    cli(prog_name="stickprob")


if __name__ == "__main__":
    main()
