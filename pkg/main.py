#!/usr/bin/env python3
"""
Inhomogeneous Approximation Lab CLI
Exact arithmetic, arc measures, solution counts, dimension estimates and
divergence-criterion traces for limsup sets of shifted rational arcs.
"""

import json
import logging
import sys
import time
from datetime import datetime
from functools import wraps
from pathlib import Path
from typing import Any, Callable, Dict, Optional

import click
import numpy as np
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

import config
from errors import ConsistencyError, DegenerateInputError, InternalError, LabError
from results_writer import ResultsWriter
from run_config import RunConfig, build_run_config

# Set up logging
logging.basicConfig(
    level=getattr(logging, config.LOG_LEVEL.upper(), logging.INFO),
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s"
)
logger = logging.getLogger(__name__)

console = Console()


def _fmt(value: Any) -> str:
    if value is None:
        return "-"
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def _split_floats(text: Optional[str]):
    if text is None:
        return None
    return [float(part) for part in text.split(",") if part.strip()]


def _split_ints(text: Optional[str]):
    if text is None:
        return None
    return [int(part) for part in text.split(",") if part.strip()]


def _execute(command: str, run_file: Optional[str], overrides: Dict[str, Any], body: Callable):
    """Validate, run, persist; map errors to exit codes and error.json."""
    started_at = datetime.now()
    t0 = time.perf_counter()
    run_config: Optional[RunConfig] = None
    writer = ResultsWriter(overrides.get("output_dir") or config.OUTPUT_DIR, command)
    try:
        run_config = build_run_config(command, Path(run_file) if run_file else None, overrides)
        applied = config.apply_budget_overrides(run_config.budgets)
        if applied:
            logger.info(f"Budget overrides for this run: {applied}")
        writer = ResultsWriter(run_config.output_dir, command, run_config.formats)
        body(run_config, writer)
        manifest = writer.write_manifest(run_config, started_at, time.perf_counter() - t0)
        console.print(f"[dim]Results in {manifest.parent}[/dim]")
    except LabError as e:
        _abort(e, writer, run_config, started_at, t0)
    except Exception as e:
        logger.exception(f"Unexpected failure in {command}")
        _abort(InternalError(f"{type(e).__name__}: {e}"), writer, run_config, started_at, t0)


def _abort(error: LabError, writer: ResultsWriter, run_config, started_at, t0):
    console.print(f"[red]{error.kind}: {error.message}[/red]")
    try:
        writer.write_error(error)
        if run_config is not None:
            writer.write_manifest(run_config, started_at, time.perf_counter() - t0, status=error.kind)
    except OSError as io_error:
        logger.error(f"Could not write error report: {io_error}")
    sys.exit(error.exit_code)


def run_options(func):
    """Options every computing command shares."""
    @click.option("--config", "run_file", type=click.Path(), help="KEY=VALUE run file")
    @click.option("--output-dir", "-o", type=click.Path(), help="Output directory")
    @click.option("--format", "formats", multiple=True, type=click.Choice(["csv", "json"]), help="Output formats")
    @click.option("--workers", "-w", type=int, help="Worker processes")
    @wraps(func)
    def wrapper(*args, **kwargs):
        return func(*args, **kwargs)
    return wrapper


def profile_options(func):
    """Family selection and family parameters."""
    @click.option("--family", "-f", help="Profile family (see `families`)")
    @click.option("--value", type=float, help="constant / divisor-bounded: f value")
    @click.option("--tau", type=float, help="power / divisor-bounded: exponent tau > 1")
    @click.option("--theta", type=float, help="Constant shift in [0, 1/2]")
    @click.option("--cap", type=int, help="factorial-blocks: m(k) = min(k, cap)")
    @click.option("--schedule", help="factorial-blocks: comma-separated m(0), m(1), ...")
    @click.option("--exponent", type=float, help="factorial-blocks: log exponent")
    @click.option("--base", type=click.Choice(["constant", "power"]), help="divisor-bounded: base family")
    @click.option("--eps", type=float, help="divisor-bounded: divisor-bound exponent slack")
    @click.option("--path", type=click.Path(), help="user-file: table file")
    @click.option("--f-range", type=click.Choice(["standard", "extended", "unbounded"]), help="user-file: declared range")
    @click.option("--full-fractions/--reduced", "full_fractions", default=None, help="Use all fractions m/n")
    @wraps(func)
    def wrapper(*args, **kwargs):
        return func(*args, **kwargs)
    return wrapper


def _common(kwargs: Dict[str, Any]) -> Dict[str, Any]:
    """RunConfig overrides from the shared options; None means unset."""
    params = {
        key: kwargs.pop(key, None)
        for key in ("value", "tau", "theta", "cap", "exponent", "base", "eps", "path", "f_range")
    }
    schedule = kwargs.pop("schedule", None)
    if schedule is not None:
        params["schedule"] = _split_ints(schedule)
    full = kwargs.pop("full_fractions", None)
    formats = kwargs.pop("formats", ())
    return {
        "family": kwargs.pop("family", None),
        "params": {k: v for k, v in params.items() if v is not None} or None,
        "reduced": None if full is None else not full,
        "output_dir": kwargs.pop("output_dir", None),
        "formats": list(formats) or None,
        "workers": kwargs.pop("workers", None),
    }


@click.group()
@click.version_option(version=config.APP_VERSION)
def cli():
    """Inhomogeneous Approximation Lab - finite-N experiments on limsup sets."""
    pass


@cli.command()
@click.option("--limit", "-n", type=int, help="Sieve up to this n")
@click.option("--rows", "table_rows", type=int, help="Table rows to write (default 1000)")
@run_options
def sieve(run_file, **kwargs):
    """Build totient / divisor / Moebius tables and report statistics."""
    from arith_core import build_tables, dtilde, gcd_sum_identity

    overrides = {**_common(kwargs), **kwargs}

    def body(rc: RunConfig, writer: ResultsWriter):
        console.print(Panel(f"Sieving up to {rc.limit:,}", style="blue"))
        tables = build_tables(rc.limit)
        d = tables.divisors[1:]
        stats = {
            "limit": rc.limit,
            "primes": int(len(tables.primes)),
            "totient_sum": int(tables.totient.sum()),
            "max_divisors": int(d.max()),
            "max_divisors_at": int(np.argmax(d)) + 1,
            "squarefree_fraction": float((tables.mobius[1:] != 0).mean()),
        }
        check_top = min(rc.limit, 1000)
        failed = [n for n in range(1, check_top + 1) if not gcd_sum_identity(n, tables)]
        if failed:
            raise ConsistencyError(f"gcd sum differs from n * dtilde(n) at n={failed[0]}", {"failed": failed})
        dtildes = [dtilde(n, tables) for n in range(1, check_top + 1)]
        peak = max(range(check_top), key=dtildes.__getitem__)
        stats.update({
            "gcd_sum_checked_to": check_top,
            "dtilde_max": float(dtildes[peak]),
            "dtilde_max_at": peak + 1,
        })
        top = min(rc.limit, rc.table_rows)
        writer.write_csv("sieve", ResultsWriter.SIEVE_HEADERS, (
            {
                "n": n,
                "totient": tables.totient[n],
                "divisors": tables.divisors[n],
                "mobius": tables.mobius[n],
                "smallest_factor": tables.smallest_factor[n],
            }
            for n in range(1, top + 1)
        ))
        writer.write_json("sieve", stats)

        table = Table(title="Sieve statistics")
        table.add_column("Statistic", style="cyan")
        table.add_column("Value")
        for key, value in stats.items():
            table.add_row(key, _fmt(value))
        console.print(table)

    _execute("sieve", run_file, overrides, body)


@cli.command()
@click.option("--n", "n", type=int, help="Denominator (start of range)")
@click.option("--n-hi", type=int, help="End of the denominator range")
@profile_options
@run_options
def measure(run_file, **kwargs):
    """Arcs and Lebesgue measure of A_n for one n or a range."""
    from approx_sets import arcs_for, union_measure
    from approx_sets import measure as arc_measure
    from arith_core import build_tables

    overrides = {**_common(kwargs), **kwargs}

    def body(rc: RunConfig, writer: ResultsWriter):
        top = rc.n_hi or rc.n
        profile = rc.profile()
        tables = build_tables(top)
        console.print(Panel(f"Measuring A_n for n in [{rc.n}, {top}] ({profile.family})", style="blue"))
        rows, sets = [], []
        for n in range(rc.n, top + 1):
            arcs = arcs_for(n, profile, rc.reduced, tables)
            sets.append(arcs)
            f = profile.f(n)
            formula = None
            if f <= 0.5:
                formula = 2.0 * f / n * int(tables.totient[n]) if rc.reduced else 2.0 * f
            rows.append({
                "n": n,
                "f": f,
                "theta": profile.theta(n),
                "reduced": rc.reduced,
                "pieces": len(arcs),
                "measure": arc_measure(arcs),
                "formula": formula,
            })
        writer.write_csv("measure", ResultsWriter.MEASURE_HEADERS, rows)
        result = {"profile": profile.to_dict(), "rows": rows, "union_measure": union_measure(sets)}
        if len(sets) == 1:
            result["arcs"] = sets[0].to_dict()
        writer.write_json("measure", result)

        table = Table(title="Arc measures")
        for column in ("n", "f", "pieces", "measure", "formula"):
            table.add_column(column, style="cyan" if column == "n" else None)
        for row in rows[:20]:
            table.add_row(*(_fmt(row[c]) for c in ("n", "f", "pieces", "measure", "formula")))
        console.print(table)
        if len(rows) > 20:
            console.print(f"[dim]...and {len(rows) - 20} more[/dim]")
        console.print(f"Union measure: [bold]{result['union_measure']:.12g}[/bold]")

    _execute("measure", run_file, overrides, body)


@cli.command()
@click.option("--n", "n", type=int, help="First denominator")
@click.option("--m", "m", type=int, help="Second denominator")
@click.option("--tol", type=float, help="Series truncation tolerance")
@click.option("--mode", type=click.Choice(["exact", "series", "closed"]), help="'series' makes the truncated series mandatory")
@profile_options
@run_options
def intersect(run_file, **kwargs):
    """Exact sweep vs. Fourier series for lambda(A_n ∩ A_m)."""
    from approx_sets import arcs_for, intersection_measure
    from arith_core import build_tables
    from criteria import full_fraction_bound
    from errors import BudgetError
    from fourier_measure import intersection_series, series_closed_form

    overrides = {**_common(kwargs), **kwargs}

    def body(rc: RunConfig, writer: ResultsWriter):
        profile = rc.profile()
        tables = build_tables(max(rc.n, rc.m))
        console.print(Panel(f"Intersecting A_{rc.n} and A_{rc.m} ({profile.family})", style="blue"))
        exact = intersection_measure(
            arcs_for(rc.n, profile, rc.reduced, tables),
            arcs_for(rc.m, profile, rc.reduced, tables),
        )
        result: Dict[str, Any] = {
            "n": rc.n,
            "m": rc.m,
            "reduced": rc.reduced,
            "tol": rc.tol,
            "exact": exact,
            "value": exact,
            "truncation_M": None,
            "tail_bound": None,
            "series": None,
            "closed_form": None,
        }
        if rc.reduced:
            profile.require_standard(rc.n)
            profile.require_standard(rc.m)
            result["closed_form"] = series_closed_form(rc.n, rc.m, profile, tables)
            try:
                series = intersection_series(rc.n, rc.m, profile, rc.tol, tables)
                result.update({
                    "series": series.to_dict(),
                    "value": series.value,
                    "truncation_M": series.truncation_M,
                    "tail_bound": series.tail_bound,
                })
            except BudgetError as e:
                if rc.mode == "series":
                    raise
                logger.warning(f"Truncated series skipped: {e.message}")
                result["series_skipped"] = e.to_dict()
                result["value"] = result["closed_form"]
            result["full_fraction_bound"] = full_fraction_bound(rc.n, rc.m, profile)
        writer.write_csv("intersect", ResultsWriter.INTERSECT_HEADERS, [{
            "n": rc.n,
            "m": rc.m,
            "exact": exact,
            "series": result["series"]["value"] if result["series"] else None,
            "closed_form": result["closed_form"],
            "truncation_M": result["truncation_M"],
            "tail_bound": result["tail_bound"],
            "full_fraction_bound": result.get("full_fraction_bound"),
        }])
        writer.write_json("intersect", result)

        table = Table(title="Intersection measure")
        table.add_column("Route", style="cyan")
        table.add_column("Value")
        table.add_row("exact sweep", _fmt(exact))
        table.add_row("truncated series", _fmt(result["series"]["value"] if result["series"] else None))
        table.add_row("closed form", _fmt(result["closed_form"]))
        table.add_row("truncation M", _fmt(result["truncation_M"]))
        table.add_row("tail bound", _fmt(result["tail_bound"]))
        console.print(table)

    _execute("intersect", run_file, overrides, body)


@cli.command()
@click.option("--N", "N", type=int, help="Largest denominator")
@click.option("--x", type=float, help="Single point in [0, 1); otherwise sample")
@click.option("--samples", type=int, help="Number of uniform sample points")
@click.option("--seed", type=int, help="Sampling seed")
@click.option("--beta", type=float, help="Deviation threshold for the tail fraction")
@profile_options
@run_options
def count(run_file, **kwargs):
    """Solution counts S(f, theta, x, N) at a point or over samples."""
    from arith_core import build_tables
    from counting import count_solutions, markov_bound, sample_counts, summarize_counts, tail_fraction_of

    overrides = {**_common(kwargs), **kwargs}

    def body(rc: RunConfig, writer: ResultsWriter):
        profile = rc.profile()
        tables = build_tables(rc.N)
        if rc.x is not None:
            report = count_solutions(rc.x, rc.N, profile, tables)
            writer.write_csv("count", ResultsWriter.COUNT_HEADERS, [{"index": 0, **report.to_dict()}])
            writer.write_json("count", report.to_dict())
            console.print(f"S = [bold]{report.S}[/bold], E_N = {report.E_N:.6g}, ratio = {_fmt(report.ratio)}")
            return

        console.print(Panel(f"Sampling {rc.samples} points at N={rc.N:,} (seed {rc.seed})", style="blue"))
        reports = sample_counts(rc.N, rc.samples, rc.seed, profile, tables, rc.workers)
        writer.write_csv("count", ResultsWriter.COUNT_HEADERS, (
            {"index": i, **r.to_dict()} for i, r in enumerate(reports)
        ))
        summary = summarize_counts(reports)
        if rc.beta is not None:
            summary["beta"] = rc.beta
            summary["tail_fraction"] = tail_fraction_of(reports, rc.beta)
            summary["markov_bound"] = markov_bound(rc.N, rc.beta, profile, tables)
        writer.write_json("count", summary)

        table = Table(title="Solution counts")
        table.add_column("Statistic", style="cyan")
        table.add_column("Value")
        for key in ("E_N", "mean_S", "median_ratio", "mean_ratio", "tail_fraction", "markov_bound"):
            if key in summary:
                table.add_row(key, _fmt(summary[key]))
        console.print(table)

    _execute("count", run_file, overrides, body)


@cli.command()
@click.option("--nmax", "N_max", type=int, help="Largest N (power of 2)")
@click.option("--alpha", "alpha_grid", help="Comma-separated ascending alpha grid")
@click.option("--box/--no-box", default=None, help="Also run box counting")
@click.option("--box-schedule", help="Comma-separated ascending N for box counting")
@click.option("--window", type=click.Choice(["block", "cumulative"]), help="Box-counting window")
@profile_options
@run_options
def dimension(run_file, **kwargs):
    """Counting-formula and box-counting dimension estimates."""
    from arith_core import build_tables
    from dimension import box_count_table, default_alpha_grid, dyadic_schedule, counting_dimension

    kwargs["alpha_grid"] = _split_floats(kwargs.get("alpha_grid"))
    kwargs["box_schedule"] = _split_ints(kwargs.get("box_schedule"))
    overrides = {**_common(kwargs), **kwargs}

    def body(rc: RunConfig, writer: ResultsWriter):
        profile = rc.profile()
        grid = rc.alpha_grid or default_alpha_grid()
        console.print(Panel(f"Dimension of the {profile.family} limsup set, N_max={rc.N_max:,}", style="blue"))
        report = counting_dimension(profile, rc.N_max, grid)
        writer.write_csv("c_alpha", ResultsWriter.C_ALPHA_HEADERS, (
            {"alpha": alpha, "N": N, "c_alpha": c}
            for alpha in report.alpha_grid
            for N, c in zip(report.checkpoints, report.c_alpha_at_checkpoints[alpha])
        ))
        if rc.box:
            schedule = rc.box_schedule or dyadic_schedule(5, 10)
            tables = build_tables(schedule[-1])
            try:
                box = box_count_table(
                    profile, schedule, tables, reduced=rc.reduced, window=rc.window, workers=rc.workers
                )
                report.box_count_slope = box["slope"]
                report.box_count_points = box["points"]
                writer.write_csv("box_count", ResultsWriter.BOX_HEADERS, box["points"])
            except DegenerateInputError as e:
                logger.warning(f"Box counting skipped: {e.message}")
        writer.write_json("dimension", report.to_dict())

        table = Table(title="Dimension estimates")
        table.add_column("Estimate", style="cyan")
        table.add_column("Value")
        table.add_row("counting formula", _fmt(report.counting_dimension))
        table.add_row("lower order", _fmt(report.lower_order_hat))
        table.add_row("closed form", _fmt(report.closed_form_dimension))
        table.add_row("box counting", _fmt(report.box_count_slope))
        console.print(table)
        console.print(f"[dim]{report.note}[/dim]")

    _execute("dimension", run_file, overrides, body)


@cli.command()
@click.option("--kind", "-k", help="Criterion kind")
@click.option("--nmax", "N_max", type=int, help="Dyadic checkpoints 2^4 .. N_max")
@click.option("--checkpoints", help="Comma-separated ascending checkpoints")
@click.option("--a", type=float, help="log_bounded: exponent a")
@click.option("--b", type=float, help="log_bounded: exponent b")
@click.option("--h-exponent", type=float, help="hausdorff / hausdorff_phi: h(x) = x^s")
@click.option("--phi-weighted", is_flag=True, default=None, help="hausdorff: phi-weighted max term")
@click.option("--param", "criterion_params", multiple=True, help="Extra KEY=VALUE (K, c, A, eps, s)")
@profile_options
@run_options
def criteria(run_file, **kwargs):
    """Partial quotients of a divergence criterion at checkpoints."""
    from arith_core import build_tables
    from criteria import log_bounded_satisfiable, criterion_trace
    from dimension import dyadic_schedule

    kwargs["checkpoints"] = _split_ints(kwargs.get("checkpoints"))
    extra = {}
    for item in kwargs.pop("criterion_params", ()):
        key, _, value = item.partition("=")
        extra[key.strip()] = value.strip()
    kwargs["criterion_params"] = extra or None
    overrides = {**_common(kwargs), **kwargs}

    def body(rc: RunConfig, writer: ResultsWriter):
        profile = rc.profile()
        checkpoints = rc.checkpoints or dyadic_schedule(4, rc.N_max.bit_length() - 1)
        tables = build_tables(checkpoints[-1])
        h = None
        if rc.h_exponent is not None:
            s = rc.h_exponent
            h = lambda x: np.power(x, s)
        a_b = (rc.a, rc.b) if rc.kind == "log_bounded" else None
        console.print(Panel(f"Criterion {rc.kind} for {profile.family}", style="blue"))
        trace = criterion_trace(
            rc.kind, profile, checkpoints, tables,
            h=h, a_b=a_b, phi_weighted=rc.phi_weighted, **rc.criterion_params,
        )
        header = trace.header()
        if rc.h_exponent is not None:
            header["params"]["h_exponent"] = rc.h_exponent
        if a_b is not None:
            header["log_bounded_satisfiable"] = log_bounded_satisfiable(*a_b)
        writer.write_csv("criteria", ResultsWriter.CRITERIA_HEADERS, trace.rows())
        writer.write_json("criteria", {**header, "rows": trace.rows()})

        table = Table(title=f"{rc.kind} partial quotients")
        table.add_column("N", style="cyan")
        table.add_column("quotient")
        if trace.aux_quotients is not None:
            table.add_column("aux")
        if trace.bound_checks is not None:
            table.add_column("bound")
        for row in trace.rows():
            table.add_row(*(_fmt(v) for v in row.values()))
        console.print(table)
        style = {"diverging-trend": "green", "bounded-trend": "yellow"}.get(trace.verdict_hint, "white")
        console.print(f"Trend: [{style}]{trace.verdict_hint}[/{style}] [dim](advisory)[/dim]")
        if trace.aux_verdict_hint:
            console.print(f"Auxiliary trend: {trace.aux_verdict_hint}")

    _execute("criteria", run_file, overrides, body)


@cli.command()
@click.option("--limit", "-n", type=int, help="Range for the ratio suites (default 16384)")
@click.option("--N", "N", type=int, help="Also compare Borel-Cantelli ratios up to N")
@click.option("--mode", type=click.Choice(["exact", "series", "closed"]), help="Pair-scan mode")
@click.option("--tol", type=float, help="Series tolerance for mode=series")
@profile_options
@run_options
def bounds(run_file, **kwargs):
    """Arithmetic ratio families, Mertens, the totient scan and ratio bounds."""
    from arith_core import build_tables
    from criteria import (
        ramanujan_ratio, divisor_square_ratio, gcd_divisor_ratio, full_fraction_ratio_bound,
        mertens_ratio, ratio_family_bounded, totient_liminf_witness,
    )
    from dimension import dyadic_schedule
    from fourier_measure import borel_cantelli_ratio

    overrides = {**_common(kwargs), **kwargs}

    def body(rc: RunConfig, writer: ResultsWriter):
        limit = max(rc.limit or 1 << 14, 64)
        tables = build_tables(max(limit, rc.N or 1))
        console.print(Panel(f"Bound suites up to {limit:,}", style="blue"))
        top_exp = limit.bit_length() - 1
        families = {
            "ramanujan_ratio": [(m, max(ramanujan_ratio(k, m, tables) for k in range(1, 101))) for m in dyadic_schedule(4, min(top_exp, 13))],
            "divisor_square": [(n, divisor_square_ratio(n, tables)) for n in dyadic_schedule(4, top_exp)],
            "gcd_divisor": [(m, gcd_divisor_ratio(m, tables)) for m in range(2, min(limit, config.GCD_DIVISOR_BUDGET) + 1)],
            "mertens": [(m, mertens_ratio(m, tables)) for m in dyadic_schedule(2, top_exp)],
        }
        rows = [{"family": name, "x": x, "value": v} for name, values in families.items() for x, v in values]
        witness, minimum = totient_liminf_witness(10, limit, tables)
        rows.append({"family": "totient_scan", "x": witness, "value": minimum})
        summary: Dict[str, Any] = {
            name: {"bounded": ratio_family_bounded([v for _, v in values]), "max": max(v for _, v in values)}
            for name, values in families.items()
        }
        summary["totient_scan"] = {"window": [10, limit], "argmin": witness, "min": minimum}

        if rc.N is not None:
            profile = rc.profile()
            exact = borel_cantelli_ratio(rc.N, profile, rc.reduced, tables, rc.mode, rc.tol, rc.workers)
            lower = full_fraction_ratio_bound(rc.N, profile, tables)
            summary["borel_cantelli"] = {"N": rc.N, "mode": rc.mode, "ratio": exact, "full_fraction_lower_bound": lower}
            rows.append({"family": "borel_cantelli", "x": rc.N, "value": exact})
            rows.append({"family": "full_fraction_lower_bound", "x": rc.N, "value": lower})

        writer.write_csv("bounds", ResultsWriter.BOUNDS_HEADERS, rows)
        writer.write_json("bounds", summary)

        table = Table(title="Bound suites")
        table.add_column("Family", style="cyan")
        table.add_column("Max")
        table.add_column("No blow-up")
        for name in families:
            ok = summary[name]["bounded"]
            table.add_row(name, _fmt(summary[name]["max"]), "[green]yes[/green]" if ok else "[red]no[/red]")
        console.print(table)
        console.print(f"Totient scan minimum {minimum:.6f} at n={witness}")
        if "borel_cantelli" in summary:
            bc = summary["borel_cantelli"]
            console.print(f"Borel-Cantelli ratio {bc['ratio']:.6g} (full-fraction lower bound {lower:.6g})")

    _execute("bounds", run_file, overrides, body)


@cli.command()
@click.option("--scale", type=click.Choice(["quick", "full"]), help="Battery size")
@click.option("--seed", type=int, help="Seed for randomized tuples and samples")
@click.option("--check", "only", multiple=True, help="Run only the named checks")
@run_options
def verify(run_file, only, **kwargs):
    """Run the oracle cross-check battery."""
    from battery import run_battery

    overrides = {**_common(kwargs), **kwargs}

    def body(rc: RunConfig, writer: ResultsWriter):
        console.print(Panel(f"Oracle battery ({rc.scale})", style="blue"))
        results = run_battery(rc.scale, rc.seed, rc.workers, list(only) or None)
        writer.write_csv("battery", ResultsWriter.BATTERY_HEADERS, [
            {k: v for k, v in r.to_dict().items() if k != "seconds"} for r in results
        ])
        writer.write_json("battery", {"scale": rc.scale, "checks": [r.to_dict() for r in results]})

        table = Table(title="Oracle battery")
        table.add_column("Check", style="cyan")
        table.add_column("Result")
        table.add_column("Cases")
        table.add_column("Seconds")
        table.add_column("Detail")
        for r in results:
            mark = "[green]pass[/green]" if r.passed else "[red]FAIL[/red]"
            table.add_row(r.name, mark, str(r.cases), f"{r.seconds:.1f}", r.detail[:70])
        console.print(table)

        failed = [r.name for r in results if not r.passed]
        if failed:
            raise ConsistencyError(f"{len(failed)} check(s) failed: {', '.join(failed)}", {"failed": failed})
        console.print(f"[bold green]All {len(results)} checks passed[/bold green]")

    _execute("verify", run_file, overrides, body)


@cli.command()
def families():
    """List available profile families."""
    from profiles import FAMILIES

    console.print(Panel("Available Profile Families", style="blue"))
    table = Table()
    table.add_column("Family", style="cyan")
    table.add_column("Range")
    table.add_column("Monotone")
    table.add_column("Parameters")
    for name, cls in FAMILIES.items():
        params = ", ".join(cls.params_model.model_fields)
        table.add_row(name, cls.f_range.value, "yes" if cls.is_monotone else "no", params)
    console.print(table)


@cli.command()
def setup():
    """Check configuration and show the .env template."""
    console.print(Panel("Checking configuration", style="blue"))
    problems = config.validate_config()
    if problems:
        for problem in problems:
            console.print(f"  [red]{problem}[/red]")
    else:
        console.print("  [green]Configuration valid[/green]")

    table = Table(title="Budgets")
    table.add_column("Key", style="cyan")
    table.add_column("Value")
    for key, value in config.budgets().items():
        table.add_row(key, f"{value:,}")
    console.print(table)
    console.print()
    console.print("Example .env:")
    console.print(config.ENV_TEMPLATE)
    if problems:
        sys.exit(2)


@cli.command("export-config")
@click.argument("command", type=click.Choice(["sieve", "measure", "intersect", "count", "dimension", "criteria", "bounds", "verify"]))
@click.option("--config", "run_file", type=click.Path(), help="KEY=VALUE run file")
@click.option("--output", "-o", type=click.Path(), help="Output file path")
def export_config(command, run_file, output):
    """Export the validated run configuration as JSON."""
    try:
        rc = build_run_config(command, Path(run_file) if run_file else None)
    except LabError as e:
        console.print(f"[red]{e.message}[/red]")
        sys.exit(e.exit_code)
    data = rc.to_json()
    if output:
        with open(output, "w") as f:
            json.dump(data, f, indent=2)
        console.print(f"[green]Configuration exported to {output}[/green]")
    else:
        console.print(json.dumps(data, indent=2))


if __name__ == "__main__":
    cli()
