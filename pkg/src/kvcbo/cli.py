"""Command-line benchmark harness.

Exit codes: 0 success, 1 solver abort or I/O failure, 2 config error.
Worker count is taken from the KVCBO_WORKERS environment variable
(default: available cores).
"""

from __future__ import annotations

import json
import sys

import click

from .bench import ReportIOError, build_factory, emit_report, run_monte_carlo, worker_count
from .config import ConfigError, load_config
from .integrators import DegenerateStepError
from .solver import run_once
from .suites import SUITES


@click.group()
def main():
    """Consensus-based optimization on the sphere: benchmark runner."""


@main.command("run")
@click.option("--config", "config_path", required=True, type=click.Path(),
              help="Flat JSON config file.")
@click.option("--seed", type=int, default=None, help="Override the config seed.")
@click.option("--runs", type=int, default=1, show_default=True,
              help="Number of Monte Carlo replications.")
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="Report destination (default: stdout).")
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json",
              show_default=True)
def run_cmd(config_path, seed, runs, out_path, fmt):
    """Execute one configured problem, single run or Monte Carlo aggregate."""
    try:
        bench_cfg = load_config(config_path)
        factory = build_factory(bench_cfg)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(2)
    cfg = bench_cfg.solver
    base_seed = cfg.seed if seed is None else seed
    try:
        if runs == 1:
            report = run_once(factory(base_seed), cfg, seed=base_seed)
        else:
            report = run_monte_carlo(factory, cfg, runs, base_seed,
                                     workers=worker_count())
    except DegenerateStepError as exc:
        click.echo(f"solver abort: {exc}", err=True)
        sys.exit(1)
    _emit(report, fmt, out_path)


@main.command("bench")
@click.argument("suite_name", type=click.Choice(sorted(SUITES)))
@click.option("--runs", type=int, default=None, help="Override the suite's run count.")
@click.option("--seed", type=int, default=None, help="Override the suite's base seed.")
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="JSON report destination (default: stdout).")
def bench_cmd(suite_name, runs, seed, out_path):
    """Execute a named built-in benchmark suite."""
    kwargs = {"workers": worker_count()}
    if runs is not None:
        kwargs["n_runs"] = runs
    if seed is not None:
        kwargs["base_seed"] = seed
    try:
        results = SUITES[suite_name](**kwargs)
    except DegenerateStepError as exc:
        click.echo(f"solver abort: {exc}", err=True)
        sys.exit(1)
    doc = {label: agg.to_dict() for label, agg in results.items()}
    for label, agg in results.items():
        click.echo(f"{suite_name}[{label}]: success_rate={agg.success_rate:.3f} "
                   f"mean_n_avg={agg.mean_n_avg:.1f}", err=True)
    _write_text(json.dumps(doc, indent=2) + "\n", out_path)


def _emit(report, fmt, out_path):
    if out_path is None:
        if fmt == "json":
            click.echo(json.dumps(report.to_dict(), indent=2))
            return
        click.echo("csv output requires --out", err=True)
        sys.exit(2)
    try:
        emit_report(report, fmt, out_path)
    except ReportIOError as exc:
        click.echo(f"i/o error: {exc}", err=True)
        sys.exit(1)


def _write_text(text, out_path):
    if out_path is None:
        click.echo(text, nl=False)
        return
    try:
        with open(out_path, "w") as fh:
            fh.write(text)
    except OSError as exc:
        click.echo(f"i/o error: {exc}", err=True)
        sys.exit(1)


if __name__ == "__main__":
    main()
