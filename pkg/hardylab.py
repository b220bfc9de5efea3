#!/usr/bin/env python3
"""
hardylab CLI - sharp constants and numerical checks of weighted Hardy inequalities
"""

import json
import logging
import sys
from pathlib import Path
from typing import List, Optional, Tuple

import click
from rich.console import Console
from rich.panel import Panel
from rich.progress import Progress, SpinnerColumn, TextColumn
from rich.table import Table

from config.run_config import RunConfig, parse_config, serialize_config
from config.settings import DEBUG, MC_SAMPLES, OUTPUT_DIR, THEOREMS, configure_logging, \
    validate_settings
from core.errors import ConfigError, HardyLabError
from core.fractional import angular_norm, frac_seminorm_radial, lambda_constant
from core.profiles import Tent
from core.quotients import ONE, empirical_thm12_constant, sharpness_sweep, verify_case
from core.rearrangement import HomogeneousWeight, equimeasurability_check, \
    rearranged_coefficient, superlevel_measure
from core.regimes import (
    CaseId, FracRegime, Regime, admissible_q, ckn_sharp_constant, classify_case13,
    frac_constant, frac_q, thm11_constant, thm11_q, thm13_constant, thm31_constant, thm31_q,
)
from core.sphere import WEIGHT_CATALOG, lq_norm
from utils.oracles import MCEstimate, lq_norm_mc, seminorm_mc, superlevel_volume_mc
from utils.reporting import (
    ReportRow, emit_report, lambda_rows, rearrange_rows, row_from_report, sweep_rows,
)

console = Console()
logger = logging.getLogger('hardylab')

EXIT_OK, EXIT_ERROR, EXIT_VIOLATION = 0, 1, 2

# Theorems whose checks only take radial test functions
RADIAL_ONLY = ('thm14', 'hardy1d')
# Theorems without an angular weight
UNWEIGHTED = ('ckn', 'hardy1d')


# Commands

def _constant_rows(config: RunConfig, theorem: str) -> List[ReportRow]:
    N, p, alpha, quad = config.N, config.p, config.alpha, config.quadrature
    if theorem == 'ckn':
        return [ReportRow('ckn', '', 'const(1)', N, p, alpha,
                          value=ckn_sharp_constant(Regime(N, p, alpha)))]
    if theorem == 'hardy1d':
        beta = Regime(N, p, alpha).beta
        return [ReportRow('hardy1d', f"beta={beta:g}", 'const(1)', N, p, alpha,
                          value=(p / (beta - p + 1.0)) ** p)]

    rows = []
    if theorem == 'thm12':
        q = admissible_q(N, p, config.q)
        empirical = config.empirical if config.empirical is not None else \
            empirical_thm12_constant(N, p, alpha, q, config.test_objects(), quad=quad)
    if theorem == 'thm14':
        frac = FracRegime(N, config.s, p)
        lam = lambda_constant(frac, config.scheme)

    for g in config.weight_objects():
        name = g.describe()
        if theorem == 'thm11':
            q = thm11_q(N)
            rows.append(ReportRow('thm11', '', name, N, p, alpha, q=q,
                                  value=thm11_constant(N, lq_norm(g, q, N, quad))))
        elif theorem == 'thm12':
            rows.append(ReportRow('thm12', 'empirical', name, N, p, alpha, q=q,
                                  value=empirical * lq_norm(g, q, N, quad)))
        elif theorem == 'thm13':
            primary = classify_case13(N, alpha, CaseId(config.case) if config.case else None)
            for case in primary.applicable():
                norm = lq_norm(g, case.q, N, quad)
                rows.append(ReportRow('thm13', case.case_id.value, name, N, p, alpha, q=case.q,
                                      value=thm13_constant(N, alpha, norm, case.q)))
                if case.gamma0 is not None:
                    rows.append(ReportRow('thm13', f"{case.case_id.value}:gamma0", name, N, p,
                                          alpha, q=case.q, value=case.gamma0))
        elif theorem == 'thm31':
            regime = Regime(N, p, alpha)
            q = thm31_q(regime)
            rows.append(ReportRow('thm31', '', name, N, p, alpha, q=q,
                                  value=thm31_constant(regime, lq_norm(g, q, N, quad))))
        elif theorem == 'thm14':
            q = frac_q(frac)
            rows.append(ReportRow('thm14', '', name, N, p, None, config.s, q,
                                  value=frac_constant(frac, angular_norm(g, q, N, quad),
                                                      lam.value),
                                  scheme=lam.scheme_id, est_error=lam.est_error))
    return rows


def _verify_reports(config: RunConfig, theorem: str, fail_scale: float):
    tests = config.test_objects()
    if theorem in RADIAL_ONLY:
        tests = [u for u in tests if u.angular.is_constant]
    weights = [ONE] if theorem in UNWEIGHTED else config.weight_objects()
    empirical = config.empirical
    if theorem == 'thm12' and empirical is None:
        empirical = empirical_thm12_constant(config.N, config.p, config.alpha, config.q,
                                             tests, weights, config.quadrature)
    for g in weights:
        for u in tests:
            yield verify_case(theorem, u, g, config.N, config.p, config.alpha, config.s,
                              config.q, config.case, config.quadrature, empirical,
                              config.scheme, fail_scale)


def _oracle_row(case: str, weight: str, N: int, value: float, estimate: MCEstimate,
                p: Optional[float] = None, s: Optional[float] = None,
                q: Optional[float] = None) -> ReportRow:
    return ReportRow('selftest', case, weight, N, p, None, s, q, value, estimate.value,
                     estimate.value - value, estimate.agrees(value), 'monte-carlo',
                     estimate.stderr)


def _selftest_rows(samples: int) -> List[ReportRow]:
    hemisphere = WEIGHT_CATALOG['hemisphere']
    rows = []
    for N, q in ((3, 1.5), (5, 2.5)):
        rows.append(_oracle_row('lq-norm', hemisphere.describe(), N, lq_norm(hemisphere, q, N),
                                lq_norm_mc(hemisphere, q, N, samples), q=q))
    for N in (3, 5):
        w = HomogeneousWeight(hemisphere, 2.0)
        rows.append(_oracle_row('superlevel-volume', w.describe(), N,
                                superlevel_measure(w, 1.0, N),
                                superlevel_volume_mc(w, 1.0, N, samples)))
    tent = Tent(1.0)
    for N in (1, 2):
        frac = FracRegime(N, 0.25, 2.0)
        rows.append(_oracle_row('seminorm', tent.describe(), N, frac_seminorm_radial(tent, frac),
                                seminorm_mc(tent, frac, samples), p=frac.p, s=frac.s))
    return rows


def run(config: RunConfig, fail_scale: float = 1.0,
        samples: int = MC_SAMPLES) -> Tuple[int, List[ReportRow]]:
    """Execute ``config``; returns the exit status and the report rows."""
    command = config.command
    rows: List[ReportRow] = []
    status = EXIT_OK

    if command == 'constant':
        for theorem in config.theorems:
            rows.extend(_constant_rows(config, theorem))
        return status, rows

    if command == 'verify':
        for theorem in config.theorems:
            for report in _verify_reports(config, theorem, fail_scale):
                rows.append(row_from_report(report))
                if not report.holds:
                    status = EXIT_VIOLATION
        return status, rows

    if command == 'sweep':
        for theorem in config.theorems:
            for g in ([ONE] if theorem in UNWEIGHTED else config.weight_objects()):
                result = sharpness_sweep(theorem, g, config.N, config.p, config.alpha, config.s,
                                         config.steps, config.case, config.quadrature,
                                         config.scheme, fail_scale)
                rows.extend(sweep_rows(theorem, result))
                if not all(r.holds for r in result.reports):
                    status = EXIT_VIOLATION
                elif not result.reached:
                    logger.warning("sweep %s reached %.4f of the bound (target %.2f)",
                                   theorem, result.final_ratio, result.target)
        return status, rows

    if command == 'lambda':
        result = lambda_constant(FracRegime(config.N, config.s, config.p), config.scheme)
        return status, lambda_rows(result)

    if command == 'rearrange':
        degree = config.rearrange_degree
        for g in config.weight_objects():
            w = HomogeneousWeight(g, degree)
            A = rearranged_coefficient(w, config.N, config.quadrature)
            checks = equimeasurability_check(w, config.N, config.levels, config.quadrature)
            rows.extend(rearrange_rows(g.describe(), config.N, degree, A, checks))
        if not all(r.holds for r in rows if r.holds is not None):
            status = EXIT_VIOLATION
        return status, rows

    if command == 'selftest':
        rows = _selftest_rows(samples)
        if not all(r.holds for r in rows):
            status = EXIT_VIOLATION
        return status, rows

    raise ConfigError(f"unknown command: {command}", 'run')


# Display

def _fmt(value) -> str:
    if value is None:
        return '-'
    if isinstance(value, bool):
        return '[green]yes[/green]' if value else '[red]NO[/red]'
    if isinstance(value, float):
        return f"{value:.10g}"
    return str(value)


def display_rows(rows: List[ReportRow], title: str, limit: int = 40):
    """Display report rows in a formatted table."""
    table = Table(title=title, show_header=True, header_style="bold cyan")
    table.add_column("Theorem", style="cyan")
    table.add_column("Case")
    table.add_column("Weight", style="yellow")
    table.add_column("Value", style="green")
    table.add_column("Bound")
    table.add_column("Margin")
    table.add_column("Holds")

    for row in rows[:limit]:
        table.add_row(row.theorem, row.case, row.weight, _fmt(row.value), _fmt(row.bound),
                      _fmt(row.margin), _fmt(row.holds))

    console.print(table)
    if len(rows) > limit:
        console.print(f"[dim]... and {len(rows) - limit} more rows[/dim]")


def _load_config(command: str, config_path: Optional[str]) -> RunConfig:
    if config_path is None:
        if command == 'selftest':
            return RunConfig('selftest')
        raise ConfigError(f"{command} needs --config <path>", 'hardylab')
    path = Path(config_path)
    if not path.exists():
        raise ConfigError(f"File not found: {path}", 'hardylab')
    config = parse_config(path.read_text())
    if config.command != command:
        raise ConfigError(f"configuration is for '{config.command}', not '{command}'",
                          'hardylab')
    return config


def _execute(command: str, config_path: Optional[str], out: Optional[str],
             fmt: Optional[str], fail_scale: float = 1.0, samples: int = MC_SAMPLES):
    try:
        config = _load_config(command, config_path)
        fmt = fmt or config.format
        destination = Path(out or config.output or OUTPUT_DIR / f"{command}.{fmt}")

        console.print(Panel.fit(
            f"[bold cyan]hardylab {command}[/bold cyan]\n"
            f"Theorems: {', '.join(config.theorems) or '-'}\n"
            f"Output: {destination} ({fmt})",
            title="Configuration"
        ))

        with Progress(SpinnerColumn(), TextColumn("[progress.description]{task.description}"),
                      console=console, transient=True) as progress:
            task = progress.add_task(f"Running {command}...", total=None)
            status, rows = run(config, fail_scale, samples)
            progress.update(task, completed=True)

        display_rows(rows, f"{command} report")
        emit_report(rows, fmt, destination,
                    metadata={'command': command, 'config': json.loads(serialize_config(config)),
                              'fail_scale': fail_scale})
        console.print(f"\n[green]✓[/green] Saved report to: [cyan]{destination}[/cyan]")
    except (HardyLabError, ValueError, OSError) as e:
        console.print(f"[bold red]Error:[/bold red] {e}")
        sys.exit(EXIT_ERROR)

    if status == EXIT_VIOLATION:
        console.print("[bold red]An inequality check failed beyond tolerance.[/bold red]")
    sys.exit(status)


# CLI

@click.group()
@click.option('--debug', is_flag=True, default=DEBUG, help='Verbose logging')
def cli(debug):
    """hardylab: sharp constants for weighted Hardy inequalities"""
    configure_logging(debug)
    try:
        validate_settings()
    except ValueError as e:
        console.print(f"[bold red]Configuration Error:[/bold red] {e}")
        console.print("\n[yellow]Check the HARDYLAB_* variables in your .env file.[/yellow]")
        sys.exit(EXIT_ERROR)


def report_options(func):
    func = click.option('--format', 'fmt', default=None,
                        help='Report format: csv or json (default from config)')(func)
    func = click.option('--out', '-o', default=None, help='Report path')(func)
    func = click.option('--config', '-c', 'config_path', default=None,
                        help='JSON run configuration')(func)
    return func


@cli.command()
@report_options
def constant(config_path, out, fmt):
    """Compute the sharp constants of the requested theorems."""
    _execute('constant', config_path, out, fmt)


@cli.command()
@report_options
@click.option('--fail-scale', type=float, default=1.0, hidden=True)
def verify(config_path, out, fmt, fail_scale):
    """Check inequalities on weights x test functions."""
    _execute('verify', config_path, out, fmt, fail_scale)


@cli.command()
@report_options
@click.option('--fail-scale', type=float, default=1.0, hidden=True)
def sweep(config_path, out, fmt, fail_scale):
    """Run a sharpness sweep toward the formal optimizer."""
    _execute('sweep', config_path, out, fmt, fail_scale)


@cli.command(name='lambda')
@report_options
def lambda_(config_path, out, fmt):
    """Compute the fractional constant with both quadrature schemes."""
    _execute('lambda', config_path, out, fmt)


@cli.command()
@report_options
def rearrange(config_path, out, fmt):
    """Rearrangement coefficient and equimeasurability checks."""
    _execute('rearrange', config_path, out, fmt)


@cli.command()
@report_options
@click.option('--samples', '-n', type=int, default=MC_SAMPLES, help='Monte-Carlo samples')
def selftest(config_path, out, fmt, samples):
    """Cross-check quadratures against seeded Monte-Carlo oracles."""
    _execute('selftest', config_path, out, fmt, samples=samples)


@cli.command(name='theorems')
def list_theorems():
    """List the theorem selectors."""
    table = Table(title="Theorem selectors", show_header=True, header_style="bold cyan")
    table.add_column("Selector", style="cyan")
    table.add_column("Inequality", style="green")
    for key, label in THEOREMS.items():
        table.add_row(key, label)
    console.print(table)


def main():
    try:
        cli.main(standalone_mode=False)
    except click.exceptions.Abort:
        sys.exit(EXIT_ERROR)
    except click.ClickException as e:
        e.show()
        sys.exit(EXIT_ERROR)


if __name__ == '__main__':
    main()
