"""absorbing-walk CLI - Command-line interface.

This module provides the Click-based CLI: data tables for survival and
first-passage curves, absorption probabilities, Wigner snapshots, and the
acceptance suite.

Exit codes: 0 success, 1 invalid arguments, 2 verification failure,
3 numerical convergence or truncation failure.

See docs/api-reference.md for detailed command documentation.
"""

import json
import logging
from functools import wraps
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

import click
from click.core import ParameterSource
from rich.console import Console
from rich.logging import RichHandler

from . import __version__
from .config import FORMATS, RunConfig, load_config
from .exceptions import (
    AbsorbingWalkError,
    InvalidArgumentError,
    RegimeError,
)
from .observables import absorption_probability, survival_curve
from .propagator import TimePoint, cone_cutoff
from .verify import AcceptanceSuite, render_table
from .wigner import (
    STRONG_CHANNELS,
    WEAK_CHANNELS,
    wigner_pole_closed_form,
    wigner_strong_decomposition,
    wigner_weak_decomposition,
)
from .writer import TableWriter, channel_column, wigner_rows

logger = logging.getLogger(__name__)

EXIT_INVALID = 1
EXIT_VERIFY_FAILED = 2
EXIT_NUMERICAL = 3

# Flags that map one-to-one onto RunConfig fields.
CONFIG_FIELDS = (
    "omega", "kappa", "s0", "t_max", "dt", "sites", "format", "output",
    "eta_list", "snapshots", "m_max", "k_nodes",
)


class WalkGroup(click.Group):
    """Click group whose usage errors exit with the invalid-argument code."""

    def make_context(self, *args, **kwargs):
        try:
            return super().make_context(*args, **kwargs)
        except click.UsageError as exc:
            exc.exit_code = EXIT_INVALID
            raise

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except click.UsageError as exc:
            exc.exit_code = EXIT_INVALID
            raise


def _configure_logging(verbose: bool) -> None:
    package_logger = logging.getLogger("absorbing_walk")
    for handler in list(package_logger.handlers):
        if isinstance(handler, RichHandler):
            package_logger.removeHandler(handler)
    handler = RichHandler(console=Console(stderr=True), show_path=False)
    package_logger.addHandler(handler)
    package_logger.setLevel(logging.DEBUG if verbose else logging.WARNING)


def _float_list(ctx, param, value: Optional[str]) -> Optional[Tuple[float, ...]]:
    if value is None:
        return None
    try:
        return tuple(float(part) for part in value.split(",") if part.strip())
    except ValueError:
        raise click.BadParameter(f"expected comma-separated numbers, got {value!r}")


def _resolve_config(ctx: click.Context, config_path: Optional[str], values: Dict[str, Any]) -> RunConfig:
    """Defaults, then the config file, then flags given on the command line."""
    base = load_config(Path(config_path)) if config_path else RunConfig()
    overrides = {
        name: value
        for name, value in values.items()
        if name in CONFIG_FIELDS and ctx.get_parameter_source(name) is ParameterSource.COMMANDLINE
    }
    return base.merged(**overrides)


def handle_errors(func):
    """Map library exceptions onto exit codes."""

    @wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except (InvalidArgumentError, RegimeError) as exc:
            click.echo(f"Error: {exc}", err=True)
            raise SystemExit(EXIT_INVALID)
        except AbsorbingWalkError as exc:
            click.echo(f"Numerical failure: {type(exc).__name__}: {exc}", err=True)
            raise SystemExit(EXIT_NUMERICAL)

    return wrapper


def physics_options(func):
    """Options shared by the data commands."""
    options = [
        click.option("--config", "config_path", type=click.Path(dir_okay=False),
                     help="JSON config file (flags override it)"),
        click.option("--omega", type=float, help="Hopping rate (default 1.0)"),
        click.option("--kappa", type=float, help="Absorption rate (default 1.0)"),
        click.option("--s0", type=int, help="Initial site (default 8)"),
        click.option("--format", type=click.Choice(FORMATS), help="Output format (default csv)"),
        click.option("--output", type=click.Path(), help="Output file (stdout when omitted)"),
    ]
    for option in reversed(options):
        func = option(func)
    return func


@click.group(cls=WalkGroup)
@click.version_option(version=__version__)
@click.option("--verbose", is_flag=True, help="Log numerical decisions to stderr")
def main(verbose: bool):
    """absorbing-walk - Exact quantum walk on the half-line with a boundary sink.

    Emits survival and first-passage curves, absorption probabilities and
    Wigner snapshots as CSV or JSON, and checks the exact solution against
    brute-force oracles.

    Examples:

        # Survival and first-passage density up to t = 30
        absorbing-walk survival --kappa 0.25 --s0 8 --t-max 30 --dt 0.1

        # Absorption probabilities with their eta -> 1/eta partners
        absorbing-walk pabs --s0 8 --eta-list 0.25,0.5,1

        # Run the acceptance suite
        absorbing-walk verify --level quick
    """
    _configure_logging(verbose)


@main.command("survival")
@physics_options
@click.option("--t-max", type=float, help="Last time of the grid (default 30)")
@click.option("--dt", type=float, help="Time step (default 0.1)")
@click.option("--sites", type=int, help="Sum sites 1..SITES instead of the ballistic cone")
@click.pass_context
@handle_errors
def survival_command(ctx: click.Context, config_path: Optional[str], **values):
    """Tabulate t, S(t|s0) and F(t|s0) on the grid 0, dt, ..., t_max.

    Examples:

        absorbing-walk survival --omega 1 --kappa 4 --s0 8 --t-max 30 --output s.csv
    """
    config = _resolve_config(ctx, config_path, values)
    writer = TableWriter(config)
    rows = survival_curve(config.s0, config.times(), config.params, config.sites)
    logger.debug("survival: %d rows, eta=%.6g", len(rows), config.params.eta)
    _emit(writer, ["t", "S", "F"], rows, config.output)


@main.command("pabs")
@physics_options
@click.option("--eta-list", callback=_float_list, help="Comma-separated eta values")
@click.pass_context
@handle_errors
def pabs_command(ctx: click.Context, config_path: Optional[str], **values):
    """Tabulate s0, eta, P_abs(eta) and P_abs(1/eta).

    Examples:

        absorbing-walk pabs --s0 200 --eta-list 1 --format json
    """
    config = _resolve_config(ctx, config_path, values)
    writer = TableWriter(config)
    rows = []
    for eta in config.eta_list:
        pabs = absorption_probability(config.s0, eta)
        # eta = 0 pairs with eta = inf, where A(k) vanishes as well
        dual = absorption_probability(config.s0, 1.0 / eta) if eta > 0.0 else 0.0
        rows.append([config.s0, eta, pabs, dual])
    _emit(writer, ["s0", "eta", "pabs", "pabs_dual"], rows, config.output)


@main.command("wigner")
@physics_options
@click.option("--snapshots", callback=_float_list, help="Comma-separated snapshot times")
@click.option("--m-max", type=int, help="Largest doubled coordinate m (default 60)")
@click.option("--k-nodes", type=int, help="Momentum grid size (default 128)")
@click.pass_context
@handle_errors
def wigner_command(ctx: click.Context, config_path: Optional[str], **values):
    """Write one Wigner grid per snapshot into the --output directory.

    Files are numbered in snapshot order: wigner_00.csv, wigner_01.csv, ...
    For eta > 1 a pole_NN file holds the closed-form pole droplet on the same
    grid.

    Examples:

        absorbing-walk wigner --kappa 1.5 --s0 3 --snapshots 0,2,4,6 --output fig2/
    """
    config = _resolve_config(ctx, config_path, values)
    if config.output is None:
        raise InvalidArgumentError("wigner needs --output DIRECTORY")
    directory = Path(config.output)
    writer = TableWriter(config)
    params = config.params
    names = list(STRONG_CHANNELS if params.is_strong else WEAK_CHANNELS)
    columns = ["m", "x_c", "k", "W_total"] + [channel_column(name) for name in names]

    for index, t in enumerate(config.snapshots):
        tp = TimePoint.at(t, params.omega)
        needed = 2 * cone_cutoff(config.s0, tp.x)
        if config.m_max < needed:
            logger.warning("m_max=%d < %d: the grid misses part of the walker at t=%g", config.m_max, needed, t)
        if params.is_strong:
            field = wigner_strong_decomposition(config.s0, config.m_max, config.k_nodes, tp, params)
        else:
            field = wigner_weak_decomposition(config.s0, config.m_max, config.k_nodes, tp, params)
        writer.write(columns, wigner_rows(field, names), directory / f"wigner_{index:02d}{writer.suffix}")

        if params.is_strong:
            pole_rows = [
                [int(m), m / 2.0, float(k), wigner_pole_closed_form(int(m), float(k), tp, config.s0, params)]
                for m in field.m_values
                for k in field.k_values
            ]
            writer.write(["m", "x_c", "k", "W_pp"], pole_rows, directory / f"pole_{index:02d}{writer.suffix}")
    click.echo(f"Wrote {len(config.snapshots)} snapshot(s) to {directory}", err=True)


@main.command("verify")
@click.option("--level", type=click.Choice(["quick", "full"]), default="quick", help="Acceptance grid size")
@click.option("--report-format", type=click.Choice(["table", "json"]), default="table", help="Report format")
@handle_errors
def verify_command(level: str, report_format: str):
    """Run the acceptance suite and report every criterion.

    Exit status 2 when any check fails.

    Examples:

        absorbing-walk verify --level full --report-format json
    """
    report = AcceptanceSuite(level).run()
    if report_format == "json":
        click.echo(json.dumps(report.to_dict(), indent=2, allow_nan=False))
    else:
        render_table(report, Console())
    if not report.passed:
        raise SystemExit(EXIT_VERIFY_FAILED)


def _emit(writer: TableWriter, columns, rows, output: Optional[str]) -> None:
    if output is None:
        click.echo(writer.render(columns, rows), nl=False)
    else:
        writer.write(columns, rows, Path(output))


if __name__ == "__main__":
    main()
