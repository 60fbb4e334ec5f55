"""Command-line driver: theta sweeps, reference-table comparison, strategy
scans, circuit synthesis, waveplate fitting and the play server.

Exit codes: 0 success, 2 validation error, 3 tolerance failure.
"""

from __future__ import annotations

import math
import sys
from pathlib import Path

import click
import numpy as np

from . import report

EXIT_TOLERANCE = 3


def _theta_options(f):
    for opt in reversed([
        click.option("--theta-min", type=float, default=0.0, show_default=True),
        click.option("--theta-max", type=float, default=2.0 * math.pi,
                     show_default="2*pi"),
        click.option("--points", type=int, default=34, show_default=True),
    ]):
        f = opt(f)
    return f


def _output_options(f):
    for opt in reversed([
        click.option("--out", type=click.Path(dir_okay=False, path_type=Path),
                     default=None, help="Write the dataset to this file."),
        click.option("--format", "fmt", type=click.Choice(["csv", "json"]),
                     default="csv", show_default=True),
        click.option("--no-header-timestamp", is_flag=True,
                     help="Omit the generation-time comment from CSV output."),
        click.option("--plot/--no-plot", default=True, show_default=True,
                     help="Render a figure next to --out (ignored without --out)."),
    ]):
        f = opt(f)
    return f


def _grid(theta_min: float, theta_max: float, points: int) -> np.ndarray:
    if points < 2:
        raise click.UsageError(f"--points must be >= 2, got {points}")
    if theta_max < theta_min:
        raise click.UsageError("--theta-max must be >= --theta-min")
    return np.linspace(theta_min, theta_max, points)


def _emit(rows, out, fmt, no_header_timestamp, render=None, plot=True):
    text = report.write_rows(rows, out, fmt, timestamp=not no_header_timestamp)
    if out is None:
        click.echo(text, nl=False)
    else:
        click.echo(f"wrote {len(rows)} rows to {out}")
        if plot and render is not None:
            path = render(rows, out)
            click.echo(f"wrote figure to {path}")


@click.group()
def main():
    """Deformed quantum Morra toolkit."""


@main.command()
@_theta_options
@click.option("--rounds", type=int, default=150_000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@_output_options
def sweep(theta_min, theta_max, points, rounds, seed, out, fmt,
          no_header_timestamp, plot):
    """Analytic and sampled averaged odds P_a(n) across theta."""
    try:
        spec = report.SweepSpec(theta_min=theta_min, theta_max=theta_max,
                                points=points, rounds=rounds, seed=seed)
    except ValueError as exc:
        raise click.UsageError(str(exc))
    rows = report.sweep_dataset(spec)
    _emit(rows, out, fmt, no_header_timestamp, report.render_sweep_figure, plot)


@main.command()
@_output_options
def table1(out, fmt, no_header_timestamp, plot):
    """Analytic P_i(G) at the reference angles vs published measurements."""
    rows = report.table1_dataset()
    _emit(rows, out, fmt, no_header_timestamp)


@main.command()
@_theta_options
@click.option("--scenario", type=click.Choice(report.SCENARIOS),
              default="equilibrium", show_default=True)
@click.option("--grid-step", type=float, default=0.01, show_default=True)
@_output_options
def strategies(theta_min, theta_max, points, scenario, grid_step, out, fmt,
               no_header_timestamp, plot):
    """Per-theta winning odds for a play scenario."""
    thetas = _grid(theta_min, theta_max, points)
    try:
        rows = report.strategies_dataset(thetas, scenario, grid_step)
    except ValueError as exc:
        raise click.UsageError(str(exc))
    _emit(rows, out, fmt, no_header_timestamp,
          report.render_strategies_figure, plot)


@main.command()
@_theta_options
@click.option("--restarts", type=int, default=50, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--tolerance", type=float, default=1e-8, show_default=True)
@_output_options
def synth(theta_min, theta_max, points, restarts, seed, tolerance, out, fmt,
          no_header_timestamp, plot):
    """Two-qubit circuit synthesis of the coin operator per theta."""
    thetas = _grid(theta_min, theta_max, points)
    rows = report.synth_dataset(thetas, restarts=restarts, seed=seed)
    _emit(rows, out, fmt, no_header_timestamp,
          lambda r, o: report.render_scalar_figure(
              r, "residual", "synthesis residual", o, logy=True),
          plot)
    worst = max(r["residual"] for r in rows)
    if any(not r["verified"] for r in rows) or worst > tolerance:
        click.echo(f"tolerance failure: worst residual {worst:.3e}", err=True)
        sys.exit(EXIT_TOLERANCE)


@main.command()
@_theta_options
@click.option("--restarts", type=int, default=32, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--tolerance", type=float, default=1e-6, show_default=True)
@_output_options
def fit(theta_min, theta_max, points, restarts, seed, tolerance, out, fmt,
        no_header_timestamp, plot):
    """Waveplate-angle fits of the photonic preparation per theta."""
    thetas = _grid(theta_min, theta_max, points)
    rows = report.fit_dataset(thetas, restarts=restarts, seed=seed)
    _emit(rows, out, fmt, no_header_timestamp,
          lambda r, o: report.render_scalar_figure(
              r, "cost", "fit cost", o, logy=True),
          plot)
    worst = max(r["cost"] for r in rows)
    if worst >= tolerance:
        click.echo(f"tolerance failure: worst cost {worst:.3e}", err=True)
        sys.exit(EXIT_TOLERANCE)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--cors", is_flag=True, help="Allow cross-origin requests.")
@click.option("--log-dir", type=click.Path(file_okay=False), default=None,
              help="Append JSON-lines round logs here, one file per session.")
def serve(host, port, cors, log_dir):
    """Run the HTTP play service."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(cors=cors, log_dir=log_dir), host=host, port=port)


if __name__ == "__main__":
    main()
