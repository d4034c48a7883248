import sys
from contextlib import contextmanager
from pathlib import Path

import click

from app.services.action_runner import EXIT_IO_ERROR, execute_action


config_option = click.option(
    "--config", "config_path", type=click.Path(dir_okay=False, path_type=Path), default=None,
    help="Run configuration (JSON). Defaults apply when omitted."
)
out_option = click.option(
    "--out", "out_path", type=click.Path(dir_okay=False, path_type=Path), default=None,
    help="CSV output file. Defaults to stdout."
)
tol_option = click.option(
    "--tol", type=click.FloatRange(min=0, min_open=True), default=None,
    help="Overrides the quadrature tolerances."
)
points_option = click.option(
    "--points", type=click.Path(dir_okay=False, path_type=Path), default=None,
    help="CSV file with the points to evaluate."
)


@contextmanager
def _open_output(out_path):
    if out_path is None:
        yield sys.stdout
        return
    with open(out_path, "w", newline="") as stream:
        yield stream


def _run(ctx: click.Context, action_id: str, config_path, out_path, tol, points=None):
    try:
        with _open_output(out_path) as stream:
            exit_code = execute_action(action_id, stream, config_path=config_path, points=points, tol=tol)
    except OSError as e:
        click.echo(f"Cannot write to {out_path}: {e}", err=True)
        exit_code = EXIT_IO_ERROR
    ctx.exit(exit_code)


@click.group(name="carleman")
def cli():
    """Carleman kernel evaluation and Cauchy-problem reconstruction in a strip."""


@cli.command("kernel-eval")
@config_option
@points_option
@out_option
@tol_option
@click.pass_context
def kernel_eval(ctx, config_path, points, out_path, tol):
    """Evaluate the kernel at the (y1, y2, x1, x2) rows of a points file."""
    _run(ctx, "kernel-eval", config_path, out_path, tol, points=points)


@cli.command("verify")
@config_option
@out_option
@tol_option
@click.pass_context
def verify(ctx, config_path, out_path, tol):
    """Run the numerical verification suites."""
    _run(ctx, "verify", config_path, out_path, tol)


@cli.command("reconstruct")
@config_option
@points_option
@out_option
@tol_option
@click.pass_context
def reconstruct(ctx, config_path, points, out_path, tol):
    """Reconstruct the harmonic function at the (x1, x2) rows of a points file."""
    _run(ctx, "reconstruct", config_path, out_path, tol, points=points)


@cli.command("decay-report")
@config_option
@out_option
@tol_option
@click.pass_context
def decay_report(ctx, config_path, out_path, tol):
    """Report how fast the reconstruction decays along growing radii."""
    _run(ctx, "decay-report", config_path, out_path, tol)


# Main
if __name__ == "__main__":
    cli()
