"""
Command-line interface for chern-fqh.

Usage:
    chern-fqh chern   --config job.json        Chern character, rank and conductance
    chern-fqh shift   --config job.json        Solve the shift formula for n0
    chern-fqh analyze --config job.json        Particle maximization and asymptotics
    chern-fqh wick    --config job.json        Closed vs brute-force Wick integral
    chern-fqh verify  [--k-max 2 --g-max 2]    Oracle-equivalence sweep
    chern-fqh sweep   --config job.json        Exact vs asymptotic conductance along d

Exit codes: 0 success, 1 internal error, 2 invalid input, 3 verification failure.
"""

from __future__ import annotations

import logging
from collections.abc import Callable
from pathlib import Path
from typing import Any

import click
from rich.console import Console
from rich.logging import RichHandler
from rich.panel import Panel
from rich.table import Table

from .algebra.exactlinalg import det, entry_sum, inverse, is_psd
from .algebra.grassmann import GeneratorLayout, wick_bruteforce, wick_closed
from .algebra.series import BinomialConvention
from .analysis import (
    asymptotic_filling,
    conductance_sweep,
    delta_n,
    integer_maximizer,
    particle_max_analysis,
    rank_vanishing,
    solve_shift,
    validity,
)
from .config import config
from .errors import ChernFqhError, InvalidInputError
from .jobs import FORMATS, JobSpec, dump_record, error_record, make_record
from .models import ChernCharacter, format_rational
from .pipeline import (
    ch_bruteforce,
    ch_theorem1,
    ch_theorem3,
    ch_wick_assembly,
    euler_characteristic,
    verify_equivalence,
)
from .verification import acceptance_configurations, run_sweep, spot_check_configurations

logger = logging.getLogger(__name__)

console = Console()
err_console = Console(stderr=True)

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_INVALID = 2
EXIT_VERIFICATION = 3

NEGATIVE_QUASIHOLE_NOTE = "negative quasi-hole count: the class vanishes"
UNCERTIFIED_NOTE = "hypotheses fail: value is the Euler characteristic, not certified as ch(V)"

METHODS = {
    "theorem3": lambda cfg, convention: ch_theorem3(cfg, convention=convention),
    "theorem1": lambda cfg, convention: ch_theorem1(cfg),
    "bruteforce": lambda cfg, convention: ch_bruteforce(cfg),
    "wick": lambda cfg, convention: ch_wick_assembly(cfg, convention=convention),
}


def configure_logging(level: str | None = None) -> None:
    logging.basicConfig(
        level=(level or config.LOG_LEVEL).upper(),
        format="%(message)s",
        handlers=[RichHandler(console=err_console, show_path=False)],
        force=True,
    )


# ========================================
# Output
# ========================================


def _render_value(value: Any) -> str:
    if isinstance(value, bool):
        return "[green]yes[/green]" if value else "[red]no[/red]"
    if isinstance(value, list):
        return "(" + ", ".join(_render_value(v) for v in value) + ")"
    if isinstance(value, dict):
        return ", ".join(f"{k}={_render_value(v)}" for k, v in value.items())
    if value is None:
        return "-"
    return str(value)


def _render_human(record: dict[str, Any]) -> None:
    command = record["command"]
    if record["errors"]:
        for error in record["errors"]:
            console.print(f"[red]✗ {error['code']}: {error['message']}[/red]")
        return

    table = Table(title=f"chern-fqh {command}", show_header=False)
    table.add_column("key", style="cyan", no_wrap=True)
    table.add_column("value", overflow="fold")
    for key, value in record["result"].items():
        if key == "configurations":
            continue
        table.add_row(key, _render_value(value))
    console.print(table)

    rows = record["result"].get("configurations")
    if rows:
        detail = Table(title="Configurations")
        for column in rows[0]:
            detail.add_column(column, overflow="fold")
        for row in rows:
            detail.add_row(*(_render_value(v) for v in row.values()))
        console.print(detail)

    if record["validity"]:
        flags = Table(title="Validity", show_header=False)
        flags.add_column("flag", style="cyan", no_wrap=True)
        flags.add_column("value", overflow="fold")
        for key, value in record["validity"].items():
            flags.add_row(key, _render_value(value))
        console.print(flags)


def _emit(record: dict[str, Any], fmt: str, out: str | None) -> None:
    if out:
        Path(out).write_text(dump_record(record) + "\n", encoding="utf-8")
    if fmt == "json":
        click.echo(dump_record(record))
    else:
        _render_human(record)


Body = Callable[[], tuple[dict[str, Any], dict[str, Any], dict[str, bool] | None, int]]


def _execute(
    ctx: click.Context, command: str, fmt: str, out: str | None, echo: dict[str, Any], body: Body
) -> None:
    """Run a command body and turn its outcome or error into a record and an exit code."""
    try:
        input_echo, result, flags, code = body()
        record = make_record(command, input_echo, result, flags)
    except ChernFqhError as e:
        logger.error(f"{command} failed: {e}")
        record = error_record(command, echo, e)
        code = e.exit_code
    except Exception as e:
        logger.exception(f"{command} failed unexpectedly")
        record = make_record(command, echo, errors=[{"code": "internal_error", "message": str(e)}])
        code = EXIT_INTERNAL
    _emit(record, fmt, out)
    ctx.exit(code)


def _convention(value: str | None) -> BinomialConvention:
    return BinomialConvention.parse(value or config.CONVENTION)


# ========================================
# Commands
# ========================================


config_option = click.option(
    "--config",
    "config_path",
    type=click.Path(exists=True, dir_okay=False),
    default=None,
    help="Path to a JSON job file. Defaults to config.json in the package.",
)
out_option = click.option(
    "--out", type=click.Path(dir_okay=False), default=None, help="Also write the JSON record here."
)
format_option = click.option(
    "--format", "fmt", type=click.Choice(FORMATS), default="human", show_default=True
)
convention_option = click.option(
    "--convention",
    type=click.Choice([c.value for c in BinomialConvention]),
    default=None,
    help="Binomial convention for the closed forms (default from CHERN_FQH_CONVENTION).",
)


@click.group()
@click.option("--log-level", default=None, help="Override CHERN_FQH_LOG_LEVEL.")
@click.version_option(package_name="chern-fqh")
def main(log_level: str | None) -> None:
    """
    chern-fqh - exact Chern characters of multilayer fractional quantum Hall bundles.
    """
    configure_logging(log_level)
    for problem in config.validate():
        logger.warning(problem)


@main.command()
@config_option
@out_option
@format_option
@convention_option
@click.option(
    "--method",
    type=click.Choice(sorted(METHODS)),
    default="theorem3",
    show_default=True,
    help="Pipeline used to compute ch(V).",
)
@click.pass_context
def chern(
    ctx: click.Context,
    config_path: str | None,
    out: str | None,
    fmt: str,
    convention: str | None,
    method: str,
) -> None:
    """Chern character, rank and conductance of one configuration."""

    def body():
        spec = JobSpec.load("chern", config_path)
        cfg = spec.configuration()
        ch = METHODS[method](cfg, _convention(convention))
        report = validity(cfg)
        notes = []
        pushforward = None
        if rank_vanishing(cfg):
            notes.append(NEGATIVE_QUASIHOLE_NOTE)
            # the pipelines that integrate still see the pushforward
            if method in ("bruteforce", "wick"):
                pushforward = ch
            else:
                pushforward = euler_characteristic(cfg, convention=_convention(convention))
            ch = ChernCharacter.zero(cfg.g)
        elif not report.certified:
            notes.append(UNCERTIFIED_NOTE)
        result = {
            "method": method,
            "n": list(cfg.n),
            "p": list(cfg.p),
            "rank": format_rational(ch.rank),
            "conductance": format_rational(ch.conductance()) if ch.rank else None,
            "ch": ch.to_strings(),
            "notes": notes,
        }
        if pushforward is not None:
            result["euler_characteristic"] = pushforward.to_strings()
        return spec.to_dict(), result, report.to_dict(), EXIT_OK

    _execute(ctx, "chern", fmt, out, {"config": config_path}, body)


@main.command()
@config_option
@out_option
@format_option
@click.pass_context
def shift(ctx: click.Context, config_path: str | None, out: str | None, fmt: str) -> None:
    """Solve K n0 = d - (g - 1) diag K."""

    def body():
        spec = JobSpec.load("shift", config_path)
        solution = solve_shift(spec.K, spec.g, spec.require_degrees())
        return spec.to_dict(), solution.to_dict(), None, EXIT_OK

    _execute(ctx, "shift", fmt, out, {"config": config_path}, body)


@main.command()
@config_option
@out_option
@format_option
@convention_option
@click.pass_context
def analyze(
    ctx: click.Context, config_path: str | None, out: str | None, fmt: str, convention: str | None
) -> None:
    """Column sums of K^-1, particle maximization and asymptotic filling."""

    def body():
        spec = JobSpec.load("analyze", config_path)
        K = spec.K
        maximization = particle_max_analysis(K)
        result: dict[str, Any] = {
            "det": det(K),
            "inverse_sum": format_rational(entry_sum(inverse(K))),
            "kminusI_psd": is_psd(K.minus_identity(), max_size=config.PSD_MAX_SIZE),
            **maximization.to_dict(),
        }
        flags = None
        if spec.d:
            result["shift"] = solve_shift(K, spec.g, spec.d).to_dict()
            if maximization.all_nonneg and all(c > 0 for c in maximization.column_sums):
                result["filling_leading"] = [
                    format_rational(v) for v in asymptotic_filling(K, spec.g, spec.d)
                ]
                result["integer_maximizer"] = list(integer_maximizer(K, spec.g, spec.d))
        if spec.p is not None:
            result.update(delta_n(K, spec.p).to_dict())
        if spec.d and (spec.n is not None or spec.solve_shift or spec.p is not None):
            cfg = spec.configuration()
            result["n"] = list(cfg.n)
            result["p"] = list(cfg.p)
            result["rank_vanishes"] = rank_vanishing(cfg)
            ch = ch_theorem3(cfg, convention=_convention(convention))
            result["rank"] = format_rational(ch.rank)
            result["conductance"] = format_rational(ch.conductance()) if ch.rank else None
            flags = validity(cfg).to_dict()
        return spec.to_dict(), result, flags, EXIT_OK

    _execute(ctx, "analyze", fmt, out, {"config": config_path}, body)


@main.command()
@config_option
@out_option
@format_option
@click.pass_context
def wick(ctx: click.Context, config_path: str | None, out: str | None, fmt: str) -> None:
    """Compare the closed Wick formula with the explicit Berezin integral."""

    def body():
        spec = JobSpec.load("wick", config_path)
        layout = GeneratorLayout(spec.K.size, spec.cycle + 1)
        pair = (1 << layout.alpha(spec.cycle)) | (1 << layout.beta(spec.cycle))
        closed = wick_closed(spec.K, spec.insertion, spec.cycle, layout=layout)
        brute = wick_bruteforce(spec.K, spec.insertion, spec.cycle, layout=layout)
        result = {
            "closed": [format_rational(closed.constant), format_rational(closed.coefficient(pair))],
            "bruteforce": [format_rational(brute.constant), format_rational(brute.coefficient(pair))],
            "equal": closed == brute,
        }
        code = EXIT_OK if closed == brute else EXIT_VERIFICATION
        return spec.to_dict(), result, None, code

    _execute(ctx, "wick", fmt, out, {"config": config_path}, body)


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Verify this single job instead of running the sweep.")
@out_option
@format_option
@convention_option
@click.option("--k-max", type=int, default=2, show_default=True)
@click.option("--g-max", type=int, default=2, show_default=True)
@click.option("--entry-max", type=int, default=4, show_default=True)
@click.option("--p-max", type=int, default=2, show_default=True)
@click.option("--spot-checks/--no-spot-checks", default=True, show_default=True,
              help="Add random configurations at (k=2, g=3) and (k=3, g=1).")
@click.option("--workers", type=int, default=None, help="Override CHERN_FQH_WORKERS.")
@click.option("--corrupt-sign", is_flag=True, default=False,
              help="Flip the Wick exponent sign; the sweep must then fail.")
@click.pass_context
def verify(
    ctx: click.Context,
    config_path: str | None,
    out: str | None,
    fmt: str,
    convention: str | None,
    k_max: int,
    g_max: int,
    entry_max: int,
    p_max: int,
    spot_checks: bool,
    workers: int | None,
    corrupt_sign: bool,
) -> None:
    """Brute-force Berezin pipeline against the closed forms."""
    exponent_sign = 1 if corrupt_sign else -1
    echo: dict[str, Any] = {
        "k_max": k_max, "g_max": g_max, "entry_max": entry_max, "p_max": p_max,
        "spot_checks": spot_checks, "corrupt_sign": corrupt_sign,
    }
    if config_path:
        echo = {"config": config_path, "corrupt_sign": corrupt_sign}

    def body():
        if config_path:
            spec = JobSpec.load("verify", config_path)
            report = verify_equivalence(
                spec.configuration(),
                convention=_convention(convention),
                exponent_sign=exponent_sign,
            )
            result = report.to_dict()
            return spec.to_dict(), result, None, EXIT_OK if report.equal else EXIT_VERIFICATION

        if fmt != "json":
            console.print(Panel(
                f"k <= {k_max}, g <= {g_max}, entries <= {entry_max}, p_i <= {p_max}\n"
                f"Spot checks: {'on' if spot_checks else 'off'}\n"
                f"Wick exponent sign: {'+ (corrupted)' if corrupt_sign else '-'}",
                title="Oracle equivalence sweep",
                border_style="blue",
            ))
        configurations = acceptance_configurations(k_max, g_max, entry_max, p_max)
        if spot_checks:
            configurations += spot_check_configurations()
        outcome = run_sweep(
            configurations,
            convention=_convention(convention),
            exponent_sign=exponent_sign,
            workers=workers,
            console=err_console,
        )
        result = outcome.to_dict()
        result["configurations"] = [
            {
                "K": r.configuration.K.to_lists(),
                "g": r.configuration.g,
                "n": list(r.configuration.n),
                "p": list(r.configuration.p),
                "pass": r.equal,
            }
            for r in outcome.reports
        ]
        return echo, result, None, EXIT_OK if outcome.passed else EXIT_VERIFICATION

    _execute(ctx, "verify", fmt, out, echo, body)


@main.command()
@config_option
@out_option
@format_option
@convention_option
@click.pass_context
def sweep(
    ctx: click.Context, config_path: str | None, out: str | None, fmt: str, convention: str | None
) -> None:
    """Exact against asymptotic conductance along a range of degrees."""

    def body():
        spec = JobSpec.load("sweep", config_path)
        if not spec.d_values:
            raise InvalidInputError("sweep needs 'd_values' or 'd_start' / 'd_stop'")
        p = spec.p if spec.p is not None else (0,) * spec.K.size
        points = conductance_sweep(
            spec.K, spec.g, p, spec.d_values, convention=_convention(convention)
        )
        if not points:
            raise InvalidInputError("no degree in the range gives an integral particle vector")
        gaps = [abs(point.difference) for point in points]
        result = {
            "p": list(p),
            "points": len(points),
            "monotone_shrinking": all(b <= a for a, b in zip(gaps, gaps[1:])),
            "max_scaled_difference": format_rational(max(pt.scaled_difference for pt in points)),
            "configurations": [point.to_dict() for point in points],
        }
        return spec.to_dict(), result, None, EXIT_OK

    _execute(ctx, "sweep", fmt, out, {"config": config_path}, body)


if __name__ == "__main__":
    main()
