"""Command line front end.

One verb per pipeline stage plus a full-run verb, a single-cube check,
and the non-rigorous fixture generator.  The full-run verb reads an
optional JSON config file; explicit flags override the file, and the
file overrides built-in defaults.
"""

from __future__ import annotations

import functools
import json
import os
import random

import click

from .cubes import CubeCollection, read_cubes, write_cubes
from .envelopes import read_envelopes, write_envelopes
from .errors import SingularMidpoint, WrightcertError
from .functional import center_of, tail_bounds
from .interval import Interval
from .krawczyk import build_preconditioner, krawczyk_outer
from .oracle import fixture_envelopes, oracle_solve_sops
from .reporting import RunConfig, render_report, run_pipeline, write_plot_csv
from .search import SearchOutcome, SearchParams, branch_and_bound, recombine
from .seed_cover import build_cover

_CONFIG_KEYS = {
    "alpha",
    "M",
    "S",
    "decay_s",
    "grid_N",
    "epsilon",
    "delta",
    "d",
    "weights",
    "n_recombine",
    "worker_count",
    "envelope_paths",
    "cover_path",
    "output_dir",
    "provenance_mode",
}


def _guard(fn):
    """Turn package errors and I/O failures into clean CLI errors."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (WrightcertError, OSError) as exc:
            raise click.ClickException(str(exc)) from exc

    return wrapper


def _parse_weights(text):
    if text is None:
        return None
    try:
        return tuple(float(part) for part in text.split(","))
    except ValueError as exc:
        raise click.ClickException(f"bad weight list {text!r}: {exc}") from exc


@click.group()
@click.option(
    "--seed",
    type=int,
    default=None,
    help="Seed for sampling utilities; the verification pipeline itself "
    "is deterministic and ignores it.",
)
def main(seed):
    """Certified enclosure of slowly oscillating periodic solutions."""
    if seed is not None:
        random.seed(seed)


@main.command()
@click.option("--alpha-lo", type=float, required=True, help="Parameter window start.")
@click.option("--alpha-hi", type=float, required=True, help="Parameter window end.")
@click.option(
    "--envelope",
    "envelopes",
    type=click.Path(exists=True, dir_okay=False),
    multiple=True,
    required=True,
    help="Envelope file; repeat for several.",
)
@click.option("--m", type=int, default=10, show_default=True, help="Fourier modes kept.")
@click.option("--s", type=int, default=3, show_default=True, help="Derivative orders used.")
@click.option("--grid-n", type=int, default=15, show_default=True, help="Grid size per axis.")
@click.option("--out", type=click.Path(dir_okay=False), required=True)
@_guard
def cover(alpha_lo, alpha_hi, envelopes, m, s, grid_n, out):
    """Project envelope files into an initial cube cover."""
    sets = [read_envelopes(path) for path in envelopes]
    cubes = build_cover(Interval(alpha_lo, alpha_hi), m, s, grid_n, sets)
    write_cubes(out, cubes)
    click.echo(f"cover: {len(cubes)} cubes -> {out}")


@main.command()
@click.option("--cover", "cover_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--out-dir", type=click.Path(file_okay=False), required=True)
@click.option("--epsilon", type=float, default=0.01, show_default=True)
@click.option("--delta", type=float, default=0.5, show_default=True)
@click.option("--d", type=int, default=6, show_default=True)
@click.option("--weights", type=str, default=None, help="Comma-separated, one per dimension 0..d.")
@click.option("--workers", type=int, default=1, show_default=True)
@click.option("--checkpoint-dir", type=click.Path(file_okay=False), default=None)
@click.option("--checkpoint-interval", type=int, default=256, show_default=True)
@_guard
def search(cover_path, out_dir, epsilon, delta, d, weights, workers,
           checkpoint_dir, checkpoint_interval):
    """Classify a cube cover into certified, gate, and unresolved cubes."""
    cubes = read_cubes(cover_path)
    weights = _parse_weights(weights) or (8.0,) + (1.0,) * d
    params = SearchParams(epsilon, delta, d, weights, worker_count=workers)
    if checkpoint_dir is not None:
        os.makedirs(checkpoint_dir, exist_ok=True)
    outcome = branch_and_bound(
        cubes,
        params,
        checkpoint_dir=checkpoint_dir,
        checkpoint_interval=checkpoint_interval,
    )
    os.makedirs(out_dir, exist_ok=True)
    write_cubes(os.path.join(out_dir, "A.txt"), outcome.A)
    write_cubes(os.path.join(out_dir, "B.txt"), outcome.B)
    write_cubes(os.path.join(out_dir, "R.txt"), outcome.R)
    stats = outcome.stats
    click.echo(
        f"search: {len(outcome.A)} certified, {len(outcome.B)} gate, "
        f"{len(outcome.R)} unresolved ({stats.pops} pops, {stats.splits} splits, "
        f"{stats.wall_seconds:.1f}s)"
    )


@main.command("recombine")
@click.option("--search-dir", type=click.Path(exists=True, file_okay=False), required=True,
              help="Directory holding A.txt, B.txt, R.txt from a search run.")
@click.option("--n", type=int, default=5, show_default=True, help="Prune iterations per check.")
@click.option("--out-dir", type=click.Path(file_okay=False), required=True)
@click.pass_context
@_guard
def recombine_cmd(ctx, search_dir, n, out_dir):
    """Resolve unresolved cubes and certify the parameter unions."""
    outcome = SearchOutcome(
        read_cubes(os.path.join(search_dir, "A.txt")),
        read_cubes(os.path.join(search_dir, "B.txt")),
        read_cubes(os.path.join(search_dir, "R.txt")),
        None,
    )
    result = recombine(outcome, n)
    os.makedirs(out_dir, exist_ok=True)
    final = result.outcome
    write_cubes(os.path.join(out_dir, "A.txt"), final.A)
    write_cubes(os.path.join(out_dir, "B.txt"), final.B)
    write_cubes(os.path.join(out_dir, "R.txt"), final.R)
    click.echo(f"status: {result.status}")
    click.echo("alpha_union_A: " + _union_text(result.alpha_union_A))
    click.echo("alpha_union_B: " + _union_text(result.alpha_union_B))
    if result.status != "SUCCESS":
        ctx.exit(1)


def _union_text(union):
    if not union:
        return "(empty)"
    return "; ".join(f"[{t.lo!r}, {t.hi!r}]" for t in union)


def _load_config_file(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            values = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise click.ClickException(f"config file {path}: {exc}") from exc
    if not isinstance(values, dict):
        raise click.ClickException(f"config file {path} must hold a JSON object")
    unknown = sorted(set(values) - _CONFIG_KEYS)
    if unknown:
        raise click.ClickException(
            f"config file {path} has unknown keys: {', '.join(unknown)}"
        )
    return values


@main.command()
@click.option("--config", type=click.Path(exists=True, dir_okay=False), default=None,
              help="JSON config; flags override its values.")
@click.option("--alpha-lo", type=float, default=None)
@click.option("--alpha-hi", type=float, default=None)
@click.option("--m", type=int, default=None)
@click.option("--s", type=int, default=None)
@click.option("--decay-s", type=float, default=None)
@click.option("--grid-n", type=int, default=None)
@click.option("--epsilon", type=float, default=None)
@click.option("--delta", type=float, default=None)
@click.option("--d", type=int, default=None)
@click.option("--weights", type=str, default=None)
@click.option("--n-recombine", type=int, default=None)
@click.option("--workers", type=int, default=None)
@click.option("--envelope", "envelopes", type=click.Path(exists=True, dir_okay=False),
              multiple=True)
@click.option("--cover", "cover_path", type=click.Path(exists=True, dir_okay=False),
              default=None)
@click.option("--out-dir", type=click.Path(file_okay=False), default=None)
@click.option("--provenance-mode", type=click.Choice(["RIGOROUS", "FIXTURE"]),
              default=None)
@click.pass_context
@_guard
def verify(ctx, config, alpha_lo, alpha_hi, m, s, decay_s, grid_n, epsilon, delta,
           d, weights, n_recombine, workers, envelopes, cover_path, out_dir,
           provenance_mode):
    """Run the full pipeline and print the report."""
    values = _load_config_file(config) if config else {}

    kwargs = {}
    if "alpha" in values:
        window = values["alpha"]
        if not (isinstance(window, list) and len(window) == 2):
            raise click.ClickException("config key 'alpha' must be [lo, hi]")
        kwargs["alpha_interval"] = Interval(float(window[0]), float(window[1]))
    for key in ("M", "S", "grid_N", "d", "n_recombine", "worker_count"):
        if key in values:
            kwargs[key] = values[key]
    for key in ("decay_s", "epsilon", "delta"):
        if key in values:
            kwargs[key] = float(values[key])
    if "weights" in values:
        kwargs["weights"] = tuple(float(w) for w in values["weights"])
    if "envelope_paths" in values:
        kwargs["envelope_paths"] = tuple(str(p) for p in values["envelope_paths"])
    if "cover_path" in values and values["cover_path"] is not None:
        kwargs["cover_path"] = str(values["cover_path"])
    if "output_dir" in values:
        kwargs["output_dir"] = str(values["output_dir"])
    if "provenance_mode" in values:
        kwargs["provenance_mode"] = values["provenance_mode"]

    if alpha_lo is not None or alpha_hi is not None:
        if alpha_lo is None or alpha_hi is None:
            raise click.ClickException("--alpha-lo and --alpha-hi come as a pair")
        kwargs["alpha_interval"] = Interval(alpha_lo, alpha_hi)
    flag_values = {
        "M": m,
        "S": s,
        "decay_s": decay_s,
        "grid_N": grid_n,
        "epsilon": epsilon,
        "delta": delta,
        "d": d,
        "weights": _parse_weights(weights),
        "n_recombine": n_recombine,
        "worker_count": workers,
        "cover_path": cover_path,
        "output_dir": out_dir,
        "provenance_mode": provenance_mode,
    }
    for key, value in flag_values.items():
        if value is not None:
            kwargs[key] = value
    if envelopes:
        kwargs["envelope_paths"] = envelopes

    if "alpha_interval" not in kwargs:
        raise click.ClickException("the parameter window is missing: pass "
                                   "--alpha-lo/--alpha-hi or config key 'alpha'")
    if "output_dir" not in kwargs:
        raise click.ClickException("the output directory is missing: pass "
                                   "--out-dir or config key 'output_dir'")
    alpha_interval = kwargs.pop("alpha_interval")
    output_dir = kwargs.pop("output_dir")
    cfg = RunConfig(alpha_interval, output_dir, **kwargs)

    report = run_pipeline(cfg)
    click.echo(render_report(report), nl=False)
    click.echo(
        f"timings: cover {report.cover_seconds:.1f}s, "
        f"search {report.search_seconds:.1f}s, "
        f"recombine {report.recombine_seconds:.1f}s"
    )
    if report.verdict != "SUCCESS":
        ctx.exit(1)


@main.command()
@click.option("--cubes", "cubes_path", type=click.Path(exists=True, dir_okay=False),
              required=True, help="Cube record file.")
@click.option("--index", type=int, default=0, show_default=True,
              help="Which cube in the file to check.")
@_guard
def krawczyk(cubes_path, index):
    """Evaluate the verified root test on a single cube."""
    cubes = read_cubes(cubes_path)
    if not 0 <= index < len(cubes):
        raise click.ClickException(
            f"{cubes_path} holds {len(cubes)} cubes; index {index} is out of range"
        )
    X = cubes[index]
    xbar = center_of(X)
    T = tail_bounds(X, xbar)
    try:
        P = build_preconditioner(xbar, X.M)
    except SingularMidpoint as exc:
        raise click.ClickException(f"midpoint system is singular: {exc}") from exc
    image = krawczyk_outer(X, xbar, P, T)
    click.echo(f"verdict: {image.verdict}")
    click.echo(f"tail_bound: {image.g_inf!r}")


@main.command()
@click.option("--alpha", type=float, default=None, help="Point solve: print the solution.")
@click.option("--alpha-lo", type=float, default=None, help="Envelope window start.")
@click.option("--alpha-hi", type=float, default=None, help="Envelope window end.")
@click.option("--m", type=int, default=10, show_default=True)
@click.option("--s", type=int, default=3, show_default=True)
@click.option("--n-time", type=int, default=256, show_default=True)
@click.option("--n-alpha", type=int, default=7, show_default=True)
@click.option("--margin", type=float, default=0.02, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Write a fixture envelope file instead of printing.")
@_guard
def oracle(alpha, alpha_lo, alpha_hi, m, s, n_time, n_alpha, margin, out):
    """Non-rigorous branch solver and fixture envelope generator."""
    if out is not None:
        if alpha_lo is None or alpha_hi is None:
            raise click.ClickException(
                "envelope output needs --alpha-lo and --alpha-hi"
            )
        env = fixture_envelopes(
            Interval(alpha_lo, alpha_hi), m, s,
            n_time=n_time, n_alpha=n_alpha, margin=margin,
        )
        write_envelopes(out, env)
        click.echo(
            f"fixture envelopes: S={env.S}, n_time={env.n_time}, "
            f"period=[{env.period.lo!r}, {env.period.hi!r}] -> {out}"
        )
        return
    if alpha is None:
        raise click.ClickException("pass --alpha for a point solve or --out "
                                   "with a window for envelope generation")
    omega, coeffs = oracle_solve_sops(alpha, m)
    click.echo(f"omega: {omega!r}")
    for k, z in enumerate(coeffs, start=1):
        click.echo(f"c_{k}: {float(z.real)!r} {float(z.imag)!r}")


@main.command()
@click.option("--run-dir", type=click.Path(exists=True, file_okay=False), required=True,
              help="Directory holding A.txt, B.txt, R.txt.")
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Plot CSV path; defaults to plot.csv inside the run directory.")
@_guard
def report(run_dir, out):
    """Summarize a finished run and emit its plot CSV."""
    A = read_cubes(os.path.join(run_dir, "A.txt"))
    B = read_cubes(os.path.join(run_dir, "B.txt"))
    R = read_cubes(os.path.join(run_dir, "R.txt"))
    out = out or os.path.join(run_dir, "plot.csv")
    write_plot_csv(out, A, B, R)
    click.echo(f"a_count: {len(A)}")
    click.echo(f"b_count: {len(B)}")
    click.echo(f"r_count: {len(R)}")
    click.echo(f"plot: {out}")


if __name__ == "__main__":
    main()
