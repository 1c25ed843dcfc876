"""Pipeline configuration, orchestration, and artifact emission.

A run goes envelope files (or a prebuilt cube cover) to cover to search
to recombination, and leaves behind cube dumps for every phase, a plot
CSV of the parameter and first-coefficient footprint, and a structured
text report.  The rendered report holds only deterministic fields, so
two runs over identical inputs produce byte-identical artifacts; wall
times live on the returned report object instead.
"""

from __future__ import annotations

import csv
import os
import time

from .cubes import CubeCollection, read_cubes, write_cubes
from .envelopes import EnvelopeSet, read_envelopes
from .errors import ArgumentError, WrightcertError
from .interval import Interval
from .search import SearchParams, branch_and_bound, recombine
from .seed_cover import grid_cover, seed_cubes

__all__ = [
    "RunConfig",
    "RunReport",
    "render_report",
    "run_pipeline",
    "write_plot_csv",
]

PROVENANCE_RIGOROUS = "RIGOROUS"
PROVENANCE_CONDITIONAL = "CONDITIONAL-ON-FIXTURE"


def _require_plain_int(value, name, minimum):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ArgumentError(f"{name} must be a plain integer")
    if value < minimum:
        raise ArgumentError(f"{name} must be at least {minimum}")
    return value


class RunConfig:
    """Everything one verification run needs.

    Exactly one input source is given: envelope files, which the run
    projects and grids itself, or a prebuilt cube-cover file.  The
    defaults mirror the production parameter regime (M=10, S=3, N=15,
    delta=0.5, d=6, first weight 8).  ``decay_s`` declares the tail decay
    exponent the run certifies against; projection produces exactly
    decay S, so it defaults to S and must match it when envelopes are
    the input.  ``provenance_mode`` is the claim made about the inputs:
    RIGOROUS refuses fixture-tagged envelopes outright, FIXTURE accepts
    both and lets the report record what was actually used.
    """

    __slots__ = (
        "alpha_interval",
        "M",
        "S",
        "decay_s",
        "grid_N",
        "search_params",
        "envelope_paths",
        "cover_path",
        "output_dir",
        "provenance_mode",
    )

    def __init__(
        self,
        alpha_interval: Interval,
        output_dir: str,
        *,
        M: int = 10,
        S: int = 3,
        decay_s: float | None = None,
        grid_N: int = 15,
        epsilon: float = 0.01,
        delta: float = 0.5,
        d: int = 6,
        weights=None,
        n_recombine: int = 5,
        worker_count: int = 1,
        envelope_paths=(),
        cover_path: str | None = None,
        provenance_mode: str = "FIXTURE",
    ):
        if not isinstance(alpha_interval, Interval) or alpha_interval.is_empty:
            raise ArgumentError("alpha_interval must be a nonempty Interval")
        if not isinstance(output_dir, str) or not output_dir:
            raise ArgumentError("output_dir must be a nonempty path string")
        M = _require_plain_int(M, "M", 5)
        S = _require_plain_int(S, "S", 1)
        grid_N = _require_plain_int(grid_N, "grid_N", 1)
        decay_s = float(S) if decay_s is None else float(decay_s)
        if not decay_s > 2.0:
            raise ArgumentError("decay_s must exceed 2")
        if weights is None:
            _require_plain_int(d, "d", 0)
            weights = (8.0,) + (1.0,) * d
        params = SearchParams(epsilon, delta, d, weights, n_recombine, worker_count)
        envelope_paths = tuple(str(p) for p in envelope_paths)
        if cover_path is not None:
            cover_path = str(cover_path)
        if bool(envelope_paths) == (cover_path is not None):
            raise ArgumentError(
                "configure either envelope files or a cover file, and not both"
            )
        if envelope_paths and decay_s != float(S):
            raise ArgumentError(
                "projection of envelopes produces tail decay equal to S; "
                f"decay_s={decay_s} contradicts S={S}"
            )
        if provenance_mode not in (PROVENANCE_RIGOROUS, "FIXTURE"):
            raise ArgumentError("provenance_mode must be RIGOROUS or FIXTURE")
        object.__setattr__(self, "alpha_interval", alpha_interval)
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "S", S)
        object.__setattr__(self, "decay_s", decay_s)
        object.__setattr__(self, "grid_N", grid_N)
        object.__setattr__(self, "search_params", params)
        object.__setattr__(self, "envelope_paths", envelope_paths)
        object.__setattr__(self, "cover_path", cover_path)
        object.__setattr__(self, "output_dir", output_dir)
        object.__setattr__(self, "provenance_mode", provenance_mode)

    def __setattr__(self, name, value):
        raise AttributeError("RunConfig is immutable")


class RunReport:
    """Counts, verdict, certified unions, and timings of one run."""

    __slots__ = (
        "verdict",
        "provenance",
        "envelope_count",
        "seeded_count",
        "cover_count",
        "a_count",
        "b_count",
        "r_count",
        "alpha_union_A",
        "alpha_union_B",
        "cover_seconds",
        "search_seconds",
        "recombine_seconds",
        "stats",
    )

    def __init__(
        self,
        verdict,
        provenance,
        envelope_count,
        seeded_count,
        cover_count,
        a_count,
        b_count,
        r_count,
        alpha_union_A,
        alpha_union_B,
        cover_seconds,
        search_seconds,
        recombine_seconds,
        stats,
    ):
        object.__setattr__(self, "verdict", verdict)
        object.__setattr__(self, "provenance", provenance)
        object.__setattr__(self, "envelope_count", int(envelope_count))
        object.__setattr__(self, "seeded_count", int(seeded_count))
        object.__setattr__(self, "cover_count", int(cover_count))
        object.__setattr__(self, "a_count", int(a_count))
        object.__setattr__(self, "b_count", int(b_count))
        object.__setattr__(self, "r_count", int(r_count))
        object.__setattr__(self, "alpha_union_A", tuple(alpha_union_A))
        object.__setattr__(self, "alpha_union_B", tuple(alpha_union_B))
        object.__setattr__(self, "cover_seconds", float(cover_seconds))
        object.__setattr__(self, "search_seconds", float(search_seconds))
        object.__setattr__(self, "recombine_seconds", float(recombine_seconds))
        object.__setattr__(self, "stats", stats)

    def __setattr__(self, name, value):
        raise AttributeError("RunReport is immutable")


def _union_text(union) -> str:
    if not union:
        return "(empty)"
    return "; ".join(f"[{t.lo!r}, {t.hi!r}]" for t in union)


def render_report(report: RunReport) -> str:
    """The structured text form of the report's deterministic fields."""
    lines = [
        f"verdict: {report.verdict}",
        f"provenance: {report.provenance}",
        f"envelope_count: {report.envelope_count}",
        f"seeded_count: {report.seeded_count}",
        f"cover_count: {report.cover_count}",
        f"a_count: {report.a_count}",
        f"b_count: {report.b_count}",
        f"r_count: {report.r_count}",
        f"alpha_union_A: {_union_text(report.alpha_union_A)}",
        f"alpha_union_B: {_union_text(report.alpha_union_B)}",
    ]
    return "\n".join(lines) + "\n"


def write_plot_csv(path, A, B, R) -> None:
    """Parameter and first-coefficient footprint of every cube, by class."""
    with open(path, "w", encoding="ascii", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["alpha_lo", "alpha_hi", "a1_lo", "a1_hi", "class"])
        for label, cubes in (("A", A), ("B", B), ("R", R)):
            for X in cubes:
                a1 = X.coeffs[0].re
                writer.writerow(
                    [repr(X.alpha.lo), repr(X.alpha.hi), repr(a1.lo), repr(a1.hi), label]
                )


def _read_envelope_file(path) -> EnvelopeSet:
    try:
        return read_envelopes(path)
    except OSError as exc:
        raise ArgumentError(f"cannot read envelope file {path}: {exc}") from exc
    except WrightcertError as exc:
        raise ArgumentError(f"envelope file {path}: {exc}") from exc


def _read_cover_file(path) -> CubeCollection:
    try:
        return read_cubes(path)
    except OSError as exc:
        raise ArgumentError(f"cannot read cover file {path}: {exc}") from exc
    except WrightcertError as exc:
        raise ArgumentError(f"cover file {path}: {exc}") from exc


def run_pipeline(cfg: RunConfig) -> RunReport:
    """Cover, search, recombine, and write every artifact of the run.

    The output directory receives cover.txt plus A.txt, B.txt, and R.txt
    with the post-recombination collections, plot.csv, and report.txt.  A
    FAILURE from recombination is a verdict, not an exception; bad inputs
    and unreadable files raise immediately with the offending path.
    """
    if not isinstance(cfg, RunConfig):
        raise ArgumentError("run_pipeline expects a RunConfig")

    started = time.monotonic()
    if cfg.cover_path is not None:
        cover = _read_cover_file(cfg.cover_path)
        if len(cover):
            head = cover[0]
            if head.M != cfg.M:
                raise ArgumentError(
                    f"cover file {cfg.cover_path} holds M={head.M} cubes "
                    f"but the configuration declares M={cfg.M}"
                )
            if head.decay_s != cfg.decay_s:
                raise ArgumentError(
                    f"cover file {cfg.cover_path} has decay exponent "
                    f"{head.decay_s} but the configuration declares {cfg.decay_s}"
                )
        envelope_count = seeded_count = len(cover)
        rigorous = cfg.provenance_mode == PROVENANCE_RIGOROUS
    else:
        envelopes = [_read_envelope_file(p) for p in cfg.envelope_paths]
        if cfg.provenance_mode == PROVENANCE_RIGOROUS:
            for path, env in zip(cfg.envelope_paths, envelopes):
                if env.provenance != PROVENANCE_RIGOROUS:
                    raise ArgumentError(
                        f"envelope file {path} is tagged {env.provenance} "
                        "but the run demands RIGOROUS inputs"
                    )
        rigorous = all(env.provenance == PROVENANCE_RIGOROUS for env in envelopes)
        seeded = seed_cubes(cfg.alpha_interval, cfg.M, cfg.S, envelopes)
        cover = grid_cover(seeded, cfg.grid_N)
        envelope_count = len(envelopes)
        seeded_count = len(seeded)
    provenance = PROVENANCE_RIGOROUS if rigorous else PROVENANCE_CONDITIONAL
    cover_seconds = time.monotonic() - started

    searched = time.monotonic()
    outcome = branch_and_bound(cover, cfg.search_params)
    search_seconds = time.monotonic() - searched

    recombined = time.monotonic()
    result = recombine(outcome, cfg.search_params.n_recombine)
    recombine_seconds = time.monotonic() - recombined

    os.makedirs(cfg.output_dir, exist_ok=True)
    final = result.outcome
    write_cubes(os.path.join(cfg.output_dir, "cover.txt"), cover)
    write_cubes(os.path.join(cfg.output_dir, "A.txt"), final.A)
    write_cubes(os.path.join(cfg.output_dir, "B.txt"), final.B)
    write_cubes(os.path.join(cfg.output_dir, "R.txt"), final.R)
    write_plot_csv(os.path.join(cfg.output_dir, "plot.csv"), final.A, final.B, final.R)

    report = RunReport(
        verdict=result.status,
        provenance=provenance,
        envelope_count=envelope_count,
        seeded_count=seeded_count,
        cover_count=len(cover),
        a_count=len(final.A),
        b_count=len(final.B),
        r_count=len(final.R),
        alpha_union_A=result.alpha_union_A,
        alpha_union_B=result.alpha_union_B,
        cover_seconds=cover_seconds,
        search_seconds=search_seconds,
        recombine_seconds=recombine_seconds,
        stats=outcome.stats,
    )
    with open(os.path.join(cfg.output_dir, "report.txt"), "w", encoding="ascii") as fh:
        fh.write(render_report(report))
    return report
