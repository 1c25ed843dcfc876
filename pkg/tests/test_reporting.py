"""Pipeline orchestration, report rendering, and artifact tests."""

import csv
import filecmp
import os

import pytest

from wrightcert.cubes import CubeCollection, read_cubes, write_cubes
from wrightcert.envelopes import write_envelopes
from wrightcert.errors import ArgumentError
from wrightcert.interval import Interval
from wrightcert.oracle import fixture_envelopes
from wrightcert.reporting import (
    RunConfig,
    RunReport,
    render_report,
    run_pipeline,
    write_plot_csv,
)
from wrightcert.search import SearchParams

from cubefixtures import near_zero_cube, sops_cube

WINDOW = Interval(1.899, 1.900)


@pytest.fixture(scope="module")
def envelope_path(tmp_path_factory):
    path = tmp_path_factory.mktemp("envelopes") / "env.txt"
    env = fixture_envelopes(WINDOW, 10, 3, n_time=256, margin=0.02)
    write_envelopes(path, env)
    return str(path)


@pytest.fixture(scope="module")
def certified_cover_path(tmp_path_factory):
    path = tmp_path_factory.mktemp("cover") / "cover.txt"
    X = sops_cube(1.89995, 1.90005, 10, 5e-4, 1.3)
    write_cubes(path, CubeCollection([X]))
    return str(path)


@pytest.fixture(scope="module")
def pipeline_runs(tmp_path_factory, envelope_path):
    """The same envelope-driven run executed twice into separate directories."""
    done = []
    for name in ("run1", "run2"):
        outdir = tmp_path_factory.mktemp(name)
        cfg = RunConfig(WINDOW, str(outdir), grid_N=2,
                        envelope_paths=[envelope_path])
        done.append((str(outdir), run_pipeline(cfg)))
    return done


class TestRunConfig:
    def test_defaults(self, envelope_path):
        cfg = RunConfig(WINDOW, "out", envelope_paths=[envelope_path])
        assert cfg.M == 10
        assert cfg.S == 3
        assert cfg.decay_s == 3.0
        assert cfg.grid_N == 15
        assert cfg.provenance_mode == "FIXTURE"
        assert cfg.cover_path is None
        p = cfg.search_params
        assert isinstance(p, SearchParams)
        assert p.epsilon == 0.01
        assert p.delta == 0.5
        assert p.d == 6
        assert p.weights == (8.0,) + (1.0,) * 6
        assert p.n_recombine == 5
        assert p.worker_count == 1

    def test_is_immutable(self, envelope_path):
        cfg = RunConfig(WINDOW, "out", envelope_paths=[envelope_path])
        with pytest.raises(AttributeError):
            cfg.M = 12

    def test_requires_exactly_one_input_source(self):
        with pytest.raises(ArgumentError):
            RunConfig(WINDOW, "out")
        with pytest.raises(ArgumentError):
            RunConfig(WINDOW, "out", envelope_paths=["e.txt"],
                      cover_path="c.txt")

    def test_envelope_input_pins_decay_to_s(self):
        with pytest.raises(ArgumentError):
            RunConfig(WINDOW, "out", envelope_paths=["e.txt"], decay_s=2.5)
        cfg = RunConfig(WINDOW, "out", cover_path="c.txt", decay_s=2.5)
        assert cfg.decay_s == 2.5

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"M": 4},
            {"M": 10.0},
            {"S": 0},
            {"grid_N": 0},
            {"decay_s": 2.0},
            {"provenance_mode": "MAYBE"},
            {"epsilon": 0.0},
            {"worker_count": 0},
        ],
    )
    def test_rejects_bad_fields(self, kwargs):
        with pytest.raises(ArgumentError):
            RunConfig(WINDOW, "out", cover_path="c.txt", **kwargs)

    def test_rejects_bad_window_and_output(self):
        with pytest.raises(ArgumentError):
            RunConfig((1.8, 1.9), "out", cover_path="c.txt")
        with pytest.raises(ArgumentError):
            RunConfig(WINDOW, "", cover_path="c.txt")

    def test_custom_weights_pass_through(self):
        cfg = RunConfig(WINDOW, "out", cover_path="c.txt", d=2,
                        weights=(4.0, 1.0, 2.0))
        assert cfg.search_params.weights == (4.0, 1.0, 2.0)


class TestRenderReport:
    @staticmethod
    def make_report(**overrides):
        fields = dict(
            verdict="SUCCESS",
            provenance="CONDITIONAL-ON-FIXTURE",
            envelope_count=1,
            seeded_count=2,
            cover_count=4,
            a_count=3,
            b_count=1,
            r_count=0,
            alpha_union_A=(Interval(1.899, 1.9),),
            alpha_union_B=(),
            cover_seconds=1.0,
            search_seconds=2.0,
            recombine_seconds=3.0,
            stats=None,
        )
        fields.update(overrides)
        return RunReport(**fields)

    def test_fixed_field_order_and_values(self):
        text = render_report(self.make_report())
        assert text == (
            "verdict: SUCCESS\n"
            "provenance: CONDITIONAL-ON-FIXTURE\n"
            "envelope_count: 1\n"
            "seeded_count: 2\n"
            "cover_count: 4\n"
            "a_count: 3\n"
            "b_count: 1\n"
            "r_count: 0\n"
            "alpha_union_A: [1.899, 1.9]\n"
            "alpha_union_B: (empty)\n"
        )

    def test_multiple_segments_join_with_semicolons(self):
        rep = self.make_report(
            alpha_union_A=(Interval(1.0, 1.5), Interval(1.6, 2.0)),
        )
        assert "alpha_union_A: [1.0, 1.5]; [1.6, 2.0]" in render_report(rep)

    def test_wall_times_stay_off_the_rendered_report(self):
        fast = render_report(self.make_report(search_seconds=0.5))
        slow = render_report(self.make_report(search_seconds=500.0))
        assert fast == slow

    def test_report_object_is_immutable(self):
        rep = self.make_report()
        with pytest.raises(AttributeError):
            rep.verdict = "FAILURE"


class TestPlotCsv:
    def test_rows_cover_every_class(self, tmp_path):
        a = sops_cube(1.89, 1.90, 10, 1e-3, 1.3)
        b = near_zero_cube(Interval(1.6, 1.7), Interval(1.5, 1.6))
        path = tmp_path / "plot.csv"
        write_plot_csv(path, CubeCollection([a]), CubeCollection([b]),
                       CubeCollection())
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["alpha_lo", "alpha_hi", "a1_lo", "a1_hi", "class"]
        assert len(rows) == 3
        assert rows[1][4] == "A"
        assert rows[2][4] == "B"
        assert float(rows[1][0]) == a.alpha.lo
        assert float(rows[1][2]) == a.coeffs[0].re.lo
        assert float(rows[2][1]) == b.alpha.hi

    def test_row_values_round_trip_exactly(self, tmp_path):
        a = sops_cube(1.89, 1.90, 10, 1e-3, 1.3)
        path = tmp_path / "plot.csv"
        write_plot_csv(path, CubeCollection([a]), CubeCollection(),
                       CubeCollection())
        with open(path, newline="") as fh:
            row = list(csv.reader(fh))[1]
        assert float(row[0]) == a.alpha.lo
        assert float(row[1]) == a.alpha.hi
        assert float(row[2]) == a.coeffs[0].re.lo
        assert float(row[3]) == a.coeffs[0].re.hi


class TestPipelineEnvelopeBranch:
    def test_verdict_and_counts(self, pipeline_runs):
        _, rep = pipeline_runs[0]
        assert rep.verdict == "SUCCESS"
        assert rep.provenance == "CONDITIONAL-ON-FIXTURE"
        assert rep.envelope_count == 1
        assert rep.seeded_count == 1
        assert rep.cover_count >= 1
        assert rep.a_count >= 1
        assert rep.r_count == 0

    def test_certified_union_covers_the_window(self, pipeline_runs):
        _, rep = pipeline_runs[0]
        assert len(rep.alpha_union_A) == 1
        seg = rep.alpha_union_A[0]
        assert seg.lo <= WINDOW.lo and WINDOW.hi <= seg.hi

    def test_artifacts_exist_and_report_matches(self, pipeline_runs):
        outdir, rep = pipeline_runs[0]
        for name in ("cover.txt", "A.txt", "B.txt", "R.txt",
                      "plot.csv", "report.txt"):
            assert os.path.exists(os.path.join(outdir, name))
        with open(os.path.join(outdir, "report.txt")) as fh:
            assert fh.read() == render_report(rep)

    def test_dumped_counts_match_report(self, pipeline_runs):
        outdir, rep = pipeline_runs[0]
        assert len(read_cubes(os.path.join(outdir, "A.txt"))) == rep.a_count
        assert len(read_cubes(os.path.join(outdir, "B.txt"))) == rep.b_count
        assert len(read_cubes(os.path.join(outdir, "R.txt"))) == rep.r_count
        cover = read_cubes(os.path.join(outdir, "cover.txt"))
        assert len(cover) == rep.cover_count

    def test_repeat_run_writes_identical_artifacts(self, pipeline_runs):
        first, second = pipeline_runs
        for name in ("cover.txt", "A.txt", "B.txt", "R.txt",
                      "plot.csv", "report.txt"):
            assert filecmp.cmp(os.path.join(first[0], name),
                               os.path.join(second[0], name),
                               shallow=False), name

    def test_timings_live_on_the_object(self, pipeline_runs):
        _, rep = pipeline_runs[0]
        assert rep.cover_seconds > 0.0
        assert rep.search_seconds > 0.0
        assert rep.recombine_seconds >= 0.0
        assert rep.stats is not None
        assert rep.stats.pops >= rep.cover_count

    def test_rigorous_mode_refuses_fixture_envelopes(self, envelope_path,
                                                     tmp_path):
        cfg = RunConfig(WINDOW, str(tmp_path), grid_N=2,
                        envelope_paths=[envelope_path],
                        provenance_mode="RIGOROUS")
        with pytest.raises(ArgumentError, match="RIGOROUS"):
            run_pipeline(cfg)

    def test_missing_envelope_file_names_the_path(self, tmp_path):
        cfg = RunConfig(WINDOW, str(tmp_path), grid_N=2,
                        envelope_paths=[str(tmp_path / "absent.txt")])
        with pytest.raises(ArgumentError, match="absent.txt"):
            run_pipeline(cfg)


class TestPipelineCoverBranch:
    def test_single_verified_cube(self, certified_cover_path, tmp_path):
        cfg = RunConfig(WINDOW, str(tmp_path / "out"),
                        cover_path=certified_cover_path)
        rep = run_pipeline(cfg)
        assert rep.verdict == "SUCCESS"
        assert (rep.envelope_count, rep.seeded_count, rep.cover_count) == (1, 1, 1)
        assert (rep.a_count, rep.b_count, rep.r_count) == (1, 0, 0)
        assert rep.alpha_union_A == (Interval(1.89995, 1.90005),)
        assert rep.alpha_union_B == ()

    def test_cover_files_carry_no_tag_so_the_mode_decides(
            self, certified_cover_path, tmp_path):
        cfg = RunConfig(WINDOW, str(tmp_path / "r"),
                        cover_path=certified_cover_path,
                        provenance_mode="RIGOROUS")
        assert run_pipeline(cfg).provenance == "RIGOROUS"
        cfg = RunConfig(WINDOW, str(tmp_path / "f"),
                        cover_path=certified_cover_path,
                        provenance_mode="FIXTURE")
        assert run_pipeline(cfg).provenance == "CONDITIONAL-ON-FIXTURE"

    def test_mode_mismatch_errors_name_the_file(self, certified_cover_path,
                                                tmp_path):
        cfg = RunConfig(WINDOW, str(tmp_path), cover_path=certified_cover_path,
                        M=12)
        with pytest.raises(ArgumentError, match="cover.txt"):
            run_pipeline(cfg)
        cfg = RunConfig(WINDOW, str(tmp_path), cover_path=certified_cover_path,
                        decay_s=4.0)
        with pytest.raises(ArgumentError, match="decay"):
            run_pipeline(cfg)

    def test_missing_cover_file_names_the_path(self, tmp_path):
        cfg = RunConfig(WINDOW, str(tmp_path),
                        cover_path=str(tmp_path / "nope.txt"))
        with pytest.raises(ArgumentError, match="nope.txt"):
            run_pipeline(cfg)

    def test_rejects_non_config_argument(self):
        with pytest.raises(ArgumentError):
            run_pipeline({"alpha": WINDOW})
