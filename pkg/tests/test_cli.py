"""Command line interface tests driven through click's test runner."""

import json
import os

import pytest
from click.testing import CliRunner

from wrightcert.cli import main
from wrightcert.cubes import CubeCollection, read_cubes, write_cubes
from wrightcert.envelopes import read_envelopes
from wrightcert.interval import Interval

from cubefixtures import near_zero_cube, sops_cube


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture(scope="module")
def certified_cover(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli_cover") / "cover.txt"
    write_cubes(path, CubeCollection([sops_cube(1.89995, 1.90005, 10, 5e-4, 1.3)]))
    return str(path)


@pytest.fixture(scope="module")
def search_run(tmp_path_factory, certified_cover):
    """A finished search over the certified single-cube cover."""
    outdir = tmp_path_factory.mktemp("cli_search")
    result = CliRunner().invoke(
        main, ["search", "--cover", certified_cover, "--out-dir", str(outdir)]
    )
    assert result.exit_code == 0, result.output
    return str(outdir)


class TestHelp:
    def test_group_lists_every_verb(self, runner):
        result = runner.invoke(main, ["--help"])
        assert result.exit_code == 0
        for verb in ("cover", "search", "recombine", "verify",
                     "krawczyk", "oracle", "report"):
            assert verb in result.output

    def test_seed_option_is_accepted(self, runner):
        result = runner.invoke(main, ["--seed", "7", "--help"])
        assert result.exit_code == 0


class TestOracle:
    def test_point_solve_prints_the_branch(self, runner):
        result = runner.invoke(main, ["oracle", "--alpha", "1.8995", "--m", "5"])
        assert result.exit_code == 0, result.output
        lines = result.output.splitlines()
        assert lines[0].startswith("omega: ")
        omega = float(lines[0].split(": ")[1])
        assert 1.4 < omega < 1.6
        assert len(lines) == 6
        first = lines[1].split()
        assert first[0] == "c_1:"
        assert float(first[1]) > 0.0
        assert float(first[2]) == 0.0

    def test_envelope_generation_writes_a_readable_file(self, runner, tmp_path):
        out = str(tmp_path / "env.txt")
        result = runner.invoke(
            main,
            ["oracle", "--alpha-lo", "1.899", "--alpha-hi", "1.900",
             "--m", "8", "--s", "3", "--n-time", "64", "--n-alpha", "3",
             "--out", out],
        )
        assert result.exit_code == 0, result.output
        env = read_envelopes(out)
        assert env.S == 3
        assert env.n_time == 64
        assert env.provenance == "FIXTURE"

    def test_without_alpha_or_out_fails(self, runner):
        result = runner.invoke(main, ["oracle"])
        assert result.exit_code != 0
        assert "--alpha" in result.output

    def test_out_without_window_fails(self, runner, tmp_path):
        result = runner.invoke(
            main, ["oracle", "--out", str(tmp_path / "env.txt")]
        )
        assert result.exit_code != 0
        assert "--alpha-lo" in result.output

    def test_unstable_parameter_is_a_clean_error(self, runner):
        result = runner.invoke(main, ["oracle", "--alpha", "1.0"])
        assert result.exit_code != 0
        assert "Error" in result.output


class TestCover:
    def test_projects_envelopes_into_cubes(self, runner, tmp_path):
        env = str(tmp_path / "env.txt")
        result = runner.invoke(
            main,
            ["oracle", "--alpha-lo", "1.899", "--alpha-hi", "1.900",
             "--n-time", "64", "--n-alpha", "3", "--out", env],
        )
        assert result.exit_code == 0, result.output
        out = str(tmp_path / "cover.txt")
        result = runner.invoke(
            main,
            ["cover", "--alpha-lo", "1.899", "--alpha-hi", "1.900",
             "--envelope", env, "--grid-n", "2", "--out", out],
        )
        assert result.exit_code == 0, result.output
        cubes = read_cubes(out)
        assert len(cubes) >= 1
        assert all(X.M == 10 for X in cubes)
        assert f"{len(cubes)} cubes" in result.output

    def test_missing_envelope_file_fails_before_work(self, runner, tmp_path):
        result = runner.invoke(
            main,
            ["cover", "--alpha-lo", "1.899", "--alpha-hi", "1.900",
             "--envelope", str(tmp_path / "absent.txt"),
             "--out", str(tmp_path / "cover.txt")],
        )
        assert result.exit_code != 0


class TestSearch:
    def test_writes_the_three_collections(self, search_run):
        assert len(read_cubes(os.path.join(search_run, "A.txt"))) == 1
        assert len(read_cubes(os.path.join(search_run, "B.txt"))) == 0
        assert len(read_cubes(os.path.join(search_run, "R.txt"))) == 0

    def test_echoes_counts_and_stats(self, runner, certified_cover, tmp_path):
        result = runner.invoke(
            main, ["search", "--cover", certified_cover,
                   "--out-dir", str(tmp_path)]
        )
        assert result.exit_code == 0, result.output
        assert "1 certified" in result.output
        assert "pops" in result.output

    def test_checkpoint_directory_is_populated(self, runner, certified_cover,
                                               tmp_path):
        ckpt = tmp_path / "ckpt"
        result = runner.invoke(
            main, ["search", "--cover", certified_cover,
                   "--out-dir", str(tmp_path / "out"),
                   "--checkpoint-dir", str(ckpt),
                   "--checkpoint-interval", "1"],
        )
        assert result.exit_code == 0, result.output
        for name in ("queue.txt", "A.txt", "B.txt", "R.txt"):
            assert (ckpt / name).exists()

    def test_bad_weights_flag_is_a_clean_error(self, runner, certified_cover,
                                               tmp_path):
        result = runner.invoke(
            main, ["search", "--cover", certified_cover,
                   "--out-dir", str(tmp_path), "--weights", "8,oops"],
        )
        assert result.exit_code != 0
        assert "weight" in result.output


class TestRecombine:
    def test_success_exits_zero_and_prints_unions(self, runner, search_run,
                                                  tmp_path):
        result = runner.invoke(
            main, ["recombine", "--search-dir", search_run,
                   "--out-dir", str(tmp_path)]
        )
        assert result.exit_code == 0, result.output
        assert "status: SUCCESS" in result.output
        assert "alpha_union_A: [1.89995, 1.90005]" in result.output
        assert "alpha_union_B: (empty)" in result.output
        assert len(read_cubes(str(tmp_path / "A.txt"))) == 1

    def test_failure_exits_one(self, runner, tmp_path):
        X = sops_cube(1.89995, 1.90005, 10, 5e-4, 1.3)
        indir = tmp_path / "in"
        indir.mkdir()
        write_cubes(indir / "A.txt", CubeCollection([X]))
        write_cubes(indir / "B.txt", CubeCollection([X]))
        write_cubes(indir / "R.txt", CubeCollection())
        result = runner.invoke(
            main, ["recombine", "--search-dir", str(indir),
                   "--out-dir", str(tmp_path / "out")]
        )
        assert result.exit_code == 1
        assert "status: FAILURE" in result.output


class TestKrawczyk:
    def test_reports_the_verdict(self, runner, certified_cover):
        result = runner.invoke(
            main, ["krawczyk", "--cubes", certified_cover, "--index", "0"]
        )
        assert result.exit_code == 0, result.output
        assert "verdict: Unique" in result.output
        assert "tail_bound: " in result.output

    def test_out_of_range_index_fails(self, runner, certified_cover):
        result = runner.invoke(
            main, ["krawczyk", "--cubes", certified_cover, "--index", "5"]
        )
        assert result.exit_code != 0
        assert "out of range" in result.output


class TestReportVerb:
    def test_counts_and_plot(self, runner, search_run, tmp_path):
        out = str(tmp_path / "plot.csv")
        result = runner.invoke(
            main, ["report", "--run-dir", search_run, "--out", out]
        )
        assert result.exit_code == 0, result.output
        assert "a_count: 1" in result.output
        assert "b_count: 0" in result.output
        assert os.path.exists(out)

    def test_default_plot_lands_in_the_run_directory(self, runner, tmp_path):
        write_cubes(tmp_path / "A.txt", CubeCollection())
        write_cubes(tmp_path / "B.txt", CubeCollection(
            [near_zero_cube(Interval(1.6, 1.7), Interval(1.5, 1.6))]))
        write_cubes(tmp_path / "R.txt", CubeCollection())
        result = runner.invoke(main, ["report", "--run-dir", str(tmp_path)])
        assert result.exit_code == 0, result.output
        assert (tmp_path / "plot.csv").exists()


class TestVerify:
    def test_config_file_drives_a_full_run(self, runner, certified_cover,
                                           tmp_path):
        cfg = {
            "alpha": [1.899, 1.900],
            "cover_path": certified_cover,
            "output_dir": str(tmp_path / "run"),
        }
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(cfg))
        result = runner.invoke(main, ["verify", "--config", str(cfg_path)])
        assert result.exit_code == 0, result.output
        assert "verdict: SUCCESS" in result.output
        assert "timings: " in result.output
        assert (tmp_path / "run" / "report.txt").exists()

    def test_flags_override_the_config_file(self, runner, certified_cover,
                                            tmp_path):
        cfg = {
            "alpha": [1.899, 1.900],
            "cover_path": certified_cover,
            "output_dir": str(tmp_path / "ignored"),
        }
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(cfg))
        result = runner.invoke(
            main, ["verify", "--config", str(cfg_path),
                   "--out-dir", str(tmp_path / "chosen")]
        )
        assert result.exit_code == 0, result.output
        assert (tmp_path / "chosen" / "report.txt").exists()
        assert not (tmp_path / "ignored").exists()

    def test_flags_alone_suffice(self, runner, certified_cover, tmp_path):
        result = runner.invoke(
            main, ["verify", "--alpha-lo", "1.899", "--alpha-hi", "1.900",
                   "--cover", certified_cover,
                   "--out-dir", str(tmp_path / "run")]
        )
        assert result.exit_code == 0, result.output
        assert "a_count: 1" in result.output

    def test_missing_window_is_a_clean_error(self, runner, certified_cover,
                                             tmp_path):
        result = runner.invoke(
            main, ["verify", "--cover", certified_cover,
                   "--out-dir", str(tmp_path)]
        )
        assert result.exit_code != 0
        assert "parameter window" in result.output

    def test_half_a_window_is_rejected(self, runner, certified_cover,
                                       tmp_path):
        result = runner.invoke(
            main, ["verify", "--alpha-lo", "1.899", "--cover", certified_cover,
                   "--out-dir", str(tmp_path)]
        )
        assert result.exit_code != 0
        assert "pair" in result.output

    def test_unknown_config_key_is_rejected(self, runner, tmp_path):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps({"alfa": [1.0, 2.0]}))
        result = runner.invoke(main, ["verify", "--config", str(cfg_path)])
        assert result.exit_code != 0
        assert "alfa" in result.output

    def test_malformed_json_is_rejected(self, runner, tmp_path):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text("{not json")
        result = runner.invoke(main, ["verify", "--config", str(cfg_path)])
        assert result.exit_code != 0

    def test_mismatched_m_exits_nonzero(self, runner, certified_cover,
                                        tmp_path):
        result = runner.invoke(
            main, ["verify", "--alpha-lo", "1.899", "--alpha-hi", "1.900",
                   "--cover", certified_cover, "--m", "12",
                   "--out-dir", str(tmp_path)]
        )
        assert result.exit_code != 0
        assert "M=12" in result.output
