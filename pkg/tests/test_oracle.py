"""Tests for the floating-point branch solver and the fixture generator."""

import math

import numpy as np
import pytest

from oracles import f_modes, newton_sops, trig_curve
from wrightcert.envelopes import EnvelopeSet
from wrightcert.errors import ArgumentError
from wrightcert.interval import Interval
from wrightcert.oracle import fixture_envelopes, oracle_solve_sops
from wrightcert.seed_cover import build_cover

HALF_PI = 0.5 * math.pi


class TestOracleSolve:
    def test_matches_the_independent_solver(self):
        omega, c = oracle_solve_sops(1.9, 10)
        ref_omega, ref_c = newton_sops(1.9, 10)
        assert abs(omega - ref_omega) < 1e-10
        assert float(np.max(np.abs(c - ref_c))) < 1e-10

    @pytest.mark.parametrize("alpha,M", [(1.9, 10), (1.7, 8), (1.62, 6)])
    def test_residual_under_independent_evaluation(self, alpha, M):
        omega, c = oracle_solve_sops(alpha, M)
        residual = float(np.max(np.abs(f_modes(alpha, omega, c, M, M))))
        assert residual < 1e-12

    @pytest.mark.parametrize("gap", [0.01, 0.002])
    def test_small_amplitude_scaling_near_the_bifurcation(self, gap):
        omega, c = oracle_solve_sops(HALF_PI + gap, 6)
        assert abs(omega - HALF_PI) < 0.02
        ratio = c[0].real / math.sqrt(gap)
        assert 0.8 < ratio < 1.4
        # higher modes are higher order in the amplitude
        assert abs(c[1]) < 0.2 * c[0].real

    def test_phase_normalization(self):
        omega, c = oracle_solve_sops(1.85, 8)
        assert omega > 0.0
        assert c[0].imag == 0.0
        assert c[0].real > 0.0

    def test_rejects_parameters_off_the_branch(self):
        with pytest.raises(ArgumentError):
            oracle_solve_sops(HALF_PI, 6)
        with pytest.raises(ArgumentError):
            oracle_solve_sops(HALF_PI + 1e-3, 6)
        with pytest.raises(ArgumentError):
            oracle_solve_sops(1.9, 0)
        with pytest.raises(ArgumentError):
            oracle_solve_sops(1.9, True)


class TestFixtureEnvelopes:
    def test_order_zero_covers_the_sampled_truth(self):
        env = fixture_envelopes(Interval(1.88, 1.89), 8, 3, n_time=128)
        assert isinstance(env, EnvelopeSet)
        assert env.provenance == "FIXTURE"
        assert env.S == 3
        h = env.period.hi / env.n_time
        for a in (1.88, 1.8845, 1.89):
            omega, c = oracle_solve_sops(a, 8)
            assert env.period.contains(2.0 * math.pi / omega)
            y = trig_curve(omega, c)
            for j in range(env.n_time):
                t = (j + 0.5) * h
                cell = env[0].cell(j)
                assert cell.lo <= float(y(np.array(t))) <= cell.hi

    def test_first_order_obeys_the_delay_equation(self):
        a = 1.885
        env = fixture_envelopes(Interval(a, a), 8, 2, n_time=128, n_alpha=1)
        omega, c = oracle_solve_sops(a, 8)
        y = trig_curve(omega, c)
        h = env.period.hi / env.n_time
        for j in range(env.n_time):
            t = (j + 0.5) * h
            if t < 1.0:
                continue
            truth = -a * float(y(np.array(t - 1.0))) * (1.0 + float(y(np.array(t))))
            cell = env[1].cell(j)
            assert cell.lo <= truth <= cell.hi

    def test_branch_cover_contains_the_curve(self):
        slices = [
            Interval(1.8 + 0.025 * i, 1.8 + 0.025 * (i + 1)) for i in range(4)
        ]
        family = [
            fixture_envelopes(s, 10, 3, n_time=256, margin=0.02) for s in slices
        ]
        cover = build_cover(Interval(1.8, 1.9), 10, 3, 4, family)
        assert 0 < len(cover) <= 16
        for i in range(50):
            a = min(1.8 + 0.1 * i / 49, 1.9)
            omega, c = oracle_solve_sops(a, 10)
            assert any(
                X.alpha.contains(a)
                and X.omega.contains(omega)
                and all(
                    X.coeffs[k].re.contains(c[k].real)
                    and X.coeffs[k].im.contains(c[k].imag)
                    for k in range(10)
                )
                for X in cover
            )

    def test_rejects_bad_arguments(self):
        good = Interval(1.88, 1.89)
        with pytest.raises(ArgumentError):
            fixture_envelopes(Interval(2.0, 1.0), 8, 3)
        with pytest.raises(ArgumentError):
            fixture_envelopes(good, 8, 0)
        with pytest.raises(ArgumentError):
            fixture_envelopes(good, 8, 3, n_alpha=0)
        with pytest.raises(ArgumentError):
            fixture_envelopes(good, 8, 3, n_time=1)
        with pytest.raises(ArgumentError):
            fixture_envelopes(good, 8, 3, margin=0.0)
        with pytest.raises(ArgumentError):
            fixture_envelopes(Interval(1.0, 1.2), 8, 3)
