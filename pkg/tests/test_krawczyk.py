"""Tests for the preconditioner, the outer Krawczyk image, and its verdicts."""

import math

import numpy as np
import pytest

import wrightcert.interval as iv
from cubefixtures import sops_cube
from oracles import conv_all_fft, newton_sops, rotate, sample_tail_member, two_sided
from wrightcert.cubes import Cube
from wrightcert.errors import ArgumentError, SingularMidpoint
from wrightcert.functional import CenterPoint, center_of, eval_DF_M, tail_bounds
from wrightcert.interval import ComplexInterval, Interval, IntervalMatrix
from wrightcert.krawczyk import (
    KrawczykImage,
    Preconditioner,
    _assemble_finite_block,
    _classify,
    _identity_minus_product,
    build_preconditioner,
    check_theorem_conditions,
    krawczyk_outer,
)


@pytest.fixture(scope="module")
def stable_case():
    """Verified setup in the stable regime: box around the oracle solution.

    The half-widths here are chosen so that a single evaluation certifies
    uniqueness.  Over a wider alpha interval the image of the parameter
    spread alone fills most of the box and only iterated refinement
    concludes; see test_iterated_intersection_reaches_unique.
    """
    X = sops_cube(1.89995, 1.90005, M=10, half=5e-4, C0=1.3)
    xbar = center_of(X)
    T = tail_bounds(X, xbar)
    P = build_preconditioner(xbar, 10)
    K = krawczyk_outer(X, xbar, P, T)
    return X, xbar, T, P, K


class TestPreconditioner:
    def test_zero_center_block_structure(self):
        M = 4
        point = Cube(
            alpha=Interval(2.0),
            omega=Interval(2.0),
            coeffs=[ComplexInterval.zero()] * M,
            tail_C0=0.0,
            decay_s=3.0,
        )
        A = eval_DF_M(point).mid_array()
        expected = np.zeros((2 * M, 2 * M))
        for k in range(1, M + 1):
            re = math.cos(2.0 * k)
            im = k - math.sin(2.0 * k)
            r = 2 * (k - 1)
            ca = 1 if k == 1 else 2 * k - 2
            expected[r, ca] = re
            expected[r + 1, ca] = im
            if k >= 2:
                cb = 2 * k - 1
                expected[r, cb] = -im
                expected[r + 1, cb] = re
        assert np.max(np.abs(A - expected)) < 1e-12

    def test_zero_center_is_singular(self):
        xbar = CenterPoint(2.0, 2.0, [0j] * 4)
        with pytest.raises(SingularMidpoint):
            build_preconditioner(xbar, 4)

    def test_near_bifurcation_is_singular(self):
        half_pi = math.pi / 2.0
        xbar = CenterPoint(half_pi, half_pi, [1e-320 + 0j, 0j, 0j, 0j, 0j])
        with pytest.raises(SingularMidpoint):
            build_preconditioner(xbar, 5)

    def test_residual_at_oracle_center(self):
        omega, c = newton_sops(1.9, 10)
        xbar = CenterPoint(1.9, omega, list(c))
        P = build_preconditioner(xbar, 10)
        assert P.M == 10
        assert P.residual < 1e-10
        assert np.max(np.abs(P.A_M_dagger @ P.A_M - np.eye(20))) < 1e-10

    def test_validation(self):
        omega, c = newton_sops(1.9, 6)
        xbar = CenterPoint(1.9, omega, list(c))
        with pytest.raises(ArgumentError):
            build_preconditioner(xbar, 5)
        with pytest.raises(ArgumentError):
            build_preconditioner(xbar, 0)
        with pytest.raises(ArgumentError):
            build_preconditioner(xbar, True)
        P = build_preconditioner(xbar, 6)
        with pytest.raises(AttributeError):
            P.residual = 0.0
        with pytest.raises(ArgumentError):
            Preconditioner(P.A_M[:11, :11], P.A_M_dagger[:11, :11], omega, 1.9)
        with pytest.raises(ArgumentError):
            Preconditioner(P.A_M, P.A_M_dagger[:6, :6], omega, 1.9)
        with pytest.raises(ArgumentError):
            Preconditioner(P.A_M * math.inf, P.A_M_dagger, omega, 1.9)


class TestKrawczykImage:
    def test_validation(self):
        good = [Interval(0.0, 1.0)] * 4
        img = KrawczykImage(good, 0.5, "Inconclusive", -1.0)
        assert img.M == 2
        with pytest.raises(AttributeError):
            img.g_inf = 0.0
        with pytest.raises(ArgumentError):
            KrawczykImage(good[:3], 0.5, "Unique", 1.0)
        with pytest.raises(ArgumentError):
            KrawczykImage(good, -0.5, "Unique", 1.0)
        with pytest.raises(ArgumentError):
            KrawczykImage(good, 0.5, "Maybe", 1.0)
        with pytest.raises(ArgumentError):
            KrawczykImage(good, 0.5, "Unique", math.nan)
        with pytest.raises(ArgumentError):
            KrawczykImage([iv.EMPTY] * 4, 0.5, "Unique", 1.0)


class TestAffineAssembly:
    """The assembly run on an affine map, where exactness is checkable."""

    def setup_affine(self, seed, n=4):
        rng = np.random.default_rng(seed)
        B = np.eye(n) + 0.3 * rng.standard_normal((n, n))
        root = rng.uniform(-0.5, 0.5, size=n)
        d = -B @ root
        return B, root, d

    def residual_enclosure(self, B, d, x):
        out = []
        for i in range(B.shape[0]):
            acc = Interval(float(d[i]))
            for j in range(B.shape[1]):
                acc = iv.add(acc, iv.mul(Interval(float(B[i, j])), Interval(float(x[j]))))
            out.append(acc)
        return out

    def test_collapses_to_root(self):
        for seed in range(5):
            B, root, d = self.setup_affine(seed)
            n = len(root)
            rng = np.random.default_rng(seed + 100)
            xbar = root + rng.uniform(-0.01, 0.01, size=n)
            widths = rng.uniform(0.05, 0.2, size=n)
            box = [Interval(root[i] - widths[i], root[i] + widths[i]) for i in range(n)]
            Ad = np.linalg.inv(B)
            block, KM, margin, interior = _assemble_finite_block(
                list(xbar),
                box,
                B,
                Ad,
                IntervalMatrix.from_point(B),
                self.residual_enclosure(B, d, xbar),
                [0.0] * n,
            )
            res_norm = max(
                sum(entry.mag() for entry in row)
                for row in _identity_minus_product(Ad, B).data
            )
            h_mag = max(
                max(abs(box[i].lo - xbar[i]), abs(box[i].hi - xbar[i])) for i in range(n)
            )
            ad_norm = float(np.max(np.sum(np.abs(Ad), axis=1)))
            for i in range(n):
                assert KM[i].contains(root[i])
                assert KM[i].width() <= n * res_norm * h_mag + 8.0 * ad_norm * 1e-15 + 1e-13
            assert interior
            assert margin > 0.0
            assert _classify(box, KM, 0.0, 1.0, interior) == "Unique"

    def test_exact_center_gives_degenerate_image(self):
        B, root, d = self.setup_affine(7)
        n = len(root)
        box = [Interval(root[i] - 0.1, root[i] + 0.1) for i in range(n)]
        _, KM, _, _ = _assemble_finite_block(
            list(root),
            box,
            B,
            np.linalg.inv(B),
            IntervalMatrix.from_point(B),
            self.residual_enclosure(B, d, root),
            [0.0] * n,
        )
        for i in range(n):
            assert KM[i].contains(root[i])
            assert KM[i].width() <= 1e-12

    def test_root_outside_box_is_excluded(self):
        B, root, d = self.setup_affine(11)
        n = len(root)
        shift = 1.0
        xbar = root + shift
        box = [Interval(xbar[i] - 0.1, xbar[i] + 0.1) for i in range(n)]
        _, KM, _, interior = _assemble_finite_block(
            list(xbar),
            box,
            B,
            np.linalg.inv(B),
            IntervalMatrix.from_point(B),
            self.residual_enclosure(B, d, xbar),
            [0.0] * n,
        )
        assert _classify(box, KM, 0.0, 1.0, interior) == "Excluded"

    def test_symmetric_defect_term_widens(self):
        B, root, d = self.setup_affine(13)
        n = len(root)
        box = [Interval(root[i] - 0.1, root[i] + 0.1) for i in range(n)]
        g = [1e-3] * n
        _, KM, _, _ = _assemble_finite_block(
            list(root),
            box,
            B,
            np.linalg.inv(B),
            IntervalMatrix.from_point(B),
            self.residual_enclosure(B, d, root),
            g,
        )
        ad_row_min = float(np.min(np.sum(np.abs(np.linalg.inv(B)), axis=1)))
        for i in range(n):
            assert KM[i].width() >= 2e-3 * ad_row_min

    def test_shape_validation(self):
        B, root, d = self.setup_affine(17)
        with pytest.raises(ArgumentError):
            _assemble_finite_block(
                list(root)[:3],
                [Interval(0.0, 1.0)] * 4,
                B,
                np.linalg.inv(B),
                IntervalMatrix.from_point(B),
                self.residual_enclosure(B, d, root),
                [0.0] * 4,
            )


class TestKrawczykOuter:
    def test_unique_in_stable_regime(self, stable_case):
        X, xbar, T, P, K = stable_case
        assert K.verdict == "Unique"
        assert K.contraction_margin > 0.0
        assert K.g_inf < X.tail_C0
        box = X.finite_vector()
        for i in range(20):
            assert box[i].encloses(K.KM[i])

    def test_verdict_matches_condition_check(self, stable_case):
        X, xbar, T, P, K = stable_case
        assert check_theorem_conditions(X, K, T) == K.verdict

    def test_center_far_from_zero_is_excluded(self):
        X = sops_cube(1.8995, 1.9005, M=10, half=1e-3, C0=2.0)
        shifted = [
            ComplexInterval(iv.add(X.coeffs[0].re, Interval(0.3)), X.coeffs[0].im)
        ] + list(X.coeffs[1:])
        X = X.replace(coeffs=shifted)
        xbar = center_of(X)
        T = tail_bounds(X, xbar)
        P = build_preconditioner(xbar, 10)
        K = krawczyk_outer(X, xbar, P, T)
        assert K.verdict == "Excluded"
        assert check_theorem_conditions(X, K, T) == "Excluded"

    def test_shrinking_never_flips_to_excluded(self, stable_case):
        # The symmetric defect term does not shrink with the box, so very
        # small boxes go inconclusive rather than unique.  What must never
        # happen is exclusion: the oracle root stays inside every one.
        for factor in (0.5, 0.2):
            X = sops_cube(
                1.9 - 5e-5 * factor,
                1.9 + 5e-5 * factor,
                M=10,
                half=5e-4 * factor,
                C0=1.3,
            )
            xbar = center_of(X)
            T = tail_bounds(X, xbar)
            P = build_preconditioner(xbar, 10)
            K = krawczyk_outer(X, xbar, P, T)
            assert K.verdict != "Excluded"

    def test_iterated_intersection_reaches_unique(self):
        # Over a parameter interval of width 1e-3, the image of the spread
        # of roots across alpha fills most of a 1e-3 box and one shot is
        # inconclusive.  Intersecting with the image and lowering the tail
        # radius to the certified one contracts to a unique verdict.
        X = sops_cube(1.899, 1.900, M=10, half=1e-3, C0=2.0)
        verdict = None
        for _ in range(6):
            xbar = center_of(X)
            T = tail_bounds(X, xbar)
            P = build_preconditioner(xbar, 10)
            K = krawczyk_outer(X, xbar, P, T)
            verdict = K.verdict
            if verdict != "Inconclusive":
                break
            assert K.g_inf < X.tail_C0
            box = X.finite_vector()
            clipped = [iv.intersect(b, km) for b, km in zip(box, K.KM)]
            assert not any(entry.is_empty for entry in clipped)
            X = X.with_finite_vector(clipped).replace(
                tail_C0=min(X.tail_C0, K.g_inf)
            )
        assert verdict == "Unique"

    def test_theorem_condition_boundaries(self, stable_case):
        X, xbar, T, P, K = stable_case
        at_limit = KrawczykImage(K.KM, X.tail_C0, K.verdict, K.contraction_margin)
        assert check_theorem_conditions(X, at_limit, T) == "Inconclusive"
        no_margin = KrawczykImage(K.KM, K.g_inf, K.verdict, 0.0)
        assert check_theorem_conditions(X, no_margin, T) == "Inconclusive"

    def test_validation(self, stable_case):
        X, xbar, T, P, K = stable_case
        loose = X.replace(phase_fixed=False)
        with pytest.raises(ArgumentError):
            krawczyk_outer(loose, xbar, P, T)
        with pytest.raises(ArgumentError):
            krawczyk_outer(X.replace(alpha=None), xbar, P, T)
        outside = CenterPoint(xbar.alpha_bar, xbar.omega_bar + 1.0, list(xbar.c_bar))
        with pytest.raises(ArgumentError):
            krawczyk_outer(X, outside, P, T)
        omega6, c6 = newton_sops(1.9, 6)
        small = CenterPoint(1.9, omega6, list(c6))
        with pytest.raises(ArgumentError):
            krawczyk_outer(X, small, P, T)
        with pytest.raises(ArgumentError):
            check_theorem_conditions(X, KrawczykImage(K.KM[:12], 0.0, "Unique", 1.0), T)


class TestOuterContainment:
    """Sampled Newton-like images land inside the computed enclosure."""

    def test_sampled_images_contained(self, stable_case):
        X, xbar, T, P, K = stable_case
        rng = np.random.default_rng(20240817)
        J = 2000
        k_hi = 60
        M = X.M
        s = X.decay_s
        C0 = X.tail_C0
        Ad = P.A_M_dagger
        ratio = xbar.alpha_bar / xbar.omega_bar
        boxes = [(c.re.lo, c.re.hi, c.im.lo, c.im.hi) for c in X.coeffs]
        ks = np.arange(1, k_hi + 1)
        rem = 2.0 * C0 * C0 * (J - ks) ** (1.0 - 2.0 * s) / (2.0 * s - 1.0)
        box = X.finite_vector()
        for _ in range(100):
            alpha = rng.uniform(X.alpha.lo, X.alpha.hi)
            omega = rng.uniform(X.omega.lo, X.omega.hi)
            c = sample_tail_member(rng, boxes, C0, s, J)
            full = two_sided(c, J)
            quad = conv_all_fft(rotate(full, omega, J), full, J, k_hi)
            lin = (1j * (omega / alpha) * ks + np.exp(-1j * omega * ks)) * c[:k_hi]
            F = lin + quad

            rows = np.empty(2 * M)
            rows[0::2] = F[:M].real
            rows[1::2] = F[:M].imag
            step = Ad @ rows
            coords = np.empty(2 * M)
            coords[0] = omega
            coords[1] = c[0].real
            coords[2::2] = c[1:M].real
            coords[3::2] = c[1:M].imag
            image = coords - step
            row_rem = np.repeat(rem[:M], 2)
            slack = np.abs(Ad) @ row_rem + 1e-9
            for i in range(2 * M):
                assert K.KM[i].lo - slack[i] <= image[i] <= K.KM[i].hi + slack[i], (
                    f"finite coordinate {i} escaped the enclosure"
                )

            for k in range(M + 1, k_hi + 1):
                value = abs(c[k - 1] + 1j * ratio * F[k - 1] / k)
                bound = K.g_inf / k**s + ratio * rem[k - 1] / k + 1e-12
                assert value <= bound, f"tail mode {k} escaped the enclosure"
