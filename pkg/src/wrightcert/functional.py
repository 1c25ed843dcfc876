"""Rigorous evaluation of the truncated functional and its tail estimates.

The zero problem under study acts on Fourier coefficients of a periodic
solution: component k of the map is

    (i (omega/alpha) k + e^{-i omega k}) c_k
        + sum_{j=1}^{k-1} e^{-i omega j} c_j c_{k-j}
        + sum_{j>=1} (e^{-i omega (j+k)} + e^{i omega j}) c_j^* c_{j+k},

with the last sum truncated at j = M - k for the Galerkin part.  This module
evaluates the first M components over a cube with directed rounding, builds
the 2M x 2M interval Jacobian with respect to (omega, a_1, a_2, b_2, ...),
and computes the eight tail constants that dominate everything the
truncation discards.
"""

from __future__ import annotations

import math

from . import interval as iv
from .cubes import Cube, abs_sup, convolve_truncated, gamma_constant
from .errors import ArgumentError, HypothesisViolation
from .interval import ComplexInterval, Interval, IntervalMatrix

__all__ = [
    "CenterPoint",
    "TailBounds",
    "center_of",
    "eval_F_M",
    "eval_DF_M",
    "h_bound",
    "tail_bounds",
    "rescale_rapid_to_slow",
]


class CenterPoint:
    """A point (alpha, omega, c) with zero tail, used to anchor tail bounds.

    The coefficient list carries modes 1..M only; every mode beyond M is
    implicitly zero, so the point equals its own finite projection.
    """

    __slots__ = ("alpha_bar", "omega_bar", "c_bar")

    def __init__(self, alpha_bar: float, omega_bar: float, c_bar):
        alpha_bar = float(alpha_bar)
        omega_bar = float(omega_bar)
        c_bar = tuple(complex(z) for z in c_bar)
        if not (math.isfinite(alpha_bar) and math.isfinite(omega_bar)):
            raise ArgumentError("center point scalars must be finite")
        if len(c_bar) < 1:
            raise ArgumentError("center point needs at least one mode")
        for z in c_bar:
            if not (math.isfinite(z.real) and math.isfinite(z.imag)):
                raise ArgumentError("center point coefficients must be finite")
        object.__setattr__(self, "alpha_bar", alpha_bar)
        object.__setattr__(self, "omega_bar", omega_bar)
        object.__setattr__(self, "c_bar", c_bar)

    def __setattr__(self, name, value):
        raise AttributeError("CenterPoint is immutable")

    @property
    def M(self) -> int:
        return len(self.c_bar)

    def __repr__(self) -> str:
        return (
            f"CenterPoint(alpha_bar={self.alpha_bar!r}, "
            f"omega_bar={self.omega_bar!r}, M={self.M})"
        )


def center_of(X: Cube) -> CenterPoint:
    """Midpoint of a cube as a CenterPoint; every field lies inside X."""
    if X.alpha is None:
        raise ArgumentError("center point requires an alpha interval")
    return CenterPoint(
        X.alpha.mid(), X.omega.mid(), [c.mid() for c in X.coeffs]
    )


def _linear_factor(ratio: Interval, ek: ComplexInterval, k: int) -> ComplexInterval:
    """Enclosure of i (omega/alpha) k + e^{-i omega k} from precomputed parts."""
    return ComplexInterval(
        ek.re, iv.add(iv.mul(ratio, Interval(float(k))), ek.im)
    )


def _exp_table(omega: Interval, count: int) -> list[ComplexInterval]:
    """Enclosures of e^{-i omega m} for m = 0..count; index 0 is exactly 1."""
    table = [ComplexInterval(Interval(1.0), Interval(0.0))]
    for m in range(1, count + 1):
        table.append(iv.complex_exp_neg(iv.mul(omega, Interval(float(m)))))
    return table


def eval_F_M(X: Cube) -> list[ComplexInterval]:
    """Enclosures of components 1..M of the truncated map over the cube.

    The parameter alpha enters only through the ratio omega/alpha, which is
    evaluated once so the quotient interval is shared by every component.
    """
    if X.alpha is None:
        raise ArgumentError("evaluation requires an alpha interval")
    ratio = iv.div(X.omega, X.alpha)
    coeffs = list(X.coeffs)
    quad = convolve_truncated(coeffs, coeffs, X.omega)
    E = _exp_table(X.omega, X.M)
    out = []
    for k in range(1, X.M + 1):
        lin = _linear_factor(ratio, E[k], k)
        out.append(lin * coeffs[k - 1] + quad[k - 1])
    return out


def eval_DF_M(X: Cube) -> IntervalMatrix:
    """Interval Jacobian of the truncated map over the cube.

    Columns are ordered (omega, a_1, a_2, b_2, ..., a_M, b_M); there is no
    b_1 column because the phase-fixed coordinate is frozen.  Rows 2k-2 and
    2k-1 carry the real and imaginary parts of component k.  The quadratic
    sums follow the same j = M - k truncation as eval_F_M, so this is the
    exact derivative of the truncated map, not a truncation of the exact
    derivative.
    """
    if X.alpha is None:
        raise ArgumentError("evaluation requires an alpha interval")
    M = X.M
    ratio = iv.div(X.omega, X.alpha)
    inv_alpha = iv.div(Interval(1.0), X.alpha)
    c = X.coeffs
    E = _exp_table(X.omega, M)
    zero = ComplexInterval.zero()

    entries: list[list[Interval | None]] = [[None] * (2 * M) for _ in range(2 * M)]

    def put(row_pair: int, col: int, value: ComplexInterval) -> None:
        entries[2 * row_pair][col] = value.re
        entries[2 * row_pair + 1][col] = value.im

    for k in range(1, M + 1):
        # Frequency column: i k (1/alpha - e^{-i omega k}) c_k minus the
        # index-weighted quadratic sums.
        head = ComplexInterval(iv.sub(inv_alpha, E[k].re), iv.neg(E[k].im))
        dw = (head * c[k - 1]).mul_i().scale(float(k))
        for j in range(1, k):
            dw = dw - (E[j] * c[j - 1] * c[k - j - 1]).mul_i().scale(float(j))
        for j in range(1, M - k + 1):
            g = E[j + k].scale(float(j + k)) - E[j].conj().scale(float(j))
            dw = dw - (g * c[j - 1].conj() * c[j + k - 1]).mul_i()
        put(k - 1, 0, dw)

        lin = _linear_factor(ratio, E[k], k)
        for n in range(1, M + 1):
            if n + k <= M:
                t1 = (E[n + k] + E[n].conj()) * c[n + k - 1]
            else:
                t1 = zero
            if n < k:
                t2 = (E[n] + E[k - n]) * c[k - n - 1]
            elif n == k:
                t2 = zero
            else:
                t2 = (E[n] + E[n - k].conj()) * c[n - k - 1].conj()
            delta = lin if n == k else zero
            col_a = 1 if n == 1 else 2 * n - 2
            put(k - 1, col_a, delta + t1 + t2)
            if n >= 2:
                put(k - 1, 2 * n - 1, (delta - t1 + t2).mul_i())

    return IntervalMatrix(entries)


def _require_tail_hypotheses(X: Cube) -> None:
    if X.M < 5:
        raise HypothesisViolation("tail estimates require at least 5 modes")
    if not X.decay_s > 2.0:
        raise HypothesisViolation("tail estimates require decay exponent > 2")


def h_bound(X: Cube) -> list[float]:
    """Componentwise upper bounds on the discarded part of the map itself.

    Entry k dominates sup over the cube of the modulus of everything that
    the j = M - k truncation dropped from component k:

        2 C0^2 / ((s-1) M^{s-1} (M+k+1)^s)
            + 2 C0 sum_{j=M-k+1}^{M} |X|_j / (j+k)^s.
    """
    _require_tail_hypotheses(X)
    M = X.M
    s = X.decay_s
    c0 = Interval(X.tail_C0)
    two_c0 = iv.mul(Interval(2.0), c0)
    s_minus_1 = iv.sub(Interval(s), Interval(1.0))
    lead_num = iv.mul(two_c0, c0)
    m_pow = iv.ipow(Interval(float(M)), s - 1.0)
    out = []
    for k in range(1, M + 1):
        den = iv.mul(
            iv.mul(s_minus_1, m_pow),
            iv.ipow(Interval(float(M + k + 1)), s),
        )
        acc = iv.div(lead_num, den)
        for j in range(M - k + 1, M + 1):
            ratio = iv.div(
                Interval(abs_sup(X, j)), iv.ipow(Interval(float(j + k)), s)
            )
            acc = iv.add(acc, iv.mul(two_c0, ratio))
        out.append(acc.hi)
    return out


class TailBounds:
    """The eight tail constants attached to a cube and a center point.

    h, gMi, and gMii are componentwise bounds for modes 1..M; the three
    gInf scalars control modes beyond M; C1 dominates the coefficient norm
    over the cube and delta_omega the frequency deviation from the center.
    """

    __slots__ = (
        "h",
        "gMi",
        "gMii",
        "gInf_i",
        "gInf_iia",
        "gInf_iib",
        "C1",
        "delta_omega",
    )

    def __init__(self, h, gMi, gMii, gInf_i, gInf_iia, gInf_iib, C1, delta_omega):
        h = tuple(float(v) for v in h)
        gMi = tuple(float(v) for v in gMi)
        gMii = tuple(float(v) for v in gMii)
        scalars = {
            "gInf_i": float(gInf_i),
            "gInf_iia": float(gInf_iia),
            "gInf_iib": float(gInf_iib),
            "C1": float(C1),
            "delta_omega": float(delta_omega),
        }
        if not (len(h) == len(gMi) == len(gMii)):
            raise ArgumentError("tail bound arrays must share one length")
        for arr in (h, gMi, gMii):
            for v in arr:
                if not (v >= 0.0 and math.isfinite(v)):
                    raise ArgumentError("tail bounds must be finite and nonnegative")
        for name, v in scalars.items():
            if not (v >= 0.0 and math.isfinite(v)):
                raise ArgumentError(f"{name} must be finite and nonnegative")
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "gMi", gMi)
        object.__setattr__(self, "gMii", gMii)
        for name, v in scalars.items():
            object.__setattr__(self, name, v)

    def __setattr__(self, name, value):
        raise AttributeError("TailBounds is immutable")

    def __repr__(self) -> str:
        return (
            f"TailBounds(M={len(self.h)}, gInf_i={self.gInf_i!r}, "
            f"gInf_iia={self.gInf_iia!r}, gInf_iib={self.gInf_iib!r}, "
            f"C1={self.C1!r}, delta_omega={self.delta_omega!r})"
        )


def _point_modulus(z: complex) -> Interval:
    """Enclosure of |z| for a point complex value."""
    return iv.sqrt(
        iv.add(iv.sqr(Interval(z.real)), iv.sqr(Interval(z.imag)))
    )


def tail_bounds(X: Cube, xbar: CenterPoint) -> TailBounds:
    """All tail constants for a cube around a zero-tail center point.

    Requires M >= 5 and s > 2; everything is evaluated with outward
    rounding so each returned value dominates its exact counterpart.
    """
    _require_tail_hypotheses(X)
    if xbar.M != X.M:
        raise ArgumentError("center point and cube disagree on mode count")
    M = X.M
    s = X.decay_s
    C0 = X.tail_C0
    c0 = Interval(C0)
    two = Interval(2.0)
    s_minus_1 = iv.sub(Interval(s), Interval(1.0))
    s_minus_2 = iv.sub(Interval(s), Interval(2.0))
    m_iv = Interval(float(M))

    x_sup = [abs_sup(X, j) for j in range(1, M + 1)]
    h_sup = [
        (X.coeffs[j] - ComplexInterval.from_complex(xbar.c_bar[j])).modulus_upper()
        for j in range(M)
    ]
    delta_omega = iv.sub(X.omega, Interval(xbar.omega_bar)).mag()
    d_iv = Interval(delta_omega)

    c1 = C0
    for k in range(1, M + 1):
        cand = iv.mul(iv.ipow(Interval(float(k)), s), Interval(x_sup[k - 1])).hi
        if cand > c1:
            c1 = cand

    h = h_bound(X)

    g_mi = []
    g_mii = []
    c0_sq = iv.mul(c0, c0)
    m_pow_s1 = iv.ipow(m_iv, s - 1.0)
    m_pow_s2 = iv.ipow(m_iv, s - 2.0)
    for k in range(1, M + 1):
        mk1 = Interval(float(M + k + 1))
        mk1_s = iv.ipow(mk1, s)
        mk1_s1 = iv.ipow(mk1, s - 1.0)

        acc_i = Interval(0.0)
        acc_ii = Interval(0.0)
        for j in range(M - k + 1, M + 1):
            jk = Interval(float(j + k))
            acc_i = iv.add(
                acc_i,
                iv.div(Interval(x_sup[j - 1]), iv.ipow(jk, s - 1.0)),
            )
            # Both the cube radius and the centered radius enter here: the
            # defect pairs the direction's tail against the cube's finite
            # block (|X| factors) and the cube's tail against the
            # direction's finite block (|H| factors).
            acc_ii = iv.add(
                acc_ii,
                iv.div(
                    iv.add(Interval(x_sup[j - 1]), Interval(h_sup[j - 1])),
                    iv.ipow(jk, s),
                ),
            )
        gi = iv.mul(iv.mul(iv.mul(two, c0), d_iv), acc_i)
        gi = iv.add(
            gi,
            iv.div(iv.mul(c0_sq, d_iv), iv.mul(iv.mul(s_minus_2, mk1_s), m_pow_s2)),
        )
        gi = iv.add(
            gi,
            iv.div(iv.mul(c0_sq, d_iv), iv.mul(iv.mul(s_minus_1, mk1_s1), m_pow_s1)),
        )
        g_mi.append(gi.hi)

        gii = iv.div(
            iv.mul(Interval(4.0), c0_sq),
            iv.mul(iv.mul(s_minus_1, mk1_s), m_pow_s1),
        )
        gii = iv.add(gii, iv.mul(iv.mul(two, c0), acc_ii))
        g_mii.append(gii.hi)

    cbar_mod = [_point_modulus(z) for z in xbar.c_bar]
    g_inf_i = 0.0
    g_inf_iia_max = 0.0
    for k in range(M + 1, 2 * M + 1):
        k_pow = iv.ipow(Interval(float(k)), s)
        acc_bar = Interval(0.0)
        acc_hx = Interval(0.0)
        for j in range(k - M, M + 1):
            acc_bar = iv.add(acc_bar, iv.mul(cbar_mod[j - 1], cbar_mod[k - j - 1]))
            acc_hx = iv.add(
                acc_hx,
                iv.mul(Interval(h_sup[j - 1]), Interval(x_sup[k - j - 1])),
            )
        g_inf_i = max(g_inf_i, iv.mul(k_pow, acc_bar).hi)
        g_inf_iia_max = max(g_inf_iia_max, iv.mul(k_pow, acc_hx).hi)

    two_pow_s = iv.ipow(two, s)
    iia = Interval(g_inf_iia_max)
    iia = iv.add(
        iia,
        iv.div(
            iv.mul(iv.mul(two, c0_sq), iv.add(two_pow_s, Interval(1.0))),
            iv.mul(s_minus_1, m_pow_s1),
        ),
    )
    acc_mix = Interval(0.0)
    m1_iv = Interval(float(M + 1))
    for j in range(1, M + 1):
        grow = iv.ipow(iv.div(Interval(float(M + j + 1)), m1_iv), s)
        acc_mix = iv.add(
            acc_mix,
            iv.mul(
                iv.add(Interval(x_sup[j - 1]), Interval(h_sup[j - 1])),
                iv.add(grow, Interval(1.0)),
            ),
        )
    iia = iv.add(iia, iv.mul(c0, acc_mix))

    c1_iv = Interval(c1)
    gamma_next = Interval(gamma_constant(M + 1, s))
    iib = iv.div(iv.mul(iv.mul(c1_iv, c1_iv), gamma_next), two)
    bracket = iv.add(
        iv.div(s_minus_1, iv.mul(Interval(float(M + 2)), s_minus_2)),
        iv.div(Interval(s), s_minus_1),
    )
    iib = iv.add(iib, iv.mul(iv.mul(c0, c1_iv), bracket))

    return TailBounds(
        h=h,
        gMi=g_mi,
        gMii=g_mii,
        gInf_i=g_inf_i,
        gInf_iia=iia.hi,
        gInf_iib=iib.hi,
        C1=c1,
        delta_omega=delta_omega,
    )


def rescale_rapid_to_slow(alpha0: float, L0: float, N: int) -> tuple[float, float]:
    """Map a slowly oscillating solution to the parameter of its rapidly
    oscillating rescaling with lap number N.

    Requires N odd and the period window 2/N < L0 < 2/(N-1); the returned
    factor r = 1 - ((N-1)/2) L0 then satisfies 0 < r <= 1, and alpha1 is
    r * alpha0.
    """
    if not (isinstance(N, int) and not isinstance(N, bool) and N >= 1 and N % 2 == 1):
        raise ArgumentError("lap number must be an odd integer >= 1")
    alpha0 = float(alpha0)
    L0 = float(L0)
    if not L0 > 2.0 / N:
        raise ArgumentError(f"period {L0} not above 2/{N}")
    if N > 1 and not L0 < 2.0 / (N - 1):
        raise ArgumentError(f"period {L0} not below 2/{N - 1}")
    r = 1.0 - 0.5 * (N - 1) * L0
    if not 0.0 < r <= 1.0:
        raise ArgumentError("rescaling factor escaped (0, 1]")
    return r, r * alpha0
