"""Outer enclosure of the Krawczyk image of a cube, and its verdicts.

The Krawczyk map sends a cube toward the zeros of the oscillation functional.
Its exact image is not computable (the functional lives in a weighted
sequence space), but a computable superset is: a preconditioned interval
Newton step on the leading modes, padded by the analytic truncation defect
bounds, paired with a geometric ball for the discarded modes.  Containment
of that superset in the cube certifies exactly one zero per parameter value;
a coordinate disjoint from the cube certifies none.

The preconditioner is a plain floating-point matrix pair: an approximate
Jacobian at a center point and its approximate inverse.  Nothing about it
needs to be accurate.  Every use downstream wraps its entries in degenerate
intervals, so a poor preconditioner can only widen the enclosure and weaken
the verdict, never break containment.
"""

from __future__ import annotations

import math

import numpy as np

from . import interval as iv
from .cubes import Cube
from .errors import ArgumentError
from .functional import CenterPoint, TailBounds, eval_DF_M, eval_F_M
from .interval import (
    ComplexInterval,
    Interval,
    IntervalMatrix,
    approx_mid_inverse,
    point_matvec,
)

_VERDICTS = ("Unique", "Excluded", "Inconclusive")


class Preconditioner:
    """Approximate Jacobian at a center and its numerical inverse.

    ``A_M`` holds the 2M-by-2M point Jacobian of the truncated functional in
    the coordinates (omega, a_1, a_2, b_2, ..., a_M, b_M); ``A_M_dagger`` its
    floating-point inverse.  ``residual`` records the infinity norm of
    I - A_M_dagger @ A_M as a conditioning diagnostic.  The tail action of
    the preconditioner is a diagonal mode-by-mode scaling determined by
    ``alpha_bar`` and ``omega_bar``; it is applied analytically inside
    ``krawczyk_outer`` and never materialized.
    """

    __slots__ = ("A_M", "A_M_dagger", "omega_bar", "alpha_bar", "residual")

    def __init__(self, A_M, A_M_dagger, omega_bar: float, alpha_bar: float):
        A = np.array(A_M, dtype=float)
        Ad = np.array(A_M_dagger, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ArgumentError("A_M must be a square matrix")
        if Ad.shape != A.shape:
            raise ArgumentError("A_M_dagger must match the shape of A_M")
        n = A.shape[0]
        if n < 2 or n % 2 != 0:
            raise ArgumentError("preconditioner dimension must be a positive even number")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(Ad))):
            raise ArgumentError("preconditioner matrices must be finite")
        omega_bar = float(omega_bar)
        alpha_bar = float(alpha_bar)
        if not (math.isfinite(omega_bar) and math.isfinite(alpha_bar)):
            raise ArgumentError("center frequencies must be finite")
        residual = float(np.max(np.sum(np.abs(np.eye(n) - Ad @ A), axis=1)))
        A.setflags(write=False)
        Ad.setflags(write=False)
        object.__setattr__(self, "A_M", A)
        object.__setattr__(self, "A_M_dagger", Ad)
        object.__setattr__(self, "omega_bar", omega_bar)
        object.__setattr__(self, "alpha_bar", alpha_bar)
        object.__setattr__(self, "residual", residual)

    def __setattr__(self, name, value):
        raise AttributeError("Preconditioner is immutable")

    @property
    def M(self) -> int:
        return self.A_M.shape[0] // 2


class KrawczykImage:
    """Computable superset of the Krawczyk image, with the verdict attached.

    ``KM`` is the finite block: 2M intervals in the cube's own coordinate
    order.  ``g_inf`` is the radius parameter of the discarded-mode ball
    (mode k beyond the truncation is enclosed by |c_k| <= g_inf / k^s).
    ``contraction_margin`` is positive exactly when the shifted finite block
    passed the strict interiority test; when positive it equals the smallest
    endpoint gap to the cube boundary.
    """

    __slots__ = ("KM", "g_inf", "verdict", "contraction_margin")

    def __init__(self, KM, g_inf: float, verdict: str, contraction_margin: float):
        KM = tuple(KM)
        if len(KM) < 2 or len(KM) % 2 != 0:
            raise ArgumentError("finite block must have 2M coordinates")
        for entry in KM:
            if not isinstance(entry, Interval) or entry.is_empty:
                raise ArgumentError("finite block entries must be nonempty intervals")
        g_inf = float(g_inf)
        if not (math.isfinite(g_inf) and g_inf >= 0.0):
            raise ArgumentError("tail radius must be finite and nonnegative")
        if verdict not in _VERDICTS:
            raise ArgumentError(f"verdict must be one of {_VERDICTS}")
        contraction_margin = float(contraction_margin)
        if math.isnan(contraction_margin):
            raise ArgumentError("contraction margin must not be NaN")
        object.__setattr__(self, "KM", KM)
        object.__setattr__(self, "g_inf", g_inf)
        object.__setattr__(self, "verdict", verdict)
        object.__setattr__(self, "contraction_margin", contraction_margin)

    def __setattr__(self, name, value):
        raise AttributeError("KrawczykImage is immutable")

    @property
    def M(self) -> int:
        return len(self.KM) // 2


def _point_cube(xbar: CenterPoint) -> Cube:
    return Cube(
        alpha=Interval(xbar.alpha_bar),
        omega=Interval(xbar.omega_bar),
        coeffs=[ComplexInterval.from_complex(z) for z in xbar.c_bar],
        tail_C0=0.0,
        decay_s=3.0,
    )


def build_preconditioner(xbar: CenterPoint, M: int) -> Preconditioner:
    """Point Jacobian at the center and its approximate inverse.

    Raises SingularMidpoint (via the matrix inverse) when the midpoint
    Jacobian cannot be inverted; this happens for instance at a center with
    all coefficients zero, where the frequency column vanishes identically.
    """
    if not isinstance(M, int) or isinstance(M, bool) or M < 1:
        raise ArgumentError("M must be a positive integer")
    if xbar.M != M:
        raise ArgumentError(f"center has {xbar.M} modes, expected {M}")
    A = eval_DF_M(_point_cube(xbar)).mid_array()
    Ad = approx_mid_inverse(A)
    return Preconditioner(A, Ad, xbar.omega_bar, xbar.alpha_bar)


def _center_vector(xbar: CenterPoint) -> list[float]:
    vec = [xbar.omega_bar, xbar.c_bar[0].real]
    for z in xbar.c_bar[1:]:
        vec.append(z.real)
        vec.append(z.imag)
    return vec


def _identity_minus_product(Ad: np.ndarray, A: np.ndarray) -> IntervalMatrix:
    """Rigorous enclosure of I - Ad @ A from the two point matrices."""
    n = Ad.shape[0]
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = Interval(1.0) if i == j else Interval(0.0)
            for k in range(n):
                p = iv.mul(Interval(float(Ad[i, k])), Interval(float(A[k, j])))
                acc = iv.sub(acc, p)
            row.append(acc)
        rows.append(row)
    return IntervalMatrix(rows)


def _abs_matvec_bound(Ad: np.ndarray, g: list[float]) -> list[float]:
    """Upper bounds on sum_j |Ad[i,j]| g[j], rounded upward."""
    out = []
    for i in range(Ad.shape[0]):
        acc = Interval(0.0)
        for j in range(Ad.shape[1]):
            acc = iv.add(acc, iv.mul(Interval(abs(float(Ad[i, j]))), Interval(g[j])))
        out.append(acc.hi)
    return out


def _assemble_finite_block(
    xbar_vec: list[float],
    finite_box: list[Interval],
    A: np.ndarray,
    Ad: np.ndarray,
    DF: IntervalMatrix,
    fbar: list[Interval],
    g_rows: list[float],
) -> tuple[list[Interval], list[Interval], float, bool]:
    """Interval Newton block shared by the functional path and test harnesses.

    Returns (contraction_block, KM, margin, interior): the contraction block
    is the center plus the two derivative terms plus the symmetric defect
    term; KM subtracts the preconditioned residual at the center.  The
    interiority flag applies the strict test (one outward-rounding step of
    clearance per endpoint, ties failing) of the contraction block against
    ``finite_box``, and the margin is floored to zero whenever that test
    fails so that its sign alone carries the decision.
    """
    n = len(xbar_vec)
    if len(finite_box) != n or len(fbar) != n or len(g_rows) != n:
        raise ArgumentError("finite-block inputs disagree on dimension")
    if A.shape != (n, n) or Ad.shape != (n, n):
        raise ArgumentError("preconditioner dimension does not match the block")
    if DF.rows != n or DF.cols != n:
        raise ArgumentError("Jacobian enclosure dimension does not match the block")

    H = [iv.sub(finite_box[i], Interval(xbar_vec[i])) for i in range(n)]

    first_order = _identity_minus_product(Ad, A).matvec(H)
    slope = (IntervalMatrix.from_point(A) - DF).matvec(H)
    slope = point_matvec(Ad, slope)
    defect = _abs_matvec_bound(Ad, g_rows)
    newton = point_matvec(Ad, fbar)

    block = []
    KM = []
    for i in range(n):
        t = iv.add(Interval(xbar_vec[i]), iv.add(first_order[i], slope[i]))
        t = iv.add(t, Interval(-defect[i], defect[i]))
        block.append(t)
        KM.append(iv.sub(t, newton[i]))

    margin = math.inf
    interior = True
    for i in range(n):
        margin = min(margin, block[i].lo - finite_box[i].lo, finite_box[i].hi - block[i].hi)
        if not (
            block[i].lo >= math.nextafter(finite_box[i].lo, math.inf)
            and block[i].hi <= math.nextafter(finite_box[i].hi, -math.inf)
        ):
            interior = False
    if not interior:
        margin = min(margin, 0.0)
    return block, KM, margin, interior


def _classify(
    finite_box: list[Interval],
    KM,
    g_inf: float,
    C0: float,
    interior: bool,
) -> str:
    for i in range(len(finite_box)):
        if KM[i].hi < finite_box[i].lo or KM[i].lo > finite_box[i].hi:
            return "Excluded"
    contained = all(finite_box[i].encloses(KM[i]) for i in range(len(finite_box)))
    if contained and g_inf < C0 and interior:
        return "Unique"
    return "Inconclusive"


def _tail_radius(X: Cube, xbar: CenterPoint, T: TailBounds) -> float:
    """Upper bound on the radius parameter of the discarded-mode ball."""
    M = X.M
    C0 = Interval(X.tail_C0)
    ratio = iv.div(Interval(xbar.alpha_bar), Interval(xbar.omega_bar))
    per_mode = iv.div(ratio, Interval(float(M + 1)))

    leading = iv.mul(per_mode, Interval(T.gInf_i))
    quad = iv.mul(iv.mul(Interval(2.0), per_mode), Interval(T.gInf_iia))

    inv_alpha = iv.div(Interval(1.0), X.alpha)
    drift = iv.mul(
        iv.mul(Interval(T.delta_omega), ratio),
        iv.add(iv.mul(iv.add(inv_alpha, Interval(1.0)), C0), Interval(T.gInf_iib)),
    )

    detune = iv.sub(
        Interval(1.0),
        iv.div(
            iv.mul(Interval(xbar.alpha_bar), X.omega),
            iv.mul(X.alpha, Interval(xbar.omega_bar)),
        ),
    )
    linear = iv.mul(iv.add(Interval(detune.mag()), per_mode), C0)

    total = iv.add(iv.add(leading, quad), iv.add(drift, linear))
    return total.hi


def _check_compatible(X: Cube, xbar: CenterPoint, T: TailBounds) -> None:
    if X.alpha is None:
        raise ArgumentError("cube has no parameter interval attached")
    if not X.phase_fixed:
        raise ArgumentError(
            "Krawczyk coordinates drop b_1; the cube must be phase-fixed"
        )
    if xbar.M != X.M:
        raise ArgumentError("center and cube disagree on the number of modes")
    if len(T.h) != X.M:
        raise ArgumentError("tail bounds were computed for a different truncation")
    if xbar.c_bar[0].imag != 0.0:
        raise ArgumentError("center must have b_1 = 0 in phase-fixed coordinates")
    if not (xbar.alpha_bar > 0.0 and xbar.omega_bar > 0.0):
        raise ArgumentError("center frequencies must be positive")
    if not (X.alpha.contains(xbar.alpha_bar) and X.omega.contains(xbar.omega_bar)):
        raise ArgumentError("center lies outside the cube")
    for j, z in enumerate(xbar.c_bar):
        if not X.coeffs[j].contains(z):
            raise ArgumentError("center lies outside the cube")


def krawczyk_outer(
    X: Cube, xbar: CenterPoint, P: Preconditioner, T: TailBounds
) -> KrawczykImage:
    """Enclosure of the Krawczyk image of X, valid for every parameter value.

    The residual at the center is evaluated over the whole parameter
    interval, and the Jacobian enclosure over the whole cube, so a single
    image certifies the full parameter range at once.  Wide inputs produce a
    wide image and an Inconclusive verdict; no input is an error as long as
    the shapes agree and the center sits inside the cube.
    """
    _check_compatible(X, xbar, T)
    if P.A_M.shape[0] != 2 * X.M:
        raise ArgumentError("preconditioner dimension does not match the cube")

    fcube = X.replace(
        omega=Interval(xbar.omega_bar),
        coeffs=[ComplexInterval.from_complex(z) for z in xbar.c_bar],
    )
    fbar = []
    for comp in eval_F_M(fcube):
        fbar.append(comp.re)
        fbar.append(comp.im)

    g_rows = []
    for k in range(X.M):
        gk = iv.add(Interval(T.gMi[k]), Interval(T.gMii[k])).hi
        g_rows.append(gk)
        g_rows.append(gk)

    _, KM, margin, interior = _assemble_finite_block(
        _center_vector(xbar),
        X.finite_vector(),
        P.A_M,
        P.A_M_dagger,
        eval_DF_M(X),
        fbar,
        g_rows,
    )
    g_inf = _tail_radius(X, xbar, T)
    verdict = _classify(X.finite_vector(), KM, g_inf, X.tail_C0, interior)
    return KrawczykImage(KM, g_inf, verdict, margin)


def check_theorem_conditions(X: Cube, K: KrawczykImage, T: TailBounds) -> str:
    """Re-derive the verdict of a Krawczyk image against its cube.

    Unique requires the finite block inside the cube, the tail radius
    strictly below the cube's tail constant, and a positive contraction
    margin (the stored witness of strict interiority).  A coordinate of the
    finite block disjoint from the cube gives Excluded: every zero inside
    the cube would have to land in the image, so none exists.  Everything
    else is Inconclusive.
    """
    if K.M != X.M:
        raise ArgumentError("image and cube disagree on the number of modes")
    if len(T.h) != X.M:
        raise ArgumentError("tail bounds were computed for a different truncation")
    return _classify(
        X.finite_vector(), K.KM, K.g_inf, X.tail_C0, K.contraction_margin > 0.0
    )
