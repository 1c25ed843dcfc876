"""From pointwise envelopes to an initial cube cover of the solution set.

The chain has three rigorous stages.  A Fourier projection turns envelopes
on a periodic function and its derivatives into interval bounds on its
frequency and Fourier coefficients, one derivative order at a time, and
intersects the per-order bounds.  A time translation rotates the
coefficient rectangles so the first coefficient becomes real and
non-negative, which fixes the phase.  Finally the translated cubes are
given the parameter interval, pruned where the prune hypotheses hold,
and merged cell by cell over a grid in the (omega, a_1) plane, which
caps how many cubes the global search starts from.
"""

from __future__ import annotations

import logging
import math

from . import interval as iv
from .cubes import Cube, CubeCollection, cube_hull
from .envelopes import EnvelopeSet, bootstrap_envelopes
from .errors import ArgumentError, EmptyIntersection
from .interval import PI, TWO_PI, ComplexInterval, Interval
from .prune import prune

__all__ = [
    "build_cover",
    "fourier_projection",
    "grid_cover",
    "seed_cubes",
    "time_translate",
]

logger = logging.getLogger(__name__)

_HALF_PI = iv.div(PI, Interval(2.0))


def _require_plain_int(value, name: str, minimum: int) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        raise ArgumentError(f"{name} must be an integer >= {minimum}")
    return value


def _cell_windows(env, upto: float):
    """Per-cell clipped integration windows over [0, upto].

    Yields (index, start, end, length_bound) with interval endpoint
    enclosures clipped at ``upto`` and an upper bound on the clipped cell
    length; cells entirely beyond the limit are skipped.
    """
    for j in range(env.n_time):
        start, end = env.cell_edges(j)
        if start.lo >= upto:
            return
        start = Interval(min(start.lo, upto), min(start.hi, upto))
        end = Interval(min(end.lo, upto), min(end.hi, upto))
        length = max(0.0, iv.sub(end, start).hi)
        yield j, start, end, length


def _mid_and_radius(cell: Interval) -> tuple[float, float]:
    """Midpoint and a radius certainly covering the cell around it."""
    mid = cell.mid()
    rad = max(
        iv.sub(Interval(cell.hi), Interval(mid)).hi,
        iv.sub(Interval(mid), Interval(cell.lo)).hi,
    )
    return mid, rad


def fourier_projection(M: int, period: Interval, env: EnvelopeSet) -> Cube:
    """Cube of frequency and Fourier coefficients compatible with the envelopes.

    Every continuous function whose period lies in ``period`` and whose
    derivative orders obey the envelope cells has its frequency in the
    output's omega interval, its first M coefficients in the output
    rectangles, and the rest below the output's algebraic tail.  Each
    derivative order yields its own coefficient bounds, which only differ
    by a quarter-turn phase per order; the output intersects them all.

    For each mode and order the integral of trig times the envelope is
    bounded cellwise: the cell midpoint multiplies the exact antiderivative
    enclosure sin(omega k t)/(omega k), and the cell radius multiplies the
    cell length.  The stretch of one period's uncertainty, between the
    period's endpoints, is charged separately with the trig factor bounded
    by one.  The tail constant compares the top-order envelope against the
    trigonometric polynomial built from the midpoint coefficients.
    """
    M = _require_plain_int(M, "M", 1)
    if not isinstance(env, EnvelopeSet):
        raise ArgumentError("env must be an EnvelopeSet")
    if not isinstance(period, Interval) or period.is_empty:
        raise ArgumentError("period must be a nonempty Interval")
    if not period.lo > 0.0:
        raise ArgumentError("period must be positive")
    if period.hi > env.period.hi:
        raise ArgumentError("envelope grid does not cover the requested period")
    S = env.S
    if S < 1:
        raise ArgumentError(
            "projection needs at least one derivative order for the tail decay"
        )
    omega = iv.div(TWO_PI, period)
    L_lo = period.lo
    L_hi = period.hi

    # Period-uncertainty tail per order: |trig| <= 1 over [L_lo, L_hi].
    delta = []
    for s in range(S + 1):
        acc = Interval(0.0)
        for j in range(env.n_time):
            start, end = env[s].cell_edges(j)
            if end.hi <= L_lo or start.lo >= L_hi:
                continue
            length = max(
                0.0,
                iv.sub(
                    Interval(min(end.hi, L_hi)), Interval(max(start.lo, L_lo))
                ).hi,
            )
            acc = iv.add(acc, iv.mul(Interval(env[s].cell(j).mag()), Interval(length)))
        delta.append(acc.hi)

    a_signed = [[None] * (S + 1) for _ in range(M)]
    b_signed = [[None] * (S + 1) for _ in range(M)]
    for k in range(1, M + 1):
        wk = iv.mul(omega, Interval(float(k)))
        for s in range(S + 1):
            cos_sum = Interval(0.0)
            sin_sum = Interval(0.0)
            for j, start, end, length in _cell_windows(env[s], L_lo):
                mid, rad = _mid_and_radius(env[s].cell(j))
                trig_cos = iv.div(
                    iv.sub(iv.sin(iv.mul(wk, end)), iv.sin(iv.mul(wk, start))), wk
                )
                trig_sin = iv.div(
                    iv.sub(iv.cos(iv.mul(wk, start)), iv.cos(iv.mul(wk, end))), wk
                )
                dev = iv.mul(Interval(rad), Interval(length)).hi
                spread = Interval(-dev, dev)
                cos_sum = iv.add(
                    cos_sum, iv.add(iv.mul(Interval(mid), trig_cos), spread)
                )
                sin_sum = iv.add(
                    sin_sum, iv.add(iv.mul(Interval(mid), trig_sin), spread)
                )
            pad = Interval(-delta[s], delta[s])
            a_range = iv.add(cos_sum, pad)
            b_range = iv.add(sin_sum, pad)
            scale = iv.mul(
                iv.mul(TWO_PI, Interval(float(k**s))), iv.ipow(omega, s - 1)
            )
            a_prime = iv.div(a_range, scale)
            b_prime = iv.div(b_range, scale)
            quarter = s % 4
            if quarter == 0:
                a_signed[k - 1][s] = a_prime
                b_signed[k - 1][s] = iv.neg(b_prime)
            elif quarter == 1:
                a_signed[k - 1][s] = iv.neg(b_prime)
                b_signed[k - 1][s] = iv.neg(a_prime)
            elif quarter == 2:
                a_signed[k - 1][s] = iv.neg(a_prime)
                b_signed[k - 1][s] = b_prime
            else:
                a_signed[k - 1][s] = b_prime
                b_signed[k - 1][s] = a_prime

    coeffs = []
    for k in range(1, M + 1):
        a_k = a_signed[k - 1][0]
        b_k = b_signed[k - 1][0]
        for s in range(1, S + 1):
            a_k = iv.intersect(a_k, a_signed[k - 1][s])
            b_k = iv.intersect(b_k, b_signed[k - 1][s])
            if a_k.is_empty or b_k.is_empty:
                raise EmptyIntersection(
                    f"mode {k} bounds from derivative order {s} exclude the "
                    "bounds from lower orders; the envelopes are inconsistent"
                )
        coeffs.append(ComplexInterval(a_k, b_k))

    # Tail constant: integrate the gap between the top-order envelope and
    # the trigonometric polynomial of the midpoint coefficients.
    rotated = []
    for k in range(1, M + 1):
        a_bar = a_signed[k - 1][S].mid()
        b_bar = b_signed[k - 1][S].mid()
        quarter = S % 4
        if quarter == 0:
            rotated.append((a_bar, b_bar))
        elif quarter == 1:
            rotated.append((-b_bar, a_bar))
        elif quarter == 2:
            rotated.append((-a_bar, -b_bar))
        else:
            rotated.append((b_bar, -a_bar))
    gap_total = Interval(0.0)
    top = env[S]
    for j in range(top.n_time):
        start, end = top.cell_edges(j)
        if start.lo >= L_hi:
            break
        span = Interval(max(0.0, start.lo), min(end.hi, L_hi))
        poly = Interval(0.0)
        for k in range(1, M + 1):
            wk = iv.mul(omega, Interval(float(k)))
            theta = iv.mul(wk, span)
            p, q = rotated[k - 1]
            term = iv.sub(
                iv.mul(Interval(2.0 * p), iv.cos(theta)),
                iv.mul(Interval(2.0 * q), iv.sin(theta)),
            )
            poly = iv.add(poly, iv.mul(iv.ipow(wk, S), term))
        gap = iv.sub(top.cell(j), poly).mag()
        length = max(0.0, iv.sub(Interval(span.hi), Interval(span.lo)).hi)
        gap_total = iv.add(gap_total, iv.mul(Interval(gap), Interval(length)))
    C0 = iv.div(gap_total, iv.mul(TWO_PI, iv.ipow(omega, S - 1))).hi

    return Cube(None, omega, coeffs, C0, float(S), phase_fixed=False)


def _phase_angle(c1: ComplexInterval) -> Interval:
    """Enclosure of the argument of every nonzero point in the rectangle.

    Away from the axes a single arctan branch covers the rectangle; when
    the rectangle touches both axes the argument can be anything, and the
    full circle is returned.
    """
    a1, b1 = c1.re, c1.im
    if a1.lo > 0.0:
        return iv.atan(iv.div(b1, a1))
    if a1.hi < 0.0:
        return iv.add(iv.atan(iv.div(b1, a1)), PI)
    if b1.lo > 0.0:
        return iv.add(iv.neg(iv.atan(iv.div(a1, b1))), _HALF_PI)
    if b1.hi < 0.0:
        return iv.sub(iv.neg(iv.atan(iv.div(a1, b1))), _HALF_PI)
    return Interval(-PI.hi, PI.hi)


def time_translate(X: Cube) -> Cube:
    """Phase-fixed cube containing a translate of every function in X.

    Shifting time by -theta/omega multiplies coefficient k by exp(-i k
    theta); choosing theta as the argument of the first coefficient makes
    that coefficient real and non-negative.  The argument is only known up
    to the enclosure of c_1, so every other mode is rotated by the whole
    angle interval.  When the accumulated angle k theta wraps past a full
    turn the rotated rectangle is replaced by the bounding box of the disc
    of radius |c_k|, which the rotation can never leave.
    """
    if not isinstance(X, Cube):
        raise ArgumentError("time_translate expects a Cube")
    if X.alpha is not None:
        raise ArgumentError("translation acts before the parameter is attached")
    if X.phase_fixed:
        raise ArgumentError("cube is already phase-fixed")
    theta = _phase_angle(X.coeffs[0])
    radius = iv.sqrt(iv.add(iv.sqr(X.coeffs[0].re), iv.sqr(X.coeffs[0].im)))
    coeffs = [ComplexInterval(radius, Interval(0.0))]
    for k in range(2, X.M + 1):
        c_k = X.coeffs[k - 1]
        psi = iv.mul(theta, Interval(float(k)))
        if psi.width() >= TWO_PI.lo:
            r = c_k.modulus_upper()
            coeffs.append(ComplexInterval(Interval(-r, r), Interval(-r, r)))
        else:
            coeffs.append(iv.scale_by_unit(iv.neg(psi), c_k))
    return X.replace(coeffs=coeffs, phase_fixed=True)


def _axis_cells(lo: float, hi: float, N: int) -> list[Interval]:
    edges = [lo + (hi - lo) * i / N for i in range(N + 1)]
    edges[0] = lo
    edges[N] = hi
    for i in range(1, N + 1):
        edges[i] = max(edges[i], edges[i - 1])
    return [Interval(edges[i], edges[i + 1]) for i in range(N)]


def seed_cubes(
    I_alpha: Interval,
    M: int,
    S: int,
    envelopes: list[EnvelopeSet],
) -> CubeCollection:
    """One projected, phase-fixed, pruned cube per surviving envelope set.

    Envelope sets with fewer derivative orders than S are extended by the
    bootstrap over I_alpha; deeper sets are truncated, so every projected
    cube decays at the same rate S.  A projection whose per-order bounds
    are inconsistent is discarded with a warning, since no function obeys
    such an envelope.  Pruning runs when its hypotheses (M >= 5, S > 2)
    hold and drops cubes whose flag certifies emptiness.
    """
    if not isinstance(I_alpha, Interval) or I_alpha.is_empty:
        raise ArgumentError("I_alpha must be a nonempty Interval")
    M = _require_plain_int(M, "M", 1)
    S = _require_plain_int(S, "S", 1)
    envelopes = list(envelopes)
    if not envelopes:
        raise ArgumentError("seeding needs at least one envelope set")
    for env in envelopes:
        if not isinstance(env, EnvelopeSet):
            raise ArgumentError("envelopes must be EnvelopeSet instances")

    survivors = CubeCollection()
    for idx, env in enumerate(envelopes):
        if env.S < S:
            env = bootstrap_envelopes(env[0], I_alpha, S, provenance=env.provenance)
        elif env.S > S:
            env = EnvelopeSet(env.orders[: S + 1], provenance=env.provenance)
        try:
            projected = fourier_projection(M, env.period, env)
        except EmptyIntersection as exc:
            logger.warning("discarding envelope %d: %s", idx, exc)
            continue
        translated = time_translate(projected)
        seeded = translated.replace(alpha=I_alpha)
        if M >= 5 and S > 2:
            result = prune(seeded)
            if result.flag == 1:
                continue
            seeded = result.cube
        survivors.append(seeded)
    return survivors


def grid_cover(seeded: CubeCollection, N: int) -> CubeCollection:
    """Hull cubes into the cells of an N x N grid over their footprint.

    The grid partitions the joint (omega, a_1) bounding box of the seeded
    cubes; each cube is clipped to every cell it meets and the clipped
    pieces landing in one cell are hulled, so a cube meeting several cells
    contributes to each of them.  Duplicate cell hulls collapse to one.
    """
    if not isinstance(seeded, CubeCollection):
        raise ArgumentError("grid_cover expects a CubeCollection")
    N = _require_plain_int(N, "N", 1)
    cover = CubeCollection()
    if not len(seeded):
        return cover
    omega_lo = min(X.omega.lo for X in seeded)
    omega_hi = max(X.omega.hi for X in seeded)
    a1_lo = min(X.coeffs[0].re.lo for X in seeded)
    a1_hi = max(X.coeffs[0].re.hi for X in seeded)
    omega_cells = _axis_cells(omega_lo, omega_hi, N)
    a1_cells = _axis_cells(a1_lo, a1_hi, N)
    for cell_w in omega_cells:
        for cell_a in a1_cells:
            hulled = None
            for X in seeded:
                clip_w = iv.intersect(X.omega, cell_w)
                clip_a = iv.intersect(X.coeffs[0].re, cell_a)
                if clip_w.is_empty or clip_a.is_empty:
                    continue
                vec = X.finite_vector()
                vec[0] = clip_w
                vec[1] = clip_a
                member = X.with_finite_vector(vec)
                hulled = member if hulled is None else cube_hull(hulled, member)
            if hulled is not None and all(hulled != Y for Y in cover):
                cover.append(hulled)
    return cover


def build_cover(
    I_alpha: Interval,
    M: int,
    S: int,
    N: int,
    envelopes: list[EnvelopeSet],
) -> CubeCollection:
    """Initial cover: project, fix phase, attach the parameter, prune, grid.

    Composes :func:`seed_cubes` with :func:`grid_cover`; see those for the
    per-phase behavior.
    """
    N = _require_plain_int(N, "N", 1)
    return grid_cover(seed_cubes(I_alpha, M, S, envelopes), N)
