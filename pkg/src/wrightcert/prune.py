"""Composite pruning of parameter-coefficient cubes.

A pruning pass tries, in order of increasing cost, to discard a cube
outright, to certify that it only meets the principal solution branch,
or to certify a unique zero per parameter value.  When none of that
succeeds the cube is intersected with its Krawczyk image, which never
loses a zero, so repeated passes refine toward the solution set.
"""

import wrightcert.interval as iv
from wrightcert.cubes import Cube, l1_upper_bound
from wrightcert.errors import ArgumentError, HypothesisViolation, SingularMidpoint
from wrightcert.functional import center_of, eval_F_M, h_bound, tail_bounds
from wrightcert.interval import PI, Interval
from wrightcert.krawczyk import build_preconditioner, krawczyk_outer

_HALF_PI = iv.div(PI, Interval(2.0))

_HOPF_ALPHA_WINDOW = 0.00553
_HOPF_OMEGA_WINDOW = 0.0924
_HOPF_NORM_LIMIT = 0.18

_SKIPPABLE_STEPS = (2, 3, 4)


class PruneResult:
    """Outcome of one pruning pass.

    ``flag`` 1 means the input holds no nontrivial zeros and the cube is
    dropped (``cube`` is None).  Flag 2 keeps the cube and certifies any
    zero inside lies on the branch emanating from the Hopf bifurcation.
    Flag 3 keeps the cube and certifies exactly one zero per parameter
    value.  Flag 0 returns a subcube that still holds every zero of the
    input.
    """

    __slots__ = ("flag", "cube")

    def __init__(self, flag, cube):
        if isinstance(flag, bool) or not isinstance(flag, int):
            raise ArgumentError("flag must be a plain integer")
        if flag not in (0, 1, 2, 3):
            raise ArgumentError(f"flag {flag} outside 0..3")
        if (cube is None) != (flag == 1):
            raise ArgumentError("cube must be None exactly when flag is 1")
        if cube is not None and not isinstance(cube, Cube):
            raise ArgumentError("cube must be a Cube or None")
        object.__setattr__(self, "flag", flag)
        object.__setattr__(self, "cube", cube)

    def __setattr__(self, name, value):
        raise AttributeError("PruneResult is immutable")

    def __repr__(self):
        return f"PruneResult(flag={self.flag}, cube={self.cube!r})"


def _require_window(alpha: Interval, omega: Interval) -> None:
    if alpha.is_empty or omega.is_empty:
        raise ArgumentError("empty parameter interval")
    if not (alpha.lo > 0.0 and alpha.hi <= 2.0):
        raise HypothesisViolation(
            f"alpha {alpha!r} not contained in (0, 2]"
        )
    if not omega.lo >= 1.1:
        raise HypothesisViolation(f"omega {omega!r} extends below 1.1")


def _radius_on_cell(alpha: Interval, omega: Interval) -> Interval:
    ratio = iv.div(omega, alpha)
    detune = iv.sub(Interval(1.0), ratio)
    square = iv.sqr(detune)
    slack = iv.sub(Interval(1.0), iv.sin(omega))
    slack = iv.intersect(slack, Interval(0.0, 2.0))
    total = iv.add(square, iv.mul(iv.mul(Interval(2.0), ratio), slack))
    total = Interval(max(0.0, total.lo), max(0.0, total.hi))
    return iv.sqrt(total)


_RADIUS_CELLS = 32


def zero_exclusion_radius(alpha: Interval, omega: Interval) -> Interval:
    """Enclosure of sqrt((1 - w/a)^2 + 2 (w/a) (1 - sin w)) over the box.

    Any zero of the map whose two-sided coefficient l1 norm stays below
    the lower endpoint of the result has identically zero coefficients.
    Valid for alpha in (0, 2] and omega >= 1.1.

    The frequency interval is evaluated in subcells and the results are
    hulled.  One-shot evaluation loses the lower bound entirely on wide
    boxes: the detuning term and the 1 - sin w term each reach zero
    somewhere, though never together, and only a subdivision fine enough
    to separate those regions recovers a positive minimum.
    """
    _require_window(alpha, omega)
    if omega.width() == 0.0:
        return _radius_on_cell(alpha, omega)
    edges = [omega.lo]
    for i in range(1, _RADIUS_CELLS):
        edges.append(
            max(edges[-1], omega.lo + omega.width() * (i / _RADIUS_CELLS))
        )
    edges.append(omega.hi)
    enclosure = None
    for lo, hi in zip(edges[:-1], edges[1:]):
        cell = _radius_on_cell(alpha, Interval(lo, hi))
        enclosure = cell if enclosure is None else iv.hull(enclosure, cell)
    return enclosure


def hopf_neighborhood_test(X: Cube, delta: float) -> bool:
    """Whether the cube sits inside the certified bifurcation window.

    True when every parameter is within 0.00553 of pi/2, every frequency
    within 0.0924 of pi/2, and ``delta`` (an upper bound on the two-sided
    l1 norm over the cube) is strictly below 0.18.  Inside that window
    the only solutions are on the principal branch.
    """
    if X.alpha is None:
        return False
    off_alpha = iv.sub(X.alpha, _HALF_PI).mag()
    off_omega = iv.sub(X.omega, _HALF_PI).mag()
    return (
        off_alpha <= _HOPF_ALPHA_WINDOW
        and off_omega <= _HOPF_OMEGA_WINDOW
        and delta < _HOPF_NORM_LIMIT
    )


def amplitude_lower_bound(alpha: Interval, omega: Interval) -> Interval:
    """Enclosure of the least amplitude a nontrivial periodic solution can have.

    Evaluates -1/2 + (1/2) sqrt(1 + (4 sqrt(3) w / (pi a)) g(a, w)) over
    the box, with g the zero-exclusion radius.  Solutions of smaller
    amplitude would have coefficients inside the excluded ball.  Same
    parameter window as the radius itself.
    """
    g = zero_exclusion_radius(alpha, omega)
    sqrt3 = iv.sqrt(Interval(3.0))
    coef = iv.div(
        iv.mul(iv.mul(Interval(4.0), sqrt3), omega), iv.mul(PI, alpha)
    )
    radicand = iv.add(Interval(1.0), iv.mul(coef, g))
    root = iv.sqrt(radicand)
    return iv.add(Interval(-0.5), iv.mul(Interval(0.5), root))


def _alpha_in_radius_window(X: Cube) -> bool:
    return (
        X.alpha is not None
        and X.alpha.lo > 0.0
        and X.alpha.hi <= 2.0
        and X.omega.lo >= 1.1
    )


def prune(X: Cube, *, skip_steps: tuple = ()) -> PruneResult:
    """One pass of the pruning operator.

    Tests run cheapest first: the zero-exclusion radius, the bifurcation
    window, a componentwise residual test, then the Krawczyk enclosure.
    ``skip_steps`` names analytic steps (any of 2, 3, 4) to bypass; the
    cheap tests only save work, so skipping them never changes a
    uniqueness outcome, and the keyword exists to let tests check that.

    A numerically singular preconditioner downgrades the pass to
    "cannot decide": the cube comes back unchanged with flag 0.
    """
    if not isinstance(X, Cube):
        raise ArgumentError("prune expects a Cube")
    if X.alpha is None:
        raise ArgumentError("pruning needs a parameter interval on the cube")
    if not X.phase_fixed:
        raise ArgumentError(
            "pruning requires a phase-fixed cube; the certification "
            "coordinates drop the first imaginary part"
        )
    if X.M < 5:
        raise HypothesisViolation(f"pruning requires M >= 5, got {X.M}")
    if not X.decay_s > 2.0:
        raise HypothesisViolation("pruning requires decay exponent > 2")
    for step in skip_steps:
        if step not in _SKIPPABLE_STEPS:
            raise ArgumentError(f"only steps {_SKIPPABLE_STEPS} can be skipped")

    delta = l1_upper_bound(X)

    if 2 not in skip_steps and _alpha_in_radius_window(X):
        radius = zero_exclusion_radius(X.alpha, X.omega)
        if delta < radius.lo:
            return PruneResult(1, None)

    if 3 not in skip_steps and hopf_neighborhood_test(X, delta):
        return PruneResult(2, X)

    if 4 not in skip_steps:
        residual = eval_F_M(X)
        leftover = h_bound(X)
        for component, bound in zip(residual, leftover):
            if component.modulus_lower() > bound:
                return PruneResult(1, None)

    xbar = center_of(X)
    T = tail_bounds(X, xbar)
    try:
        P = build_preconditioner(xbar, X.M)
    except SingularMidpoint:
        return PruneResult(0, X)
    K = krawczyk_outer(X, xbar, P, T)
    if K.verdict == "Unique":
        return PruneResult(3, X)
    if K.verdict == "Excluded":
        return PruneResult(1, None)

    box = X.finite_vector()
    clipped = [iv.intersect(b, km) for b, km in zip(box, K.KM)]
    if any(entry.is_empty for entry in clipped):
        return PruneResult(1, None)
    reduced = X.with_finite_vector(clipped).replace(
        tail_C0=min(X.tail_C0, K.g_inf)
    )
    return PruneResult(0, reduced)


def _same_cube(a: Cube, b: Cube) -> bool:
    if a.tail_C0 != b.tail_C0:
        return False
    va, vb = a.finite_vector(), b.finite_vector()
    return all(x.lo == y.lo and x.hi == y.hi for x, y in zip(va, vb))


def prune_iterated(X: Cube, max_rounds: int = 8) -> PruneResult:
    """Apply :func:`prune` repeatedly while it keeps strictly shrinking.

    Wide parameter intervals rarely certify in one pass because the
    image of the parameter spread fills most of the cube; intersecting
    and re-running contracts the box and the tail radius until a
    decisive flag appears.  Stops at the first flag other than 0, at
    ``max_rounds`` passes, or when a pass returns the cube unchanged,
    and returns the last result.
    """
    if isinstance(max_rounds, bool) or not isinstance(max_rounds, int):
        raise ArgumentError("max_rounds must be a plain integer")
    if max_rounds < 1:
        raise ArgumentError("max_rounds must be at least 1")
    result = prune(X)
    rounds = 1
    while (
        result.flag == 0
        and rounds < max_rounds
        and not _same_cube(result.cube, X)
    ):
        X = result.cube
        result = prune(X)
        rounds += 1
    return result
