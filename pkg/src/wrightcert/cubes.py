"""Cube data model over parameter x frequency x Fourier coefficient space.

A cube is a box: an interval for the parameter alpha, an interval for the
frequency omega, rectangles for finitely many Fourier coefficients c_1..c_M,
and a tail region {|c_k| <= C0/k^s, k > M} described by the two reals C0 and
s. When the phase condition is imposed (``phase_fixed``), c_1 is real and
non-negative, and the addressable coordinates of the finite part are the 2M
reals (omega, a_1, a_2, b_2, ..., a_M, b_M); b_1 stays pinned at [0,0].

All rigor-bearing scalar computations here go through the interval module.
"""

from __future__ import annotations

import math
from typing import Iterable, Iterator

from . import interval as iv
from .errors import (
    ArgumentError,
    DegenerateDimension,
    IndexOutOfRange,
    ShapeMismatch,
)
from .interval import ComplexInterval, Interval


class Cube:
    __slots__ = ("alpha", "omega", "coeffs", "tail_C0", "decay_s", "phase_fixed")

    def __init__(
        self,
        alpha: Interval | None,
        omega: Interval,
        coeffs: Iterable[ComplexInterval],
        tail_C0: float,
        decay_s: float,
        phase_fixed: bool = False,
    ):
        coeffs = tuple(coeffs)
        if len(coeffs) < 1:
            raise ArgumentError("cube needs at least one coefficient mode")
        if alpha is not None:
            if not isinstance(alpha, Interval) or alpha.is_empty:
                raise ArgumentError("alpha must be a nonempty Interval or None")
        if not isinstance(omega, Interval) or omega.is_empty:
            raise ArgumentError("omega must be a nonempty Interval")
        for c in coeffs:
            if not isinstance(c, ComplexInterval) or c.is_empty:
                raise ArgumentError("coefficients must be nonempty rectangles")
        tail_C0 = float(tail_C0)
        decay_s = float(decay_s)
        if not (tail_C0 >= 0.0 and math.isfinite(tail_C0)):
            raise ArgumentError("tail_C0 must be finite and nonnegative")
        if not (decay_s > 0.0 and math.isfinite(decay_s)):
            raise ArgumentError("decay_s must be finite and positive")
        if phase_fixed:
            c1 = coeffs[0]
            if not (c1.im.lo == 0.0 and c1.im.hi == 0.0):
                raise ArgumentError("phase-fixed cube requires b_1 = [0,0]")
            if c1.re.lo < 0.0:
                raise ArgumentError("phase-fixed cube requires a_1 >= 0")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "tail_C0", tail_C0)
        object.__setattr__(self, "decay_s", decay_s)
        object.__setattr__(self, "phase_fixed", bool(phase_fixed))

    def __setattr__(self, name, value):
        raise AttributeError("Cube is immutable")

    @property
    def M(self) -> int:
        return len(self.coeffs)

    def replace(self, **kw) -> "Cube":
        fields = {
            "alpha": self.alpha,
            "omega": self.omega,
            "coeffs": self.coeffs,
            "tail_C0": self.tail_C0,
            "decay_s": self.decay_s,
            "phase_fixed": self.phase_fixed,
        }
        fields.update(kw)
        return Cube(**fields)

    def finite_vector(self) -> list[Interval]:
        """The 2M ordered coordinates (omega, a_1, a_2, b_2, ..., a_M, b_M)."""
        vec = [self.omega, self.coeffs[0].re]
        for c in self.coeffs[1:]:
            vec.append(c.re)
            vec.append(c.im)
        return vec

    def with_finite_vector(self, vec: list[Interval]) -> "Cube":
        """Rebuild the cube from a replacement coordinate vector; b_1 and all
        scalar metadata are carried over."""
        if len(vec) != 2 * self.M:
            raise ShapeMismatch("coordinate vector has the wrong length")
        coeffs = [ComplexInterval(vec[1], self.coeffs[0].im)]
        for n in range(2, self.M + 1):
            coeffs.append(ComplexInterval(vec[2 * n - 2], vec[2 * n - 1]))
        return self.replace(omega=vec[0], coeffs=coeffs)

    def dim_interval(self, dim_index: int) -> Interval:
        """Addressed interval for dim_index in 0..2M (0 is alpha)."""
        if dim_index == 0:
            if self.alpha is None:
                raise ArgumentError("cube has no alpha attached")
            return self.alpha
        if not 1 <= dim_index <= 2 * self.M:
            raise IndexOutOfRange(f"dimension {dim_index} outside 0..{2 * self.M}")
        return self.finite_vector()[dim_index - 1]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Cube):
            return NotImplemented
        return (
            self.alpha == other.alpha
            and self.omega == other.omega
            and self.coeffs == other.coeffs
            and self.tail_C0 == other.tail_C0
            and self.decay_s == other.decay_s
            and self.phase_fixed == other.phase_fixed
        )

    def __repr__(self) -> str:
        return (
            f"Cube(alpha={self.alpha!r}, omega={self.omega!r}, M={self.M}, "
            f"C0={self.tail_C0!r}, s={self.decay_s!r}, phase_fixed={self.phase_fixed})"
        )


def abs_sup(X: Cube, k: int) -> float:
    """Upper bound on sup |c_k| over the cube, for a finite mode 1 <= k <= M."""
    if not 1 <= k <= X.M:
        raise IndexOutOfRange(f"mode {k} outside 1..{X.M}")
    return X.coeffs[k - 1].modulus_upper()


def l1_upper_bound(X: Cube) -> float:
    """delta >= 2 sum_k |c_k| over the cube, finite modes plus tail majorant."""
    acc = Interval(0.0)
    for k in range(1, X.M + 1):
        acc = iv.add(acc, Interval(abs_sup(X, k)))
    acc = iv.mul(Interval(2.0), acc)
    s = X.decay_s
    tail_num = iv.mul(Interval(2.0), Interval(X.tail_C0))
    sm1 = iv.sub(Interval(s), Interval(1.0))
    tail_den = iv.mul(sm1, iv.ipow(Interval(float(X.M)), s - 1.0))
    acc = iv.add(acc, iv.div(tail_num, tail_den))
    return acc.hi


def convolve_truncated(
    a: list[ComplexInterval], b: list[ComplexInterval], omega: Interval
) -> list[ComplexInterval]:
    """Quadratic interaction term of the functional, modes 1..M.

    Component k is
        sum_{j=1}^{k-1} e^{-i omega j} a_j b_{k-j}
        + sum_{j=1}^{M-k} (e^{-i omega (j+k)} + e^{i omega j}) a_j^* b_{j+k},
    the first argument carrying the frequency rotation, with the convention
    a_{-j} = a_j^* and a_0 = 0 and the infinite sum truncated at j = M-k.
    """
    M = len(a)
    if len(b) != M:
        raise ShapeMismatch("coefficient arrays differ in length")
    E = [iv.complex_exp_neg(iv.mul(omega, Interval(float(m)))) for m in range(1, M + 1)]
    out = []
    for k in range(1, M + 1):
        acc = ComplexInterval.zero()
        for j in range(1, k):
            acc = acc + E[j - 1] * a[j - 1] * b[k - j - 1]
        for j in range(1, M - k + 1):
            gamma = E[j + k - 1] + E[j - 1].conj()
            acc = acc + gamma * a[j - 1].conj() * b[j + k - 1]
        out.append(acc)
    return out


def gamma_constant(M: int, s: float) -> float:
    """Upper bound gamma_M dominating sum_{k1=1}^{k-1} k^s/(k1^s (k-k1)^s)
    for every k >= M >= 6 (and equal to the k = M bound for M >= 4)."""
    if not (isinstance(M, int) and M >= 4):
        raise ArgumentError("gamma constant requires integer M >= 4")
    s = float(s)
    if not (s >= 2.0 and math.isfinite(s)):
        raise ArgumentError("gamma constant requires s >= 2")
    s_star = math.floor(s)
    Mi = Interval(float(M))
    ratio = iv.div(Mi, Interval(float(M - 1)))
    term1 = iv.mul(Interval(2.0), iv.ipow(ratio, s))
    log_part = iv.div(iv.mul(Interval(4.0), iv.ln(Interval(float(M - 2)))), Mi)
    pi_part = iv.div(iv.sub(iv.sqr(iv.PI), Interval(6.0)), Interval(3.0))
    base = iv.add(iv.div(Interval(2.0), Mi), Interval(0.5))
    term2 = iv.mul(iv.add(log_part, pi_part), iv.ipow(base, s_star - 2))
    return iv.add(term1, term2).hi


def cube_split(X: Cube, dim_index: int) -> tuple[Cube, Cube]:
    """Bisect the addressed coordinate at its midpoint."""
    t = X.dim_interval(dim_index)
    mid = t.mid() if not t.is_empty else 0.0
    if t.lo >= t.hi or not t.lo < mid < t.hi:
        raise DegenerateDimension(
            f"dimension {dim_index} with interval {t!r} cannot be bisected"
        )
    left_t = Interval(t.lo, mid)
    right_t = Interval(mid, t.hi)
    if dim_index == 0:
        return X.replace(alpha=left_t), X.replace(alpha=right_t)
    vec = X.finite_vector()
    vl = list(vec)
    vr = list(vec)
    vl[dim_index - 1] = left_t
    vr[dim_index - 1] = right_t
    return X.with_finite_vector(vl), X.with_finite_vector(vr)


def _check_shapes(X: Cube, Y: Cube) -> None:
    if X.M != Y.M or X.decay_s != Y.decay_s:
        raise ShapeMismatch(
            f"cube shapes differ: M {X.M}/{Y.M}, s {X.decay_s}/{Y.decay_s}"
        )
    if (X.alpha is None) != (Y.alpha is None):
        raise ShapeMismatch("one cube has alpha attached, the other does not")


def cube_hull(X: Cube, Y: Cube) -> Cube:
    _check_shapes(X, Y)
    alpha = None if X.alpha is None else iv.hull(X.alpha, Y.alpha)
    coeffs = [
        ComplexInterval(iv.hull(cx.re, cy.re), iv.hull(cx.im, cy.im))
        for cx, cy in zip(X.coeffs, Y.coeffs)
    ]
    return Cube(
        alpha,
        iv.hull(X.omega, Y.omega),
        coeffs,
        max(X.tail_C0, Y.tail_C0),
        X.decay_s,
        phase_fixed=X.phase_fixed and Y.phase_fixed,
    )


def cube_intersect(X: Cube, Y: Cube) -> Cube | None:
    """Componentwise intersection; None stands for the empty cube."""
    _check_shapes(X, Y)
    if X.alpha is None:
        alpha = None
    else:
        alpha = iv.intersect(X.alpha, Y.alpha)
        if alpha.is_empty:
            return None
    omega = iv.intersect(X.omega, Y.omega)
    if omega.is_empty:
        return None
    coeffs = []
    for cx, cy in zip(X.coeffs, Y.coeffs):
        re = iv.intersect(cx.re, cy.re)
        im = iv.intersect(cx.im, cy.im)
        if re.is_empty or im.is_empty:
            return None
        coeffs.append(ComplexInterval(re, im))
    return Cube(
        alpha,
        omega,
        coeffs,
        min(X.tail_C0, Y.tail_C0),
        X.decay_s,
        phase_fixed=X.phase_fixed or Y.phase_fixed,
    )


class CubeCollection:
    """List of cubes sharing M and decay_s."""

    __slots__ = ("cubes",)

    def __init__(self, cubes: Iterable[Cube] = ()):
        object.__setattr__(self, "cubes", [])
        for c in cubes:
            self.append(c)

    def __setattr__(self, name, value):
        raise AttributeError("CubeCollection fields are managed")

    def append(self, cube: Cube) -> None:
        if self.cubes:
            head = self.cubes[0]
            if cube.M != head.M or cube.decay_s != head.decay_s:
                raise ShapeMismatch("collection members must share M and decay_s")
        self.cubes.append(cube)

    def extend(self, cubes: Iterable[Cube]) -> None:
        for c in cubes:
            self.append(c)

    def __iter__(self) -> Iterator[Cube]:
        return iter(self.cubes)

    def __len__(self) -> int:
        return len(self.cubes)

    def __getitem__(self, i: int) -> Cube:
        return self.cubes[i]

    def __repr__(self) -> str:
        return f"CubeCollection({len(self.cubes)} cubes)"


def serialize_cube(X: Cube) -> str:
    """One whitespace-delimited record; floats as shortest round-trip text."""
    if X.alpha is None:
        raise ArgumentError("cannot serialize a cube without alpha attached")
    parts = [
        repr(X.alpha.lo),
        repr(X.alpha.hi),
        repr(X.omega.lo),
        repr(X.omega.hi),
        repr(X.decay_s),
        repr(X.tail_C0),
        str(X.M),
    ]
    for c in X.coeffs:
        parts += [repr(c.re.lo), repr(c.re.hi), repr(c.im.lo), repr(c.im.hi)]
    return " ".join(parts)


def parse_cube(line: str) -> Cube:
    tok = line.split()
    if len(tok) < 7:
        raise ArgumentError("truncated cube record")
    alpha = Interval(float(tok[0]), float(tok[1]))
    omega = Interval(float(tok[2]), float(tok[3]))
    decay_s = float(tok[4])
    tail_C0 = float(tok[5])
    M = int(tok[6])
    if len(tok) != 7 + 4 * M:
        raise ArgumentError(
            f"cube record has {len(tok)} fields, expected {7 + 4 * M} for M={M}"
        )
    coeffs = []
    for n in range(M):
        base = 7 + 4 * n
        coeffs.append(
            ComplexInterval(
                Interval(float(tok[base]), float(tok[base + 1])),
                Interval(float(tok[base + 2]), float(tok[base + 3])),
            )
        )
    phase_fixed = (
        coeffs[0].im.lo == 0.0 and coeffs[0].im.hi == 0.0 and coeffs[0].re.lo >= 0.0
    )
    return Cube(alpha, omega, coeffs, tail_C0, decay_s, phase_fixed=phase_fixed)


def write_cubes(path, cubes: Iterable[Cube]) -> None:
    with open(path, "w", encoding="ascii") as fh:
        for c in cubes:
            fh.write(serialize_cube(c))
            fh.write("\n")


def read_cubes(path) -> CubeCollection:
    out = CubeCollection()
    with open(path, "r", encoding="ascii") as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(parse_cube(line))
    return out
