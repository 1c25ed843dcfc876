"""Outward-rounded interval arithmetic on binary64 endpoints.

Python exposes no access to the FPU rounding mode, so directed rounding is
implemented by computing in round-to-nearest and nudging endpoints outward
with ``math.nextafter`` whenever the operation may have rounded. For the ring
operations the nudge is conditional on an exact residual test (TwoSum for
addition, Dekker two-product for multiplication, a sign test on the exact
residual x - q*y for division), so integer-exact arithmetic stays exact and
every endpoint is at worst one ulp from optimal. ``math.sqrt`` is assumed
correctly rounded (an IEEE 754 requirement); the transcendental functions are
trusted only to 1 ulp and get two-ulp safety nudges.

The residual tests are valid only away from overflow and underflow; outside
``(2**-500, 2**500)`` the code falls back to unconditional nudging, and results
that overflow to infinity are replaced by the largest finite float on the side
where infinity would be an invalid bound.
"""

from __future__ import annotations

import math
import sys

import numpy as np

from .errors import ArgumentError, DivByZeroSpan, DomainError, SingularMidpoint

_INF = math.inf
_MAXF = sys.float_info.max
_SPLIT = 134217729.0  # 2**27 + 1, Veltkamp splitting constant
_BIG = 2.0**500  # operand magnitude limit for the residual tests
_TINY = 2.0**-500  # result magnitude floor for the residual tests
_SINCOS_MAX = 32768.0  # sin/cos argument reduction limit (2**15)


def _sum_err(a: float, b: float, s: float) -> float:
    """Exact error of the rounded sum: a + b = s + err (s must be finite)."""
    bv = s - a
    av = s - bv
    return (a - av) + (b - bv)


def _prod_err(x: float, y: float, p: float) -> float:
    """Exact error of the rounded product: x * y = p + err.

    Valid only when |x|, |y| < 2**500 and |p| > 2**-500 (no overflow in the
    Veltkamp split, no loss to underflow); callers guard.
    """
    cx = _SPLIT * x
    xh = cx - (cx - x)
    xl = x - xh
    cy = _SPLIT * y
    yh = cy - (cy - y)
    yl = y - yh
    return ((xh * yh - p) + xh * yl + xl * yh) + xl * yl


def _add_down(a: float, b: float) -> float:
    s = a + b
    if s == _INF:
        return _INF if (a == _INF or b == _INF) else _MAXF
    if s == -_INF:
        return -_INF
    if s != s:  # inf + -inf; never reached from valid endpoints
        raise ArgumentError("undefined endpoint sum inf + -inf")
    e = _sum_err(a, b, s)
    return s if e >= 0.0 else math.nextafter(s, -_INF)


def _add_up(a: float, b: float) -> float:
    s = a + b
    if s == -_INF:
        return -_INF if (a == -_INF or b == -_INF) else -_MAXF
    if s == _INF:
        return _INF
    if s != s:
        raise ArgumentError("undefined endpoint sum inf + -inf")
    e = _sum_err(a, b, s)
    return s if e <= 0.0 else math.nextafter(s, _INF)


def _sub_down(a: float, b: float) -> float:
    return _add_down(a, -b)


def _sub_up(a: float, b: float) -> float:
    return _add_up(a, -b)


def _mul_down(x: float, y: float) -> float:
    if x == 0.0 or y == 0.0:
        return 0.0
    p = x * y
    if p == _INF:
        if x == _INF or x == -_INF or y == _INF or y == -_INF:
            return _INF
        return _MAXF  # finite overflow: true product exceeds the float range
    if p == -_INF:
        return -_INF
    if -_BIG < x < _BIG and -_BIG < y < _BIG and (p > _TINY or p < -_TINY):
        if _prod_err(x, y, p) >= 0.0:
            return p
    return math.nextafter(p, -_INF)


def _mul_up(x: float, y: float) -> float:
    if x == 0.0 or y == 0.0:
        return 0.0
    p = x * y
    if p == -_INF:
        if x == _INF or x == -_INF or y == _INF or y == -_INF:
            return -_INF
        return -_MAXF
    if p == _INF:
        return _INF
    if -_BIG < x < _BIG and -_BIG < y < _BIG and (p > _TINY or p < -_TINY):
        if _prod_err(x, y, p) <= 0.0:
            return p
    return math.nextafter(p, _INF)


def _div_dir(x: float, y: float, up: bool) -> float:
    """x / y rounded toward -inf (up=False) or +inf (up=True)."""
    if x == 0.0:
        return 0.0
    q = x / y
    if q == _INF:
        if x == _INF or x == -_INF:
            return _INF
        return _INF if up else _MAXF
    if q == -_INF:
        if x == _INF or x == -_INF:
            return -_INF
        return -_INF if up else -_MAXF
    if -_BIG < q < _BIG and -_BIG < y < _BIG:
        p = q * y
        # Need x - p exact (Sterbenz: same sign, within a factor of two) and
        # the two-product of q*y reliable.
        if (p > _TINY or p < -_TINY) and (p > 0.0) == (x > 0.0):
            ax = x if x > 0.0 else -x
            ap = p if p > 0.0 else -p
            if 0.5 * ax <= ap <= 2.0 * ax:
                d = x - p
                e = _prod_err(q, y, p)
                # residual x - q*y = d - e exactly; floats compare exactly
                if d == e:
                    return q
                q_low = (d > e) == (y > 0.0)  # q below the true quotient
                if q_low != up:
                    return q
    return math.nextafter(q, _INF if up else -_INF)


def _nudge2_down(v: float) -> float:
    return math.nextafter(math.nextafter(v, -_INF), -_INF)


def _nudge2_up(v: float) -> float:
    return math.nextafter(math.nextafter(v, _INF), _INF)


class Interval:
    """Closed interval [lo, hi] of reals, endpoints binary64.

    Endpoints may be infinite (unbounded side) but lo < +inf and hi > -inf so
    the set is nonempty; the canonical empty interval is the module-level
    ``EMPTY`` singleton. Instances are immutable.
    """

    __slots__ = ("lo", "hi")

    def __init__(self, lo: float, hi: float | None = None):
        if hi is None:
            hi = lo
        lo = float(lo)
        hi = float(hi)
        if not lo <= hi:  # also rejects NaN endpoints
            raise ArgumentError(f"invalid interval endpoints [{lo!r}, {hi!r}]")
        if lo == _INF or hi == -_INF:
            raise ArgumentError("endpoints would make the interval empty")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    def __setattr__(self, name, value):
        raise AttributeError("Interval is immutable")

    @property
    def is_empty(self) -> bool:
        return self.lo > self.hi

    def width(self) -> float:
        """Upper bound on hi - lo."""
        if self.is_empty:
            return 0.0
        return _sub_up(self.hi, self.lo)

    def mid(self) -> float:
        """A point guaranteed to lie in the interval, near its center."""
        if self.is_empty:
            raise ArgumentError("empty interval has no midpoint")
        if self.lo == -_INF or self.hi == _INF:
            raise ArgumentError("unbounded interval has no midpoint")
        m = 0.5 * (self.lo + self.hi)
        if m == _INF or m == -_INF:
            m = 0.5 * self.lo + 0.5 * self.hi
        return min(self.hi, max(self.lo, m))

    def mag(self) -> float:
        """max |t| over the interval (magnitude)."""
        if self.is_empty:
            return 0.0
        return max(abs(self.lo), abs(self.hi))

    def mig(self) -> float:
        """min |t| over the interval (mignitude)."""
        if self.is_empty or (self.lo <= 0.0 <= self.hi):
            return 0.0
        return min(abs(self.lo), abs(self.hi))

    def abs(self) -> "Interval":
        """Enclosure of {|t| : t in self}."""
        if self.is_empty:
            return EMPTY
        return Interval(self.mig(), self.mag())

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    def encloses(self, other: "Interval") -> bool:
        if other.is_empty:
            return True
        return self.lo <= other.lo and other.hi <= self.hi

    def strictly_encloses(self, other: "Interval") -> bool:
        if other.is_empty:
            return True
        return self.lo < other.lo and other.hi < self.hi

    def __eq__(self, other) -> bool:
        if not isinstance(other, Interval):
            return NotImplemented
        return self.lo == other.lo and self.hi == other.hi

    def __hash__(self) -> int:
        return hash((self.lo, self.hi))

    def __repr__(self) -> str:
        if self.is_empty:
            return "Interval.EMPTY"
        return f"[{self.lo!r}, {self.hi!r}]"

    def __add__(self, other):
        return add(self, _coerce(other))

    def __radd__(self, other):
        return add(_coerce(other), self)

    def __sub__(self, other):
        return sub(self, _coerce(other))

    def __rsub__(self, other):
        return sub(_coerce(other), self)

    def __mul__(self, other):
        return mul(self, _coerce(other))

    def __rmul__(self, other):
        return mul(_coerce(other), self)

    def __truediv__(self, other):
        return div(self, _coerce(other))

    def __rtruediv__(self, other):
        return div(_coerce(other), self)

    def __neg__(self):
        return neg(self)

    def __abs__(self):
        return self.abs()


EMPTY = object.__new__(Interval)
object.__setattr__(EMPTY, "lo", _INF)
object.__setattr__(EMPTY, "hi", -_INF)


def _coerce(x) -> Interval:
    if isinstance(x, Interval):
        return x
    if isinstance(x, (int, float)):
        return Interval(float(x))
    raise ArgumentError(f"cannot interpret {x!r} as an interval")


def add(a: Interval, b: Interval) -> Interval:
    if a.is_empty or b.is_empty:
        return EMPTY
    return Interval(_add_down(a.lo, b.lo), _add_up(a.hi, b.hi))


def sub(a: Interval, b: Interval) -> Interval:
    if a.is_empty or b.is_empty:
        return EMPTY
    return Interval(_sub_down(a.lo, b.hi), _sub_up(a.hi, b.lo))


def neg(a: Interval) -> Interval:
    if a.is_empty:
        return EMPTY
    return Interval(-a.hi, -a.lo)


def mul(a: Interval, b: Interval) -> Interval:
    if a.is_empty or b.is_empty:
        return EMPTY
    al, ah, bl, bh = a.lo, a.hi, b.lo, b.hi
    lo = min(
        _mul_down(al, bl), _mul_down(al, bh), _mul_down(ah, bl), _mul_down(ah, bh)
    )
    hi = max(_mul_up(al, bl), _mul_up(al, bh), _mul_up(ah, bl), _mul_up(ah, bh))
    return Interval(lo, hi)


def sqr(a: Interval) -> Interval:
    if a.is_empty:
        return EMPTY
    if a.lo >= 0.0:
        return Interval(_mul_down(a.lo, a.lo), _mul_up(a.hi, a.hi))
    if a.hi <= 0.0:
        return Interval(_mul_down(a.hi, a.hi), _mul_up(a.lo, a.lo))
    return Interval(0.0, max(_mul_up(a.lo, a.lo), _mul_up(a.hi, a.hi)))


def div(a: Interval, b: Interval) -> Interval:
    if a.is_empty or b.is_empty:
        return EMPTY
    if b.lo <= 0.0 <= b.hi:
        raise DivByZeroSpan(f"division by {b!r} which contains zero")
    al, ah, bl, bh = a.lo, a.hi, b.lo, b.hi
    lo = min(
        _div_dir(al, bl, False),
        _div_dir(al, bh, False),
        _div_dir(ah, bl, False),
        _div_dir(ah, bh, False),
    )
    hi = max(
        _div_dir(al, bl, True),
        _div_dir(al, bh, True),
        _div_dir(ah, bl, True),
        _div_dir(ah, bh, True),
    )
    return Interval(lo, hi)


def hull(a: Interval, b: Interval) -> Interval:
    if a.is_empty:
        return b
    if b.is_empty:
        return a
    return Interval(min(a.lo, b.lo), max(a.hi, b.hi))


def intersect(a: Interval, b: Interval) -> Interval:
    if a.is_empty or b.is_empty:
        return EMPTY
    lo = max(a.lo, b.lo)
    hi = min(a.hi, b.hi)
    if lo > hi:
        return EMPTY
    return Interval(lo, hi)


def sqrt(a: Interval) -> Interval:
    if a.is_empty:
        return EMPTY
    if a.lo < 0.0:
        raise DomainError(f"sqrt of {a!r} with negative lower endpoint")
    return Interval(_sqrt_dir(a.lo, False), _sqrt_dir(a.hi, True))


def _sqrt_dir(x: float, up: bool) -> float:
    if x == 0.0:
        return 0.0
    if x == _INF:
        return _INF
    s = math.sqrt(x)
    if _TINY < x < _BIG:
        p = s * s
        if p == x:
            e = _prod_err(s, s, p)
            if e == 0.0:
                return s
            s_low = e < 0.0  # s*s = x + e, so e < 0 means s < sqrt(x)
        else:
            # |e| is below the spacing between p and x, so p alone decides
            s_low = p < x
        if s_low != up:
            return s
        return math.nextafter(s, _INF if up else 0.0)
    # outside the residual-test band: trust correct rounding to one ulp
    return math.nextafter(s, _INF if up else 0.0)


def exp(a: Interval) -> Interval:
    if a.is_empty:
        return EMPTY
    try:
        xl = math.exp(a.lo)
    except OverflowError:
        xl = _INF
    try:
        xh = math.exp(a.hi)
    except OverflowError:
        xh = _INF
    lo = _MAXF if xl == _INF else max(0.0, _nudge2_down(xl))
    hi = _INF if xh == _INF else _nudge2_up(xh)
    return Interval(lo, hi)


def ln(a: Interval) -> Interval:
    if a.is_empty:
        return EMPTY
    if a.lo < 0.0:
        raise DomainError(f"ln of {a!r} with negative lower endpoint")
    if a.hi <= 0.0:
        raise DomainError("ln of an interval with no positive points")
    lo = -_INF if a.lo == 0.0 else _nudge2_down(math.log(a.lo))
    hi = _INF if a.hi == _INF else _nudge2_up(math.log(a.hi))
    return Interval(lo, hi)


def atan(a: Interval) -> Interval:
    if a.is_empty:
        return EMPTY
    return Interval(_nudge2_down(math.atan(a.lo)), _nudge2_up(math.atan(a.hi)))


# Rigorous pi: math.pi is provably below the true value.
_PI_LO = math.pi
_PI_HI = math.nextafter(math.pi, _INF)
PI = Interval(_PI_LO, _PI_HI)
TWO_PI = Interval(2.0 * math.pi, math.nextafter(2.0 * math.pi, _INF))
HALF_PI = Interval(0.5 * math.pi, math.nextafter(0.5 * math.pi, _INF))


def _pi_mult(m: float) -> tuple[float, float]:
    """Enclosure of m * pi for an exactly representable multiplier m."""
    if m >= 0.0:
        return _mul_down(_PI_LO, m), _mul_up(_PI_HI, m)
    return _mul_down(_PI_HI, m), _mul_up(_PI_LO, m)


def _crosses(lo: float, hi: float, offset: float) -> bool:
    """Whether pi*(2n + offset) possibly lies in [lo, hi] for some integer n."""
    n_min = int(math.floor((lo / math.pi - offset) * 0.5)) - 1
    n_max = int(math.ceil((hi / math.pi - offset) * 0.5)) + 1
    for n in range(n_min, n_max + 1):
        tlo, thi = _pi_mult(2.0 * n + offset)
        if tlo <= hi and thi >= lo:
            return True
    return False


def _sin_pt(x: float) -> tuple[float, float]:
    v = math.sin(x)
    return max(-1.0, _nudge2_down(v)), min(1.0, _nudge2_up(v))


def _cos_pt(x: float) -> tuple[float, float]:
    v = math.cos(x)
    return max(-1.0, _nudge2_down(v)), min(1.0, _nudge2_up(v))


def sin(a: Interval) -> Interval:
    if a.is_empty:
        return EMPTY
    if abs(a.lo) > _SINCOS_MAX or abs(a.hi) > _SINCOS_MAX:
        raise DomainError(f"sin argument {a!r} beyond |x| <= 2**15")
    if a.hi - a.lo > 6.3:  # wider than one period
        return Interval(-1.0, 1.0)
    l0, h0 = _sin_pt(a.lo)
    l1, h1 = _sin_pt(a.hi)
    lo = min(l0, l1)
    hi = max(h0, h1)
    if _crosses(a.lo, a.hi, 0.5):  # pi/2 + 2 pi n: maxima
        hi = 1.0
    if _crosses(a.lo, a.hi, -0.5):  # -pi/2 + 2 pi n: minima
        lo = -1.0
    return Interval(lo, hi)


def cos(a: Interval) -> Interval:
    if a.is_empty:
        return EMPTY
    if abs(a.lo) > _SINCOS_MAX or abs(a.hi) > _SINCOS_MAX:
        raise DomainError(f"cos argument {a!r} beyond |x| <= 2**15")
    if a.hi - a.lo > 6.3:
        return Interval(-1.0, 1.0)
    l0, h0 = _cos_pt(a.lo)
    l1, h1 = _cos_pt(a.hi)
    lo = min(l0, l1)
    hi = max(h0, h1)
    if _crosses(a.lo, a.hi, 0.0):  # 2 pi n: maxima
        hi = 1.0
    if _crosses(a.lo, a.hi, 1.0):  # pi + 2 pi n: minima
        lo = -1.0
    return Interval(lo, hi)


def ipow(a: Interval, e) -> Interval:
    """a**e. Integer exponents use repeated multiplication (negative allowed
    when 0 is outside a); non-integer exponents require a.lo > 0 and go
    through exp(e * ln(a))."""
    if a.is_empty:
        return EMPTY
    if isinstance(e, (int, float)) and float(e) == int(e):
        n = int(e)
        if n == 0:
            return Interval(1.0)
        if n < 0:
            return div(Interval(1.0), ipow(a, -n))
        acc = a
        for _ in range(n - 1):
            acc = mul(acc, a)
        return acc
    if a.lo <= 0.0:
        raise DomainError("non-integer power of an interval touching zero")
    e_iv = _coerce(e)
    return exp(mul(e_iv, ln(a)))


class ComplexInterval:
    """Axis-aligned rectangle in the complex plane: re x im."""

    __slots__ = ("re", "im")

    def __init__(self, re: Interval, im: Interval):
        if not isinstance(re, Interval) or not isinstance(im, Interval):
            raise ArgumentError("ComplexInterval parts must be Interval")
        object.__setattr__(self, "re", re)
        object.__setattr__(self, "im", im)

    def __setattr__(self, name, value):
        raise AttributeError("ComplexInterval is immutable")

    @classmethod
    def from_complex(cls, z: complex) -> "ComplexInterval":
        return cls(Interval(z.real), Interval(z.imag))

    @classmethod
    def zero(cls) -> "ComplexInterval":
        return cls(Interval(0.0), Interval(0.0))

    @property
    def is_empty(self) -> bool:
        return self.re.is_empty or self.im.is_empty

    def __add__(self, other: "ComplexInterval") -> "ComplexInterval":
        return ComplexInterval(add(self.re, other.re), add(self.im, other.im))

    def __sub__(self, other: "ComplexInterval") -> "ComplexInterval":
        return ComplexInterval(sub(self.re, other.re), sub(self.im, other.im))

    def __mul__(self, other: "ComplexInterval") -> "ComplexInterval":
        return ComplexInterval(
            sub(mul(self.re, other.re), mul(self.im, other.im)),
            add(mul(self.re, other.im), mul(self.im, other.re)),
        )

    def __neg__(self) -> "ComplexInterval":
        return ComplexInterval(neg(self.re), neg(self.im))

    def conj(self) -> "ComplexInterval":
        return ComplexInterval(self.re, neg(self.im))

    def mul_i(self) -> "ComplexInterval":
        """Multiplication by the imaginary unit (exact)."""
        return ComplexInterval(neg(self.im), self.re)

    def scale(self, r) -> "ComplexInterval":
        r_iv = _coerce(r)
        return ComplexInterval(mul(r_iv, self.re), mul(r_iv, self.im))

    def mid(self) -> complex:
        return complex(self.re.mid(), self.im.mid())

    def contains(self, z: complex) -> bool:
        return self.re.contains(z.real) and self.im.contains(z.imag)

    def modulus_upper(self) -> float:
        """Upper bound on |z| over the rectangle."""
        mr = self.re.mag()
        mi = self.im.mag()
        return _sqrt_dir(_add_up(_mul_up(mr, mr), _mul_up(mi, mi)), True)

    def modulus_lower(self) -> float:
        """Lower bound on |z| over the rectangle."""
        if self.is_empty:
            return 0.0
        mr = self.re.mig()
        mi = self.im.mig()
        return _sqrt_dir(_add_down(_mul_down(mr, mr), _mul_down(mi, mi)), False)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ComplexInterval):
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self) -> int:
        return hash((self.re, self.im))

    def __repr__(self) -> str:
        return f"({self.re!r} + i*{self.im!r})"


def scale_by_unit(theta: Interval, z: ComplexInterval) -> ComplexInterval:
    """Enclosure of {e^(i t) w : t in theta, w in z}.

    The arc of unit numbers is replaced by its rectangle hull
    cos(theta) x sin(theta) before the complex product, so the result is the
    rectangle product, not the tight arc image.
    """
    u = cos(theta)
    v = sin(theta)
    return ComplexInterval(
        sub(mul(u, z.re), mul(v, z.im)),
        add(mul(u, z.im), mul(v, z.re)),
    )


def complex_exp_neg(w: Interval) -> ComplexInterval:
    """Enclosure of e^(-i w) = cos w - i sin w."""
    return ComplexInterval(cos(w), neg(sin(w)))


class IntervalMatrix:
    """Dense matrix of Interval entries."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, data: list[list[Interval]]):
        rows = len(data)
        if rows == 0:
            raise ArgumentError("empty matrix")
        cols = len(data[0])
        for row in data:
            if len(row) != cols:
                raise ArgumentError("ragged matrix rows")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "data", data)

    def __setattr__(self, name, value):
        raise AttributeError("IntervalMatrix is immutable")

    @classmethod
    def from_point(cls, a) -> "IntervalMatrix":
        arr = np.asarray(a, dtype=float)
        if arr.ndim != 2:
            raise ArgumentError("expected a 2-d array")
        return cls([[Interval(float(v)) for v in row] for row in arr])

    @classmethod
    def identity(cls, n: int) -> "IntervalMatrix":
        one = Interval(1.0)
        zero = Interval(0.0)
        return cls([[one if i == j else zero for j in range(n)] for i in range(n)])

    def __sub__(self, other: "IntervalMatrix") -> "IntervalMatrix":
        if self.rows != other.rows or self.cols != other.cols:
            raise ArgumentError("matrix shape mismatch in subtraction")
        return IntervalMatrix(
            [
                [sub(self.data[i][j], other.data[i][j]) for j in range(self.cols)]
                for i in range(self.rows)
            ]
        )

    def matvec(self, v: list[Interval]) -> list[Interval]:
        if len(v) != self.cols:
            raise ArgumentError("matrix-vector length mismatch")
        out = []
        for i in range(self.rows):
            row = self.data[i]
            acc = Interval(0.0)
            for j in range(self.cols):
                acc = add(acc, mul(row[j], v[j]))
            out.append(acc)
        return out

    def mid_array(self) -> np.ndarray:
        return np.array(
            [[self.data[i][j].mid() for j in range(self.cols)] for i in range(self.rows)]
        )


def point_matvec(p, v: list[Interval]) -> list[Interval]:
    """Product of a float matrix with an interval vector."""
    arr = np.asarray(p, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != len(v):
        raise ArgumentError("matrix-vector shape mismatch")
    out = []
    for i in range(arr.shape[0]):
        acc = Interval(0.0)
        for j in range(arr.shape[1]):
            x = float(arr[i, j])
            if x != 0.0:
                acc = add(acc, mul(Interval(x), v[j]))
        out.append(acc)
    return out


def approx_mid_inverse(a) -> np.ndarray:
    """Approximate floating-point inverse of the midpoint of a square matrix.

    Purely numerical (no enclosure); rigor is recovered downstream through the
    residual term. Raises SingularMidpoint when the factorization fails or
    produces non-finite entries.
    """
    if isinstance(a, IntervalMatrix):
        if a.rows != a.cols:
            raise ArgumentError("inverse of a non-square matrix")
        mid = a.mid_array()
    else:
        mid = np.asarray(a, dtype=float)
        if mid.ndim != 2 or mid.shape[0] != mid.shape[1]:
            raise ArgumentError("inverse of a non-square matrix")
    if not np.all(np.isfinite(mid)):
        raise SingularMidpoint("midpoint matrix has non-finite entries")
    try:
        inv = np.linalg.inv(mid)
    except np.linalg.LinAlgError as exc:
        raise SingularMidpoint(str(exc)) from exc
    if not np.all(np.isfinite(inv)):
        raise SingularMidpoint("inverse has non-finite entries")
    return inv
