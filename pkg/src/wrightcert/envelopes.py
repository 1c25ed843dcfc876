"""Piecewise constant envelopes on a periodic function and its derivatives.

A bounding function stores, on a uniform grid over one period, a lower and
an upper step function enclosing one derivative order of a periodic
solution.  Given an envelope for the solution itself, every higher
derivative of the delay equation y'(t) = -alpha y(t-1)(1 + y(t)) can be
enclosed cell by cell, because differentiating the right hand side only
ever produces products of lower-order values at t and at t - 1.  The
delayed factor is read off through a periodic wrap that stays valid even
though the period is only known up to an interval.
"""

from __future__ import annotations

import math
from typing import Iterable

from . import interval as iv
from .errors import ArgumentError, HypothesisViolation, ShapeMismatch
from .interval import Interval

__all__ = [
    "BoundingFunction",
    "EnvelopeSet",
    "bootstrap_envelopes",
    "read_envelopes",
    "write_envelopes",
]

PROVENANCE_TAGS = ("RIGOROUS", "FIXTURE")


class BoundingFunction:
    """Step-function enclosure of one derivative order over [0, period.hi].

    ``lower`` and ``upper`` hold one value per grid cell; cell j covers
    times [j h, (j+1) h] with h = period.hi / n_time.  ``order`` is the
    derivative index the enclosure applies to.
    """

    __slots__ = ("lower", "upper", "period", "order", "_h")

    def __init__(self, lower, upper, period: Interval, order: int):
        lower = tuple(float(v) for v in lower)
        upper = tuple(float(v) for v in upper)
        if len(lower) != len(upper):
            raise ShapeMismatch("lower and upper must have one value per cell")
        if not lower:
            raise ArgumentError("bounding function needs at least one cell")
        for lo, hi in zip(lower, upper):
            if not (math.isfinite(lo) and math.isfinite(hi) and lo <= hi):
                raise ArgumentError(f"cell bounds [{lo}, {hi}] are not ordered")
        if not isinstance(period, Interval) or period.is_empty:
            raise ArgumentError("period must be a nonempty Interval")
        if not period.lo > 0.0:
            raise ArgumentError("period must be positive")
        if isinstance(order, bool) or not isinstance(order, int) or order < 0:
            raise ArgumentError("order must be a nonnegative integer")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "period", period)
        object.__setattr__(self, "order", order)
        object.__setattr__(
            self,
            "_h",
            iv.div(Interval(period.hi), Interval(float(len(lower)))),
        )

    def __setattr__(self, name, value):
        raise AttributeError("BoundingFunction is immutable")

    @property
    def n_time(self) -> int:
        return len(self.lower)

    def cell(self, j: int) -> Interval:
        """Value enclosure on cell j."""
        return Interval(self.lower[j], self.upper[j])

    def cell_edges(self, j: int) -> tuple[Interval, Interval]:
        """Enclosures of the two endpoints of cell j."""
        start = iv.mul(Interval(float(j)), self._h)
        end = iv.mul(Interval(float(j + 1)), self._h)
        return start, end

    def cell_span(self, j: int) -> Interval:
        """Enclosure of the times cell j covers."""
        start, end = self.cell_edges(j)
        return Interval(max(0.0, start.lo), end.hi)

    def query_hull(self, t: Interval) -> Interval:
        """Hull of every cell the time window touches.

        The window must meet [0, period.hi]; any part outside the grid is
        clipped, so callers wrapping near the period boundary may overshoot
        by rounding without widening the answer.
        """
        if not isinstance(t, Interval) or t.is_empty:
            raise ArgumentError("query window must be a nonempty Interval")
        if t.hi < 0.0 or t.lo > self.period.hi:
            raise ArgumentError(f"query window {t!r} misses the stored grid")
        q = iv.div(t, self._h)
        n = self.n_time
        i_lo = min(n - 1, max(0, math.floor(q.lo)))
        i_hi = min(n - 1, max(0, math.floor(q.hi)))
        lo = min(self.lower[i_lo : i_hi + 1])
        hi = max(self.upper[i_lo : i_hi + 1])
        return Interval(lo, hi)

    def query_delayed(self, t: Interval) -> Interval:
        """Value enclosure at time t - 1 under the periodic extension.

        Times that fall below zero are shifted up by one full period; since
        the period is an interval, the shifted window is the image under
        every admissible period, which keeps the enclosure valid.  The wrap
        needs period.lo > 1, otherwise the shifted window could still be
        negative.
        """
        if not isinstance(t, Interval) or t.is_empty:
            raise ArgumentError("query window must be a nonempty Interval")
        if t.lo < 0.0:
            raise ArgumentError("delay query expects a window inside [0, period.hi]")
        u = iv.sub(t, Interval(1.0))
        pieces = []
        if u.hi >= 0.0:
            pieces.append(self.query_hull(Interval(max(u.lo, 0.0), u.hi)))
        if u.lo < 0.0:
            if not self.period.lo > 1.0:
                raise HypothesisViolation(
                    "periodic wrap of the delayed argument needs period > 1"
                )
            wrapped = iv.add(Interval(u.lo, min(u.hi, 0.0)), self.period)
            pieces.append(self.query_hull(wrapped))
        out = pieces[0]
        for p in pieces[1:]:
            out = iv.hull(out, p)
        return out

    def __repr__(self) -> str:
        return (
            f"BoundingFunction(order={self.order}, n_time={self.n_time}, "
            f"period={self.period!r})"
        )


class EnvelopeSet:
    """Bounding functions for derivative orders 0..S on one shared grid.

    ``provenance`` records how the order-zero envelope was produced:
    RIGOROUS for a certified upstream enclosure, FIXTURE for the built-in
    non-rigorous generator.  Everything derived from a FIXTURE set is only
    conditionally rigorous and is reported as such.
    """

    __slots__ = ("orders", "provenance")

    def __init__(self, orders: Iterable[BoundingFunction], provenance: str = "FIXTURE"):
        orders = tuple(orders)
        if not orders:
            raise ArgumentError("envelope set needs at least order zero")
        head = orders[0]
        for s, env in enumerate(orders):
            if not isinstance(env, BoundingFunction):
                raise ArgumentError("orders must be BoundingFunction instances")
            if env.order != s:
                raise ArgumentError(
                    f"order {env.order} found where derivative index {s} belongs"
                )
            if env.n_time != head.n_time:
                raise ShapeMismatch("all orders must share one time grid")
            if env.period != head.period:
                raise ShapeMismatch("all orders must share one period interval")
        if provenance not in PROVENANCE_TAGS:
            raise ArgumentError(f"unknown provenance tag {provenance!r}")
        object.__setattr__(self, "orders", orders)
        object.__setattr__(self, "provenance", provenance)

    def __setattr__(self, name, value):
        raise AttributeError("EnvelopeSet is immutable")

    @property
    def S(self) -> int:
        return len(self.orders) - 1

    @property
    def period(self) -> Interval:
        return self.orders[0].period

    @property
    def n_time(self) -> int:
        return self.orders[0].n_time

    def __getitem__(self, s: int) -> BoundingFunction:
        return self.orders[s]

    def __iter__(self):
        return iter(self.orders)

    def __len__(self) -> int:
        return len(self.orders)

    def __repr__(self) -> str:
        return (
            f"EnvelopeSet(S={self.S}, n_time={self.n_time}, "
            f"period={self.period!r}, provenance={self.provenance!r})"
        )


def bootstrap_envelopes(
    Y0: BoundingFunction, alpha: Interval, S: int, provenance: str = "FIXTURE"
) -> EnvelopeSet:
    """Derivative envelopes up to order S from an order-zero envelope.

    Differentiating y'(t) = -alpha y(t-1)(1 + y(t)) another s - 1 times and
    expanding the product by the Leibniz rule gives

        y^(s)(t) = -alpha [ y^(s-1)(t-1) (1 + y(t))
                            + sum_{j=0}^{s-2} C(s-1, j) y^(j)(t-1) y^(s-1-j)(t) ],

    so each new order is a cellwise interval polynomial in the orders
    already built, with the delayed factors read through the periodic
    wrap.
    """
    if not isinstance(Y0, BoundingFunction) or Y0.order != 0:
        raise ArgumentError("bootstrap starts from an order-zero envelope")
    if not isinstance(alpha, Interval) or alpha.is_empty:
        raise ArgumentError("alpha must be a nonempty Interval")
    if isinstance(S, bool) or not isinstance(S, int) or S < 1:
        raise ArgumentError("S must be an integer >= 1")
    if not Y0.period.lo > 1.0:
        raise HypothesisViolation(
            "delayed factors wrap through the period, which must exceed 1"
        )
    neg_alpha = iv.neg(alpha)
    orders = [Y0]
    one = Interval(1.0)
    for s in range(1, S + 1):
        lower = []
        upper = []
        for j in range(Y0.n_time):
            span = Y0.cell_span(j)
            here = [orders[r].cell(j) for r in range(s)]
            delayed = [orders[r].query_delayed(span) for r in range(s)]
            total = iv.mul(delayed[s - 1], iv.add(one, here[0]))
            for r in range(s - 1):
                weight = Interval(float(math.comb(s - 1, r)))
                total = iv.add(
                    total, iv.mul(weight, iv.mul(delayed[r], here[s - 1 - r]))
                )
            value = iv.mul(neg_alpha, total)
            lower.append(value.lo)
            upper.append(value.hi)
        orders.append(BoundingFunction(lower, upper, Y0.period, s))
    return EnvelopeSet(orders, provenance=provenance)


def write_envelopes(path, env: EnvelopeSet) -> None:
    """Plain-text envelope file: a header line, then per-cell bounds.

    Header fields are n_time, S, the period endpoints, and the provenance
    tag; after it come (S + 1) blocks of n_time rows holding the lower and
    upper cell values of one derivative order each, floats as shortest
    round-trip text.
    """
    with open(path, "w", encoding="ascii") as fh:
        fh.write(
            f"{env.n_time} {env.S} {repr(env.period.lo)} {repr(env.period.hi)} "
            f"{env.provenance}\n"
        )
        for order in env:
            for lo, hi in zip(order.lower, order.upper):
                fh.write(f"{repr(lo)} {repr(hi)}\n")


def read_envelopes(path) -> EnvelopeSet:
    with open(path, "r", encoding="ascii") as fh:
        rows = [line.split() for line in fh if line.strip()]
    if not rows:
        raise ArgumentError("envelope file is empty")
    head = rows[0]
    if len(head) != 5:
        raise ArgumentError("envelope header needs n_time, S, L_lo, L_hi, provenance")
    try:
        n_time = int(head[0])
        S = int(head[1])
        period = Interval(float(head[2]), float(head[3]))
    except ValueError as exc:
        raise ArgumentError(f"bad envelope header: {exc}") from exc
    provenance = head[4]
    if n_time < 1 or S < 0:
        raise ArgumentError("envelope header has nonpositive grid or order count")
    body = rows[1:]
    if len(body) != (S + 1) * n_time:
        raise ArgumentError(
            f"envelope file has {len(body)} data rows, "
            f"expected {(S + 1) * n_time}"
        )
    orders = []
    for s in range(S + 1):
        block = body[s * n_time : (s + 1) * n_time]
        lower = []
        upper = []
        for row in block:
            if len(row) != 2:
                raise ArgumentError(f"envelope row {row!r} needs two fields")
            try:
                lower.append(float(row[0]))
                upper.append(float(row[1]))
            except ValueError as exc:
                raise ArgumentError(f"bad envelope row {row!r}") from exc
        orders.append(BoundingFunction(lower, upper, period, s))
    return EnvelopeSet(orders, provenance=provenance)
