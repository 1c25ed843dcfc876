"""Floating-point branch solver and fixture envelope generator.

Nothing in this module is rigorous.  The solver runs damped Newton
iteration on the truncated zero problem in double precision, and the
envelope generator samples the resulting trigonometric polynomials and
inflates them by a margin.  Their outputs seed and exercise the rigorous
machinery; any certificate that consumed a fixture envelope is only
conditionally rigorous, and the envelope files say so in their
provenance tag.
"""

from __future__ import annotations

import math

import numpy as np

from . import interval as iv
from .envelopes import BoundingFunction, EnvelopeSet, bootstrap_envelopes
from .errors import ArgumentError, NoConvergence
from .interval import Interval

__all__ = ["fixture_envelopes", "oracle_solve_sops"]

_HALF_PI = 0.5 * math.pi


def _two_sided(c: np.ndarray) -> np.ndarray:
    """Coefficients c_{-M..M} from c_1..c_M, with c_0 = 0."""
    M = len(c)
    full = np.zeros(2 * M + 1, dtype=complex)
    full[M + 1 :] = c
    full[:M] = np.conj(c[::-1])
    return full

def _residual(alpha: float, omega: float, c: np.ndarray) -> np.ndarray:
    """Modes 1..M of the zero problem at a point, as complex values."""
    M = len(c)
    j = np.arange(-M, M + 1)
    full = _two_sided(c)
    u = full * np.exp(-1j * omega * j)
    prod = np.convolve(u, full)
    k = np.arange(1, M + 1)
    lin = (1j * (omega / alpha) * k + np.exp(-1j * omega * k)) * c
    return lin + prod[2 * M + 1 : 3 * M + 1]


def _jacobian(alpha: float, omega: float, c: np.ndarray) -> np.ndarray:
    """Exact Jacobian of the interleaved real system at a point.

    Unknowns are ordered (omega, a_1, a_2, b_2, ..., a_M, b_M); the phase
    condition pins b_1 at zero, which keeps the system square.  Columns
    come from differentiating both the linear factor and the quadratic
    convolution, where a coefficient enters the two-sided sequence twice,
    as itself and as its conjugate.
    """
    M = len(c)
    j = np.arange(-M, M + 1)
    full = _two_sided(c)
    u = full * np.exp(-1j * omega * j)
    k = np.arange(1, M + 1)

    def C(n: np.ndarray) -> np.ndarray:
        inside = np.abs(n) <= M
        return np.where(inside, full[np.clip(n + M, 0, 2 * M)], 0.0)

    def E(n: np.ndarray) -> np.ndarray:
        return np.exp(-1j * omega * n)

    cols = np.zeros((M, 2 * M), dtype=complex)
    prod_w = np.convolve(u * (-1j * j), full)
    cols[:, 0] = (1j * k / alpha - 1j * k * np.exp(-1j * omega * k)) * c
    cols[:, 0] += prod_w[2 * M + 1 : 3 * M + 1]
    lin = 1j * (omega / alpha) * k + np.exp(-1j * omega * k)
    for m in range(1, M + 1):
        down = C(k - m) * (E(np.full(M, m)) + E(k - m))
        up = C(k + m) * (E(np.full(M, -m)) + E(k + m))
        d_am = down + up
        d_bm = 1j * (down - up)
        d_am[m - 1] += lin[m - 1]
        d_bm[m - 1] += 1j * lin[m - 1]
        if m == 1:
            cols[:, 1] = d_am
        else:
            cols[:, 2 * m - 2] = d_am
            cols[:, 2 * m - 1] = d_bm

    jac = np.zeros((2 * M, 2 * M))
    jac[0::2, :] = cols.real
    jac[1::2, :] = cols.imag
    return jac


def _pack(omega: float, c: np.ndarray) -> np.ndarray:
    u = np.zeros(2 * len(c))
    u[0] = omega
    u[1] = c[0].real
    u[2::2] = c[1:].real
    u[3::2] = c[1:].imag
    return u


def _unpack(u: np.ndarray) -> tuple[float, np.ndarray]:
    M = len(u) // 2
    c = np.zeros(M, dtype=complex)
    c[0] = u[1]
    c[1:] = u[2::2] + 1j * u[3::2]
    return float(u[0]), c


def _newton(alpha: float, u0: np.ndarray, tol: float, max_iter: int = 60):
    u = u0.copy()
    for _ in range(max_iter):
        omega, c = _unpack(u)
        r = _residual(alpha, omega, c)
        flat = np.zeros(2 * len(c))
        flat[0::2] = r.real
        flat[1::2] = r.imag
        norm = float(np.max(np.abs(flat)))
        if norm < tol:
            return u
        try:
            step = np.linalg.solve(_jacobian(alpha, omega, c), -flat)
        except np.linalg.LinAlgError:
            return None
        lam = 1.0
        for _ in range(30):
            trial = u + lam * step
            t_omega, t_c = _unpack(trial)
            t_r = _residual(alpha, t_omega, t_c)
            if float(np.max(np.abs(np.concatenate([t_r.real, t_r.imag])))) < norm:
                u = trial
                break
            lam *= 0.5
        else:
            return None
    omega, c = _unpack(u)
    r = _residual(alpha, omega, c)
    if float(np.max(np.abs(np.concatenate([r.real, r.imag])))) < tol:
        return u
    return None


def _normalize(u: np.ndarray) -> np.ndarray:
    """Canonical representative: omega > 0 and a_1 > 0.

    Conjugating flips the frequency sign; shifting time by half a period
    multiplies mode k by (-1)^k and repairs a negative first coefficient.
    """
    omega, c = _unpack(u)
    if omega < 0.0:
        omega = -omega
        c = np.conj(c)
    if c[0].real < 0.0:
        c = c * (-1.0) ** np.arange(1, len(c) + 1)
    return _pack(omega, c)


def oracle_solve_sops(alpha: float, M: int, tol: float = 1e-12):
    """Double-precision branch point: (omega, c_1..c_M) with b_1 = 0, a_1 > 0.

    Seeds with the first-order small-amplitude ansatz at the bifurcation,
    where the frequency is pi/2 and the amplitude grows like the square
    root of the distance to the critical parameter; when the direct solve
    loses the branch, parameter continuation walks toward the target.
    The returned point satisfies the truncated equations to ``tol`` in the
    max norm, which the caller can recheck by evaluation.
    """
    alpha = float(alpha)
    if not alpha > _HALF_PI + 1e-3:
        raise ArgumentError("the branch exists only for alpha > pi/2 + 1e-3")
    if isinstance(M, bool) or not isinstance(M, int) or M < 1:
        raise ArgumentError("M must be an integer >= 1")

    def seed_at(a: float) -> np.ndarray:
        u = np.zeros(2 * M)
        u[0] = _HALF_PI
        u[1] = math.sqrt(a - _HALF_PI)
        return u

    direct = _newton(alpha, seed_at(alpha), tol)
    if direct is not None and abs(direct[1]) > 1e-6:
        direct = _normalize(direct)
        return float(direct[0]), _unpack(direct)[1]

    a_cur = _HALF_PI + 0.05
    u = _newton(a_cur, seed_at(a_cur), tol)
    if u is None or abs(u[1]) <= 1e-6:
        raise NoConvergence("no nonzero solution at the continuation start")
    step = 0.05
    while a_cur < alpha - 1e-12:
        a_next = min(alpha, a_cur + step)
        nxt = _newton(a_next, u, tol)
        if nxt is None or abs(nxt[1]) < 1e-6:
            step *= 0.5
            if step < 1e-5:
                raise NoConvergence(
                    f"continuation lost the branch near alpha={a_next}"
                )
            continue
        u, a_cur = nxt, a_next
        step = min(1.5 * step, 0.05)
    u = _normalize(u)
    return float(u[0]), _unpack(u)[1]


def fixture_envelopes(
    alpha: Interval,
    M: int,
    S: int,
    *,
    n_time: int = 256,
    n_alpha: int = 7,
    margin: float = 0.02,
) -> EnvelopeSet:
    """NON-RIGOROUS envelope set around the sampled branch over ``alpha``.

    The branch is solved at ``n_alpha`` parameter values, the logarithmic
    variable x = ln(1 + y) is sampled on every cell across all samples,
    and the sampled range is inflated by ``margin`` on each side.  Mapping
    the inflated cells back through y = e^x - 1 uses outward-rounded
    exponentials, and the derivative orders come from the rigorous
    bootstrap, so the single leap of faith is the claim that the sampled,
    inflated cells really cover the solution family.  The provenance tag
    FIXTURE records that claim.
    """
    if not isinstance(alpha, Interval) or alpha.is_empty:
        raise ArgumentError("alpha must be a nonempty Interval")
    if isinstance(S, bool) or not isinstance(S, int) or S < 1:
        raise ArgumentError("S must be an integer >= 1")
    if isinstance(n_alpha, bool) or not isinstance(n_alpha, int) or n_alpha < 1:
        raise ArgumentError("n_alpha must be an integer >= 1")
    if isinstance(n_time, bool) or not isinstance(n_time, int) or n_time < 2:
        raise ArgumentError("n_time must be an integer >= 2")
    if not margin > 0.0:
        raise ArgumentError("margin must be positive")

    if n_alpha == 1:
        samples = [alpha.mid()]
    else:
        w = alpha.hi - alpha.lo
        samples = [alpha.lo + w * i / (n_alpha - 1) for i in range(n_alpha)]
    branch = [oracle_solve_sops(a, M) for a in samples]

    periods = [2.0 * math.pi / omega for omega, _ in branch]
    spread = max(periods) - min(periods)
    pad = max(1e-6, spread / max(1, n_alpha - 1))
    period = Interval(min(periods) - pad, max(periods) + pad)

    h = period.hi / n_time
    k = np.arange(1, M + 1)
    lo_cells, hi_cells = [], []
    for j in range(n_time):
        t = np.linspace(j * h, (j + 1) * h, 9)
        worst_lo, worst_hi = math.inf, -math.inf
        for omega, c in branch:
            y = 2.0 * np.real(np.exp(1j * omega * np.outer(t, k)) @ c)
            x = np.log1p(y)
            worst_lo = min(worst_lo, float(np.min(x)))
            worst_hi = max(worst_hi, float(np.max(x)))
        lo_cells.append(worst_lo - margin)
        hi_cells.append(worst_hi + margin)

    y_lo, y_hi = [], []
    for lo, hi in zip(lo_cells, hi_cells):
        y_lo.append(iv.sub(iv.exp(Interval(lo)), Interval(1.0)).lo)
        y_hi.append(iv.sub(iv.exp(Interval(hi)), Interval(1.0)).hi)
    Y0 = BoundingFunction(y_lo, y_hi, period, 0)
    return bootstrap_envelopes(Y0, alpha, S, provenance="FIXTURE")
