"""Real branches of the Lambert-W function and the bandwidth-for-rate solver.

The solver inverts ``B*alpha*log2(1 + c/(noise*B*alpha)) = R`` for the
bandwidth fraction ``alpha``.  Writing ``a = ln2*R*noise/c`` the nontrivial
solution is

    alpha = -a*c / (noise*B*(W(-a*exp(-a)) + a))

where ``W = -a`` is always a (useless) root.  For ``0 < a < 1`` that trivial
root sits on the principal branch, so the lower branch ``W_{-1}`` is taken.
A finite ``alpha`` exists iff ``a < 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "RateUnreachable",
    "BandwidthSolveInput",
    "lambert_w0",
    "lambert_wm1",
    "solve_bandwidth_for_rate",
    "bandwidth_fraction",
    "rate_ceiling",
]

INV_E = math.exp(-1.0)
LN2 = math.log(2.0)

_MAX_ITER = 50
_BRANCH_GAP = 1e-12


class RateUnreachable(ValueError):
    """The target rate is at or above the infinite-bandwidth ceiling c/(noise*ln2)."""


def _branch_q(x: float) -> float:
    # 2*(e*x + 1): distance from the branch point, clamped for rounding
    q = 2.0 * (math.e * x + 1.0)
    if q < 0.0:
        if q > -1e-14:
            return 0.0
        raise ValueError(f"Lambert-W argument {x!r} is below -1/e")
    return q


def _halley(w: float, x: float) -> float:
    for _ in range(_MAX_ITER):
        ew = math.exp(w)
        f = w * ew - x
        wp1 = w + 1.0
        if wp1 == 0.0 or f == 0.0:
            return w
        step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1))
        w -= step
        if abs(step) <= 2e-16 * (1.0 + abs(w)):
            return w
    return w


def _halley_log(w: float, logx: float) -> float:
    # Solves w + ln|w| = ln|x|; used away from the branch point where
    # w*exp(w) would overflow or underflow.
    for _ in range(_MAX_ITER):
        h = w + math.log(abs(w)) - logx
        hp = 1.0 + 1.0 / w
        hpp = -1.0 / (w * w)
        step = h / hp / (1.0 - 0.5 * h * hpp / (hp * hp))
        w -= step
        if abs(step) <= 2e-16 * abs(w):
            return w
    return w


def _w0_scalar(x: float) -> float:
    if math.isnan(x):
        raise ValueError("Lambert-W argument is NaN")
    if x == 0.0:
        return 0.0
    if math.isinf(x):
        if x > 0:
            return math.inf
        raise ValueError("Lambert-W argument is -inf")
    q = _branch_q(x)
    if q == 0.0:
        return -1.0
    if abs(x) < 1e-4:
        w = x * (1.0 - x * (1.0 - x * (1.5 - x * 8.0 / 3.0)))
        return _halley(w, x)
    if q < 0.5:
        p = math.sqrt(q)
        w = -1.0 + p * (1.0 - p * (1.0 / 3.0 - p * 11.0 / 72.0))
        return _halley(w, x)
    if x > math.e:
        lx = math.log(x)
        w = lx - math.log(lx)
        return _halley_log(w, lx)
    l1 = math.log1p(x)
    w = l1 * (1.0 - math.log1p(l1) / (2.0 + l1))
    return _halley(w, x)


def _wm1_scalar(x: float) -> float:
    if math.isnan(x):
        raise ValueError("Lambert-W argument is NaN")
    if x >= 0.0:
        raise ValueError(f"W_-1 is defined on [-1/e, 0), got {x!r}")
    q = _branch_q(x)
    if q == 0.0:
        return -1.0
    if q < 0.5:
        p = math.sqrt(q)
        w = -1.0 - p * (1.0 + p * (1.0 / 3.0 + p * 11.0 / 72.0))
        return _halley(w, x)
    l1 = math.log(-x)
    l2 = math.log(-l1)
    w = l1 - l2 + l2 / l1
    if x > -0.25:
        return _halley_log(w, l1)
    return _halley(w, x)


def _apply(fn, x):
    if np.ndim(x) == 0:
        return fn(float(x))
    arr = np.asarray(x, dtype=float)
    return np.vectorize(fn, otypes=[float])(arr)


def lambert_w0(x):
    """Principal branch W_0 (w >= -1) for real ``x >= -1/e``.

    Accepts a scalar or an array; raises ``ValueError`` below the branch point.
    """
    return _apply(_w0_scalar, x)


def lambert_wm1(x):
    """Lower branch W_{-1} (w <= -1) for real ``-1/e <= x < 0``."""
    return _apply(_wm1_scalar, x)


@dataclass(frozen=True)
class BandwidthSolveInput:
    received_power_w: float
    target_rate_bps: float
    total_bandwidth_hz: float
    noise_psd_w_per_hz: float

    def __post_init__(self):
        for name in ("received_power_w", "target_rate_bps",
                     "total_bandwidth_hz", "noise_psd_w_per_hz"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise ValueError(f"{name} must be finite and > 0, got {v!r}")


def rate_ceiling(received_power_w: float, noise_psd_w_per_hz: float) -> float:
    """Rate reached as the bandwidth goes to infinity, c/(noise*ln2)."""
    return received_power_w / (noise_psd_w_per_hz * LN2)


def _normalized_bisect(a: float) -> float:
    # Solve x*ln(1 + 1/x) = a for x > 0; the left side rises from 0 to 1.
    lo, hi = 0.0, 1.0
    while hi * math.log1p(1.0 / hi) < a:
        hi *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if mid * math.log1p(1.0 / mid) < a:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _normalized_alpha(a: float) -> float:
    """x = noise*B*alpha/c solving x*ln(1 + 1/x) = a, for 0 < a < 1."""
    arg = -a * math.exp(-a)
    if arg + INV_E < _BRANCH_GAP:
        return _normalized_bisect(a)
    w = _wm1_scalar(arg)
    d = -(w + a)
    if d > 0.5:
        return a / d
    # W+a cancels badly as a -> 1; one or two Newton steps on
    # d - log1p(d/a) = 0 restore full relative precision in d.
    for _ in range(3):
        g = d - math.log1p(d / a)
        gp = 1.0 - 1.0 / (a + d)
        if gp <= 0.0:
            break
        step = g / gp
        if not (0.0 < d - step):
            break
        d -= step
        if abs(step) <= 1e-16 * d:
            break
    return a / d


def bandwidth_fraction(received_power_w: float, target_rate_bps: float,
                       total_bandwidth_hz: float, noise_psd_w_per_hz: float) -> float:
    """Scalar core of :func:`solve_bandwidth_for_rate`; no input validation.

    Returns ``nan`` when the rate is unreachable (``a >= 1``) and 0 for a zero rate.
    """
    if target_rate_bps <= 0.0:
        return 0.0
    a = LN2 * target_rate_bps * noise_psd_w_per_hz / received_power_w
    if not a < 1.0:
        return math.nan
    x = _normalized_alpha(a)
    return x * received_power_w / (noise_psd_w_per_hz * total_bandwidth_hz)


def solve_bandwidth_for_rate(inp: BandwidthSolveInput) -> float:
    """Smallest bandwidth fraction whose capacity equals the target rate.

    Raises :class:`RateUnreachable` when the target is at or above the
    infinite-bandwidth ceiling for this received power.
    """
    alpha = bandwidth_fraction(inp.received_power_w, inp.target_rate_bps,
                               inp.total_bandwidth_hz, inp.noise_psd_w_per_hz)
    if math.isnan(alpha):
        raise RateUnreachable(
            f"target {inp.target_rate_bps:.6g} bit/s >= ceiling "
            f"{rate_ceiling(inp.received_power_w, inp.noise_psd_w_per_hz):.6g} bit/s")
    return alpha
