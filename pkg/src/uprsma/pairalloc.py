"""User pairing and min-max latency allocation for paired uplink RSMA.

For a latency bound tau every pair must carry (PL1/tau, PL2/tau).  The
point lies on one of three boundary segments of the pair's rate region:

* AB: user 2 at full power alone on top (p12 = 0), user 1 fills the rest;
* BC: both at full power on the sum-rate face;
* CD: user 1 entirely in the last-decoded stream (p11 = 0).

Each segment fixes one rate equation of the form
``B*alpha*log2(1 + c/(noise*B*alpha)) = R`` and hence a closed-form
bandwidth fraction; the segment whose powers respect the caps is the one
in use.  An outer bisection finds the smallest tau with sum(alpha) <= 1.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

from .rates import PairConfig, latency_of, pair_stream_rates
from .scene import Scenario
from .search import BisectionResult, bisect_latency
from .wmath import (LN2, BandwidthSolveInput, RateUnreachable, bandwidth_fraction,
                    solve_bandwidth_for_rate)

__all__ = [
    "RegionCase",
    "CaseAllocation",
    "AllocationSolution",
    "CaseMismatch",
    "PairInfeasibleAtTau",
    "DEFAULT_EPS",
    "POWER_RTOL",
    "pair_strong_weak",
    "case_alpha",
    "case_powers",
    "classify_and_allocate",
    "with_rates",
    "feasible_at_tau",
    "initial_latency_guess",
    "solve_min_latency",
]

DEFAULT_EPS = 1e-9
POWER_RTOL = 1e-9


class RegionCase(enum.Enum):
    AB = "AB"
    BC = "BC"
    CD = "CD"
    SINGLETON = "SINGLETON"


PROBE_ORDER = (RegionCase.AB, RegionCase.BC, RegionCase.CD)


class CaseMismatch(ValueError):
    """The equal-latency point does not lie on the probed segment."""


class PairInfeasibleAtTau(ValueError):
    """No segment of the pair's region supports the latency bound."""


@dataclass(frozen=True)
class CaseAllocation:
    pair: PairConfig
    case: RegionCase
    alpha: float
    p11: float
    p12: float
    p2: float
    r1: float = math.nan
    r2: float = math.nan


@dataclass
class AllocationSolution:
    tau: float
    allocations: list[CaseAllocation]
    sum_alpha: float
    iterations: int
    latencies: dict[int, float]
    bisection: Optional[BisectionResult] = field(default=None, repr=False)

    @property
    def max_latency(self) -> float:
        return max(self.latencies.values())

    @property
    def min_latency(self) -> float:
        return min(self.latencies.values())


def pair_strong_weak(scenario: Scenario) -> list[PairConfig]:
    """Pair the k-th strongest user with the k-th weakest.

    The stronger member of each pair is the split user.  With an odd number
    of users the median user is left as a singleton pair at the end.
    """
    ranked = sorted(scenario.users, key=lambda u: (-u.channel_gain, u.id))
    n = len(ranked)
    pairs = [PairConfig(ranked[k], ranked[n - 1 - k], k) for k in range(n // 2)]
    if n % 2:
        pairs.append(PairConfig(ranked[n // 2], None, n // 2))
    return pairs


def _segment_target(pair: PairConfig, case: RegionCase, tau: float) -> tuple[float, float]:
    u1, u2 = pair.user1, pair.user2
    if case is RegionCase.SINGLETON or u2 is None:
        if case not in (RegionCase.SINGLETON, RegionCase.CD):
            raise CaseMismatch(f"a singleton pair has no {case.value} segment")
        return u1.channel_gain * u1.p_max, u1.packet_bits / tau
    if case is RegionCase.AB:
        return u2.channel_gain * u2.p_max, u2.packet_bits / tau
    if case is RegionCase.BC:
        return (u1.channel_gain * u1.p_max + u2.channel_gain * u2.p_max,
                (u1.packet_bits + u2.packet_bits) / tau)
    if case is RegionCase.CD:
        return u1.channel_gain * u1.p_max, u1.packet_bits / tau
    raise ValueError(f"unknown case {case!r}")


def case_alpha(pair: PairConfig, case: RegionCase, tau: float,
               bandwidth_hz: float, noise_psd: float) -> float:
    """Bandwidth fraction that puts the pair exactly on ``case``'s segment at ``tau``.

    Raises :class:`~uprsma.wmath.RateUnreachable` when no bandwidth suffices.
    """
    if not tau > 0:
        raise ValueError("tau must be > 0")
    c, rate = _segment_target(pair, case, tau)
    alpha = bandwidth_fraction(c, rate, bandwidth_hz, noise_psd)
    if math.isnan(alpha):
        # re-run through the validating entry point for the error message
        solve_bandwidth_for_rate(BandwidthSolveInput(c, rate, bandwidth_hz, noise_psd))
    return alpha


def _pow2m1(x: float) -> float:
    # 2**x - 1; saturates to inf instead of raising for huge spectral efficiencies
    return math.expm1(LN2 * x) if x < 1000.0 else math.inf


def case_powers(pair: PairConfig, case: RegionCase, tau: float, alpha: float,
                bandwidth_hz: float, noise_psd: float,
                rtol: float = POWER_RTOL) -> tuple[float, float, float]:
    """Stream powers (p11, p12, p2) on the segment for a given alpha.

    Raises :class:`CaseMismatch` if the closed form needs a negative power.
    Upper caps are not checked here; see :func:`classify_and_allocate`.
    """
    u1, u2 = pair.user1, pair.user2
    bw = bandwidth_hz * alpha
    n0 = noise_psd * bw
    h1, P1 = u1.channel_gain, u1.p_max
    if case is RegionCase.SINGLETON or u2 is None:
        return 0.0, P1, 0.0
    h2, P2 = u2.channel_gain, u2.p_max
    pl1, pl2 = u1.packet_bits, u2.packet_bits

    if case is RegionCase.AB:
        p11 = _pow2m1(pl1 / (tau * bw)) * (h2 * P2 + n0) / h1
        return p11, 0.0, P2

    if case is RegionCase.BC:
        g2 = _pow2m1(pl2 / (tau * bw))
        if g2 <= 0.0:
            raise CaseMismatch("user 2 has no rate to carry on the sum-rate face")
        p12 = h2 * P2 / (h1 * g2) - n0 / h1
        if p12 < -rtol * P1:
            raise CaseMismatch(f"BC needs p12 = {p12:.3e} < 0")
        p12 = max(p12, 0.0)
        r12 = bw * math.log1p(h1 * p12 / n0) / LN2
        r11 = pl1 / tau - r12
        if r11 < 0.0:
            if -r11 > 1e-12 * (pl1 / tau):
                raise CaseMismatch(f"BC needs r11 = {r11:.3e} < 0")
            r11 = 0.0
        p11 = _pow2m1(r11 / bw) * (h2 * P2 + h1 * p12 + n0) / h1
        return p11, p12, P2

    if case is RegionCase.CD:
        p2 = _pow2m1(pl2 / (tau * bw)) * (h1 * P1 + n0) / h2
        return 0.0, P1, p2

    raise ValueError(f"unknown case {case!r}")


def _within_caps(pair: PairConfig, p11: float, p12: float, p2: float, rtol: float) -> bool:
    P1 = pair.user1.p_max
    if p11 < -rtol * P1 or p12 < -rtol * P1 or p11 + p12 > P1 * (1 + rtol):
        return False
    if pair.user2 is not None:
        P2 = pair.user2.p_max
        if p2 < -rtol * P2 or p2 > P2 * (1 + rtol):
            return False
    return True


def with_rates(alloc: CaseAllocation, bandwidth_hz: float, noise_psd: float) -> CaseAllocation:
    """Fill in the user rates achieved by an allocation's powers."""
    rates = pair_stream_rates(alloc.pair, alloc.alpha, max(alloc.p11, 0.0), max(alloc.p12, 0.0),
                              max(alloc.p2, 0.0), bandwidth_hz, noise_psd)
    return replace(alloc, r1=rates.r1, r2=rates.r2)


def classify_and_allocate(pair: PairConfig, tau: float, bandwidth_hz: float,
                          noise_psd: float, rtol: float = POWER_RTOL,
                          rates: bool = True) -> CaseAllocation:
    """First segment, probed in the order AB, BC, CD, whose powers fit the caps.

    With ``rates=False`` the achieved rates are left as NaN (cheaper inside
    the bisection).
    """
    if pair.user2 is None:
        try:
            alpha = case_alpha(pair, RegionCase.SINGLETON, tau, bandwidth_hz, noise_psd)
        except RateUnreachable as exc:
            raise PairInfeasibleAtTau(str(exc)) from None
        alloc = CaseAllocation(pair, RegionCase.SINGLETON, alpha, 0.0, pair.user1.p_max, 0.0)
        return with_rates(alloc, bandwidth_hz, noise_psd) if rates else alloc
    for case in PROBE_ORDER:
        try:
            alpha = case_alpha(pair, case, tau, bandwidth_hz, noise_psd)
            p11, p12, p2 = case_powers(pair, case, tau, alpha, bandwidth_hz, noise_psd, rtol)
        except (RateUnreachable, CaseMismatch):
            continue
        if _within_caps(pair, p11, p12, p2, rtol):
            alloc = CaseAllocation(pair, case, alpha, p11, p12, p2)
            return with_rates(alloc, bandwidth_hz, noise_psd) if rates else alloc
    raise PairInfeasibleAtTau(f"pair {pair.user_ids} cannot meet tau = {tau:.6g} s")


def feasible_at_tau(pairs: Sequence[PairConfig], tau: float, bandwidth_hz: float,
                    noise_psd: float, rates: bool = True
                    ) -> tuple[bool, Optional[list[CaseAllocation]], float]:
    """Allocate every pair at ``tau``; feasible iff all pairs fit and sum(alpha) <= 1."""
    allocations = []
    total = 0.0
    for pair in pairs:
        try:
            alloc = classify_and_allocate(pair, tau, bandwidth_hz, noise_psd, rates=rates)
        except PairInfeasibleAtTau:
            return False, None, math.inf
        allocations.append(alloc)
        total += alloc.alpha
    return total <= 1.0, allocations, total


def initial_latency_guess(scenario: Scenario) -> float:
    """Sum of each user's latency when alone on the full band at full power."""
    B, n0 = scenario.bandwidth_hz, scenario.noise_psd_w_per_hz
    total = 0.0
    for u in scenario.users:
        rate = B * math.log1p(u.channel_gain * u.p_max / (n0 * B)) / LN2
        total += u.packet_bits / rate
    return total


def solve_min_latency(scenario: Scenario, eps: float = DEFAULT_EPS,
                      bounds: Optional[tuple[float, float]] = None) -> AllocationSolution:
    """Bisection over the latency bound with per-pair closed-form allocations.

    Cost is O(M log2(width/eps)) for M pairs.  The returned allocation is
    the one computed at the final feasible upper bound.
    """
    pairs = pair_strong_weak(scenario)
    B, n0 = scenario.bandwidth_hz, scenario.noise_psd_w_per_hz

    def check(tau):
        ok, allocs, total = feasible_at_tau(pairs, tau, B, n0, rates=False)
        return ok, (allocs, total)

    result = bisect_latency(check, eps, initial_latency_guess(scenario), bounds)
    allocations, total = result.certificate
    allocations = [with_rates(a, B, n0) for a in allocations]
    latencies = {}
    for a in allocations:
        latencies[a.pair.user1.id] = latency_of(a.r1, a.pair.user1.packet_bits)
        if a.pair.user2 is not None:
            latencies[a.pair.user2.id] = latency_of(a.r2, a.pair.user2.packet_bits)
    return AllocationSolution(result.tau, allocations, total, result.iterations,
                              dict(sorted(latencies.items())), result)
