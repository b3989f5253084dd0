"""Comparison schemes and brute-force oracles.

* unpaired / paired NOMA with exact back-substitution of SINR targets;
* the unpaired RSMA optimum via the MAC (polymatroid) capacity region;
* an enumeration over all RSMA decoding orders with gridded rate splits;
* a fixed-order, fixed-split RSMA heuristic (gain-ordered first parts,
  reverse-ordered second parts);
* a grid search over bandwidth shares and boundary points for the paired
  scheme, used to check the closed-form solver.

The NOMA pairing, the heuristic RSMA order and its split ratio are
reconstructions, not bit-exact reproductions of any published baseline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .pairalloc import initial_latency_guess, pair_strong_weak
from .rates import PairConfig, region_vertices
from .scene import Scenario, UserRadio
from .search import bisect_latency
from .wmath import LN2

__all__ = [
    "UnsupportedSize",
    "RateTargetVector",
    "BaselineSolution",
    "ORACLE_MAX_USERS",
    "ENUMERATION_MAX_USERS",
    "GRID_MAX_PAIRS",
    "backsub_stream_powers",
    "noma_backsub_feasible",
    "noma_unpaired_solve",
    "noma_paired_solve",
    "polymatroid_slack",
    "rsma_polymatroid_feasible",
    "rsma_oracle_tau_exact",
    "rsma_unpaired_oracle_solve",
    "canonical_orders",
    "rsma_order_enumeration_solve",
    "rsma_suboptimal_solve",
    "paired_grid_oracle",
]

ORACLE_MAX_USERS = 20
ENUMERATION_MAX_USERS = 3
GRID_MAX_PAIRS = 3
RATE_RTOL = 1e-12


class UnsupportedSize(ValueError):
    """The scheme's exhaustive search is capped below the requested size."""


@dataclass(frozen=True)
class RateTargetVector:
    targets: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(float(t) for t in self.targets))
        if any(t < 0 for t in self.targets):
            raise ValueError("rate targets must be >= 0")

    @classmethod
    def for_latency(cls, users: Sequence[UserRadio], tau: float) -> "RateTargetVector":
        return cls(tuple(u.packet_bits / tau for u in users))

    def __len__(self):
        return len(self.targets)

    def __getitem__(self, k):
        return self.targets[k]


@dataclass
class BaselineSolution:
    scheme: str
    tau: float
    powers: Optional[dict[int, float]] = None
    stream_powers: Optional[dict[tuple[int, int], float]] = None
    order: Optional[tuple] = None
    iterations: int = 0
    sum_alpha: Optional[float] = None
    diagnostics: dict = field(default_factory=dict)


def _pow2m1(x):
    # 2**x - 1, saturating to inf
    if np.ndim(x):
        with np.errstate(over="ignore"):
            return np.expm1(LN2 * np.asarray(x, dtype=float))
    return math.expm1(LN2 * x) if x < 1000.0 else math.inf


def backsub_stream_powers(gains: Sequence[float], rates: Sequence[float],
                          bandwidth_hz: float, noise_psd: float) -> list[float]:
    """Minimal stream powers meeting each rate, streams listed in decoding order.

    Walks from the last decoded stream to the first; each power is the
    unique value meeting its SINR target given the streams decoded after it.
    """
    powers = [0.0] * len(gains)
    later = noise_psd * bandwidth_hz
    for k in range(len(gains) - 1, -1, -1):
        gamma = _pow2m1(rates[k] / bandwidth_hz)
        powers[k] = gamma * later / gains[k]
        later += gains[k] * powers[k]
    return powers


def noma_backsub_feasible(users: Sequence[UserRadio], targets, bandwidth_hz: float,
                          noise_psd: float) -> tuple[bool, list[float]]:
    """Single-stream SIC with ``users`` listed first-decoded to last-decoded."""
    powers = backsub_stream_powers([u.channel_gain for u in users], list(targets),
                                   bandwidth_hz, noise_psd)
    ok = all(p <= u.p_max for p, u in zip(powers, users))
    return ok, powers


def _check_scale(scenario: Scenario, cap: int, name: str):
    if scenario.n_users > cap:
        raise UnsupportedSize(f"{name} supports at most {cap} users, got {scenario.n_users}")


# --------------------------------------------------------------------------- NOMA

def noma_unpaired_solve(scenario: Scenario, eps: float = 1e-9) -> BaselineSolution:
    """All users on the full band, decoded strongest first."""
    order = sorted(scenario.users, key=lambda u: (-u.channel_gain, u.id))
    B, n0 = scenario.bandwidth_hz, scenario.noise_psd_w_per_hz

    def check(tau):
        targets = [u.packet_bits / tau for u in order]
        return noma_backsub_feasible(order, targets, B, n0)

    res = bisect_latency(check, eps, initial_latency_guess(scenario))
    powers = {u.id: p for u, p in zip(order, res.certificate)}
    return BaselineSolution("unpaired-noma", res.tau, powers,
                            order=tuple(u.id for u in order), iterations=res.iterations)


def _noma_pair_arrays(pairs: Sequence[PairConfig]):
    h1 = np.array([p.user1.channel_gain for p in pairs])
    P1 = np.array([p.user1.p_max for p in pairs])
    L1 = np.array([p.user1.packet_bits for p in pairs], dtype=float)
    # singletons get a zero-rate dummy partner
    h2 = np.array([1.0 if p.user2 is None else p.user2.channel_gain for p in pairs])
    P2 = np.array([np.inf if p.user2 is None else p.user2.p_max for p in pairs])
    L2 = np.array([0.0 if p.user2 is None else p.user2.packet_bits for p in pairs])
    return h1, P1, L1, h2, P2, L2


def _noma_two_user_powers(alpha, tau, hf, Lf, hl, Ll, B, n0):
    # hf/Lf: first-decoded user, hl/Ll: last-decoded user
    bw = B * alpha
    noise = n0 * bw
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        pl = _pow2m1(Ll / (tau * bw)) * noise / hl
        pf = _pow2m1(Lf / (tau * bw)) * (hl * pl + noise) / hf
    return pf, pl


def _noma_min_alpha(arrs, tau, B, n0, iters=64):
    """Smallest alpha in (0, 1] per pair for both decoding orders; inf if none."""
    h1, P1, L1, h2, P2, L2 = arrs

    def ok(alpha, first_is_1):
        if first_is_1:
            pf, pl = _noma_two_user_powers(alpha, tau, h1, L1, h2, L2, B, n0)
            return (pf <= P1) & (pl <= P2)
        pf, pl = _noma_two_user_powers(alpha, tau, h2, L2, h1, L1, B, n0)
        return (pf <= P2) & (pl <= P1)

    best = np.full(h1.shape, np.inf)
    best_order = np.zeros(h1.shape, dtype=bool)
    for first_is_1 in (True, False):
        lo = np.zeros_like(h1)
        hi = np.ones_like(h1)
        fits = ok(hi, first_is_1)
        for _ in range(iters):
            mid = 0.5 * (lo + hi)
            good = ok(mid, first_is_1)
            hi = np.where(good, mid, hi)
            lo = np.where(good, lo, mid)
        alpha = np.where(fits, hi, np.inf)
        better = alpha < best
        best = np.where(better, alpha, best)
        best_order = np.where(better, first_is_1, best_order)
    return best, best_order


def noma_paired_solve(scenario: Scenario, eps: float = 1e-9) -> BaselineSolution:
    """Strong-weak pairs on orthogonal bands, NOMA inside each pair.

    For each latency bound every pair takes the smaller of the minimal
    bandwidth fractions over its two decoding orders.
    """
    pairs = pair_strong_weak(scenario)
    B, n0 = scenario.bandwidth_hz, scenario.noise_psd_w_per_hz
    arrs = _noma_pair_arrays(pairs)

    def check(tau):
        alpha, first_is_1 = _noma_min_alpha(arrs, tau, B, n0)
        total = float(np.sum(alpha))
        return total <= 1.0, (alpha, first_is_1, total)

    res = bisect_latency(check, eps, initial_latency_guess(scenario))
    alpha, first_is_1, total = res.certificate
    h1, P1, L1, h2, P2, L2 = arrs
    powers = {}
    for m, pair in enumerate(pairs):
        if first_is_1[m]:
            pf, pl = _noma_two_user_powers(alpha[m], res.tau, h1[m], L1[m], h2[m], L2[m], B, n0)
            p1, p2 = pf, pl
        else:
            pf, pl = _noma_two_user_powers(alpha[m], res.tau, h2[m], L2[m], h1[m], L1[m], B, n0)
            p1, p2 = pl, pf
        powers[pair.user1.id] = float(p1)
        if pair.user2 is not None:
            powers[pair.user2.id] = float(p2)
    orders = tuple(
        p.user_ids if f else tuple(reversed(p.user_ids)) for p, f in zip(pairs, first_is_1))
    return BaselineSolution("paired-noma", res.tau, dict(sorted(powers.items())), order=orders,
                            iterations=res.iterations, sum_alpha=total,
                            diagnostics={"alpha": [float(a) for a in alpha]})


# ------------------------------------------------------------ unpaired RSMA optimum

def _subset_sums(values: np.ndarray) -> np.ndarray:
    """Sums over all 2**n subsets, indexed by bitmask."""
    sums = np.zeros(1)
    for v in values:
        sums = np.concatenate([sums, sums + v])
    return sums


def _subset_capacities(scenario: Scenario) -> np.ndarray:
    B, n0 = scenario.bandwidth_hz, scenario.noise_psd_w_per_hz
    snr = _subset_sums(np.array([u.channel_gain * u.p_max for u in scenario.users])) / (n0 * B)
    return B * np.log1p(snr[1:]) / LN2


def polymatroid_slack(scenario: Scenario, targets) -> np.ndarray:
    """Capacity minus demanded rate for every nonempty user subset (2**N - 1 entries)."""
    _check_scale(scenario, ORACLE_MAX_USERS, "the polymatroid oracle")
    if len(targets) != scenario.n_users:
        raise ValueError("need one rate target per user")
    demand = _subset_sums(np.asarray(list(targets), dtype=float))[1:]
    return _subset_capacities(scenario) - demand


def rsma_polymatroid_feasible(scenario: Scenario, targets) -> bool:
    """Whether the rate vector lies in the MAC capacity region at full powers.

    With every user splittable into two streams any point of this region is
    reachable by some decoding order, so this is the exhaustive-order optimum.
    """
    slack = polymatroid_slack(scenario, targets)
    return bool(np.all(slack >= -RATE_RTOL * _subset_capacities(scenario)))


def rsma_oracle_tau_exact(scenario: Scenario) -> float:
    """max over subsets S of sum(PL_S) / capacity(S)."""
    _check_scale(scenario, ORACLE_MAX_USERS, "the polymatroid oracle")
    pl = _subset_sums(np.array([u.packet_bits for u in scenario.users], dtype=float))[1:]
    return float(np.max(pl / _subset_capacities(scenario)))


def rsma_unpaired_oracle_solve(scenario: Scenario, eps: float = 1e-9) -> BaselineSolution:
    _check_scale(scenario, ORACLE_MAX_USERS, "the polymatroid oracle")
    cap = _subset_capacities(scenario)
    pl = _subset_sums(np.array([u.packet_bits for u in scenario.users], dtype=float))[1:]

    def check(tau):
        return bool(np.all(pl / tau <= cap * (1 + RATE_RTOL))), None

    res = bisect_latency(check, eps, initial_latency_guess(scenario))
    return BaselineSolution("unpaired-rsma-oracle", res.tau, iterations=res.iterations,
                            diagnostics={"subsets": len(cap)})


# ------------------------------------------------------------- order enumeration

def canonical_orders(n_users: int) -> list[tuple[tuple[int, int], ...]]:
    """All decoding orders of 2N streams with each user's part 1 before its part 2.

    There are (2N)!/2**N of them.
    """
    out = []

    def rec(prefix, remaining):
        if not any(remaining):
            seen = set()
            order = []
            for u in prefix:
                part = 2 if u in seen else 1
                seen.add(u)
                order.append((u, part))
            out.append(tuple(order))
            return
        for u in range(n_users):
            if remaining[u]:
                remaining[u] -= 1
                prefix.append(u)
                rec(prefix, remaining)
                prefix.pop()
                remaining[u] += 1

    rec([], [2] * n_users)
    return out



def _greatest_grid_split(order, rho, gamma, grid):
    """Largest grid split vector (share of rate in part 1) meeting every power cap.

    Each user's power need rises with its own part-1 share and falls with
    every other user's, so the feasible grid points are closed under
    componentwise max and a downward fixed-point sweep from all-ones finds
    the greatest one.  Returns ``None`` if none exists.
    """
    n = len(rho)
    pos = {s: k for k, s in enumerate(order)}
    first = [pos[(u, 1)] for u in range(n)]
    second = [pos[(u, 2)] for u in range(n)]
    steps = grid - 1
    k = [steps] * n
    while True:
        changed = False
        for u in range(n):
            rates = np.empty(2 * n)
            for v in range(n):
                s = k[v] / steps
                rates[first[v]] = s * rho[v]
                rates[second[v]] = (1.0 - s) * rho[v]
            tails = np.concatenate([np.cumsum(rates[::-1])[::-1], [0.0]])
            s_u = k[u] / steps
            x = tails[first[u] + 1] - (1.0 - s_u) * rho[u]
            y = tails[second[u] + 1]
            need_all = 2.0 ** (x + rho[u]) - 2.0 ** y
            spread = 2.0 ** x - 2.0 ** y
            if spread <= 1e-12 * 2.0 ** x:
                if need_all > gamma[u] * (1 + 1e-12):
                    return None
                continue
            z_req = (need_all - gamma[u]) / spread
            if z_req <= 1.0:
                continue
            if z_req > 2.0 ** rho[u] * (1 + 1e-12):
                return None
            s_max = 1.0 - math.log2(z_req) / rho[u]
            k_max = math.floor(s_max * steps + 1e-9)
            if k_max < 0:
                return None
            if k_max < k[u]:
                k[u] = k_max
                changed = True
        if not changed:
            return [kv / steps for kv in k]


def _order_powers(order, users, rates_per_stream, B, n0):
    gains = [users[u].channel_gain for u, _ in order]
    return backsub_stream_powers(gains, rates_per_stream, B, n0)


def rsma_order_enumeration_solve(scenario: Scenario, split_grid_points: int = 1000,
                                 eps: float = 1e-9) -> BaselineSolution:
    """Brute force over every decoding order and every gridded rate split.

    The split of each user's rate is restricted to ``split_grid_points``
    evenly spaced shares in [0, 1].  For each order the best grid split is
    found exactly (see :func:`_greatest_grid_split`), which is equivalent to
    scanning the whole grid.
    """
    _check_scale(scenario, ENUMERATION_MAX_USERS, "order enumeration")
    if split_grid_points < 2:
        raise ValueError("split_grid_points must be >= 2")
    users = sorted(scenario.users, key=lambda u: u.id)
    B, n0 = scenario.bandwidth_hz, scenario.noise_psd_w_per_hz
    gamma = [u.channel_gain * u.p_max / (n0 * B) for u in users]
    total_cap = math.log2(1.0 + sum(gamma))
    orders = canonical_orders(len(users))

    def check(tau):
        rho = [u.packet_bits / (tau * B) for u in users]
        if sum(rho) > total_cap * (1 + 1e-12):
            return False, None
        for order in orders:
            split = _greatest_grid_split(order, rho, gamma, split_grid_points)
            if split is None:
                continue
            stream_rates = [(split[u] if part == 1 else 1.0 - split[u]) * rho[u] * B
                            for u, part in order]
            powers = _order_powers(order, users, stream_rates, B, n0)
            per_user = [0.0] * len(users)
            for (u, _), p in zip(order, powers):
                per_user[u] += p
            if all(p <= users[u].p_max * (1 + 1e-9) for u, p in enumerate(per_user)):
                return True, (order, split, powers)
        return False, None

    res = bisect_latency(check, eps, initial_latency_guess(scenario))
    order, split, powers = res.certificate
    stream_powers = {s: p for s, p in zip(order, powers)}
    per_user = {}
    for (u, _), p in stream_powers.items():
        per_user[u] = per_user.get(u, 0.0) + p
    return BaselineSolution("rsma-enumeration", res.tau, per_user, stream_powers, order,
                            res.iterations,
                            diagnostics={"orders": len(orders), "split": split,
                                         "split_grid_points": split_grid_points})


# ----------------------------------------------------------- heuristic RSMA order

def rsma_suboptimal_solve(scenario: Scenario, split_ratio: float = 0.5,
                          eps: float = 1e-9) -> BaselineSolution:
    """Every user split with a fixed rate share ``split_ratio`` in part 1.

    Decoding order: all part-1 streams by descending gain, then all part-2
    streams by ascending gain.
    """
    if not 0.0 <= split_ratio <= 1.0:
        raise ValueError("split_ratio must lie in [0, 1]")
    desc = sorted(scenario.users, key=lambda u: (-u.channel_gain, u.id))
    order = [(u, 1) for u in desc] + [(u, 2) for u in reversed(desc)]
    gains = [u.channel_gain for u, _ in order]
    B, n0 = scenario.bandwidth_hz, scenario.noise_psd_w_per_hz

    def check(tau):
        rates = [u.packet_bits / tau * (split_ratio if part == 1 else 1.0 - split_ratio)
                 for u, part in order]
        powers = backsub_stream_powers(gains, rates, B, n0)
        per_user = {}
        for (u, _), p in zip(order, powers):
            per_user[u.id] = per_user.get(u.id, 0.0) + p
        ok = all(per_user[u.id] <= u.p_max for u in desc)
        return ok, (powers, per_user)

    res = bisect_latency(check, eps, initial_latency_guess(scenario))
    powers, per_user = res.certificate
    stream_powers = {(u.id, part): p for (u, part), p in zip(order, powers)}
    return BaselineSolution("rsma-suboptimal", res.tau, dict(sorted(per_user.items())),
                            stream_powers, tuple((u.id, part) for u, part in order),
                            res.iterations, diagnostics={"split_ratio": split_ratio})


# ------------------------------------------------------------ paired grid oracle

def _pair_tau_table(pair: PairConfig, alphas: np.ndarray, split_grid: int,
                    B: float, n0: float) -> np.ndarray:
    """Best gridded equal-latency bound of one pair for each bandwidth share."""
    u1, u2 = pair.user1, pair.user2
    out = np.empty(len(alphas))
    if u2 is None:
        bw = B * alphas
        rate = bw * np.log1p(u1.channel_gain * u1.p_max / (n0 * bw)) / LN2
        return u1.packet_bits / rate
    frac = np.arange(1, split_grid + 1) / split_grid
    for i, a in enumerate(alphas):
        v = region_vertices(pair, float(a), B, n0)
        r1max, r2max, rsum = v.d[0], v.a[1], v.sum_rate
        r1 = frac * r1max
        r2 = np.minimum(r2max, rsum - r1)
        with np.errstate(divide="ignore"):
            tau = np.maximum(u1.packet_bits / r1, np.where(r2 > 0, u2.packet_bits / r2, np.inf))
        out[i] = tau.min()
    return out


def paired_grid_oracle(scenario: Scenario, alpha_grid: int = 400, split_grid: int = 400) -> float:
    """Grid upper bound on the paired-RSMA optimum.

    Bandwidth shares run over the simplex grid {k/alpha_grid}; leaving
    bandwidth unused never helps, so only full-simplex points are scanned.
    For each share the pair's rate pair is placed on its region boundary at
    user-1 rate ``j/split_grid`` of the maximum.
    """
    pairs = pair_strong_weak(scenario)
    M = len(pairs)
    if M > GRID_MAX_PAIRS:
        raise UnsupportedSize(f"grid oracle supports at most {GRID_MAX_PAIRS} pairs, got {M}")
    if alpha_grid < M:
        raise ValueError("alpha_grid must be at least the number of pairs")
    B, n0 = scenario.bandwidth_hz, scenario.noise_psd_w_per_hz
    alphas = np.arange(1, alpha_grid + 1) / alpha_grid
    tables = [_pair_tau_table(p, alphas, split_grid, B, n0) for p in pairs]
    G = alpha_grid
    if M == 1:
        return float(tables[0][G - 1])
    if M == 2:
        k = np.arange(1, G)
        return float(np.min(np.maximum(tables[0][k - 1], tables[1][G - k - 1])))
    k1, k2 = np.meshgrid(np.arange(1, G), np.arange(1, G), indexing="ij")
    k3 = G - k1 - k2
    valid = k3 >= 1
    t = np.maximum(tables[0][k1 - 1], tables[1][k2 - 1])
    t = np.maximum(t, tables[2][np.clip(k3, 1, G) - 1])
    return float(np.min(np.where(valid, t, np.inf)))
