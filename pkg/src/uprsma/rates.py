"""Uplink SIC rates: arbitrary decoding orders and the three-stream pair model.

Within a pair the split user (user 1) sends x11 and x12, user 2 sends x2,
and the base station decodes x11 -> x2 -> x12 on a bandwidth fraction alpha.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, NamedTuple, Optional

from .scene import UserRadio

__all__ = [
    "StreamId",
    "DecodingOrder",
    "PairConfig",
    "PairRates",
    "RegionVertices",
    "INFINITE_LATENCY",
    "sic_rate_vector",
    "per_user_rates",
    "pair_stream_rates",
    "region_vertices",
    "latency_of",
]

INFINITE_LATENCY = math.inf


class StreamId(NamedTuple):
    user: int
    part: int = 1


@dataclass(frozen=True)
class DecodingOrder:
    """Streams listed from first decoded to last decoded."""

    sequence: tuple[StreamId, ...]

    def __post_init__(self):
        seq = tuple(StreamId(*s) for s in self.sequence)
        object.__setattr__(self, "sequence", seq)
        if len(set(seq)) != len(seq):
            raise ValueError("decoding order contains duplicate streams")
        if any(s.part not in (1, 2) for s in seq):
            raise ValueError("stream part must be 1 or 2")

    def __iter__(self):
        return iter(self.sequence)

    def __len__(self):
        return len(self.sequence)


@dataclass(frozen=True)
class PairConfig:
    user1: UserRadio
    user2: Optional[UserRadio] = None
    index: int = 0

    def __post_init__(self):
        if self.user2 is not None and self.user2.id == self.user1.id:
            raise ValueError("a pair needs two distinct users")

    @property
    def is_singleton(self) -> bool:
        return self.user2 is None

    @property
    def user_ids(self) -> tuple[int, ...]:
        return (self.user1.id,) if self.user2 is None else (self.user1.id, self.user2.id)


@dataclass(frozen=True)
class PairRates:
    r11: float
    r2: float
    r12: float
    alpha: float

    @property
    def r1(self) -> float:
        return self.r11 + self.r12


class RegionVertices(NamedTuple):
    """(r1, r2) at the corners A, B, C, D of the two-user rate region."""

    a: tuple[float, float]
    b: tuple[float, float]
    c: tuple[float, float]
    d: tuple[float, float]

    @property
    def sum_rate(self) -> float:
        return self.b[0] + self.b[1]


def _shannon(bw: float, signal: float, interference: float) -> float:
    if signal <= 0.0:
        return 0.0
    return bw * math.log1p(signal / interference) / math.log(2.0)


def sic_rate_vector(received: Mapping[StreamId, float], order: DecodingOrder,
                    bandwidth_hz: float, noise_psd: float) -> dict[StreamId, float]:
    """Per-stream rates when streams are decoded in ``order``.

    ``received`` maps each stream to its received power h*p.  A stream only
    sees interference from streams decoded after it.
    """
    streams = list(order)
    if set(streams) != set(received):
        raise ValueError("decoding order does not cover exactly the given streams")
    rates = {}
    later = noise_psd * bandwidth_hz
    for s in reversed(streams):
        q = received[s]
        if q < 0:
            raise ValueError(f"negative received power for stream {s}")
        rates[s] = _shannon(bandwidth_hz, q, later)
        later += q
    return rates


def per_user_rates(stream_rates: Mapping[StreamId, float]) -> dict[int, float]:
    out: dict[int, float] = {}
    for s, r in stream_rates.items():
        out[s.user] = out.get(s.user, 0.0) + r
    return out


def pair_stream_rates(pair: PairConfig, alpha: float, p11: float, p12: float, p2: float,
                      bandwidth_hz: float, noise_psd: float) -> PairRates:
    if not alpha > 0:
        raise ValueError(f"alpha must be > 0, got {alpha!r}")
    if min(p11, p12, p2) < 0:
        raise ValueError("stream powers must be >= 0")
    bw = bandwidth_hz * alpha
    n0 = noise_psd * bw
    h1 = pair.user1.channel_gain
    q2 = 0.0 if pair.user2 is None else pair.user2.channel_gain * p2
    r12 = _shannon(bw, h1 * p12, n0)
    r2 = _shannon(bw, q2, h1 * p12 + n0)
    r11 = _shannon(bw, h1 * p11, q2 + h1 * p12 + n0)
    return PairRates(r11, r2, r12, alpha)


def region_vertices(pair: PairConfig, alpha: float, bandwidth_hz: float,
                    noise_psd: float) -> RegionVertices:
    """Corners of the pair's achievable region at full powers.

    A and D are the single-user maxima, B and C the ends of the sum-rate face.
    """
    if pair.user2 is None:
        raise ValueError("a singleton pair has no two-user region")
    p1, p2 = pair.user1.p_max, pair.user2.p_max
    ra = pair_stream_rates(pair, alpha, 0.0, 0.0, p2, bandwidth_hz, noise_psd)
    rb = pair_stream_rates(pair, alpha, p1, 0.0, p2, bandwidth_hz, noise_psd)
    rc = pair_stream_rates(pair, alpha, 0.0, p1, p2, bandwidth_hz, noise_psd)
    rd = pair_stream_rates(pair, alpha, 0.0, p1, 0.0, bandwidth_hz, noise_psd)
    return RegionVertices((ra.r1, ra.r2), (rb.r1, rb.r2), (rc.r1, rc.r2), (rd.r1, rd.r2))


def latency_of(rate_bps: float, packet_bits: float) -> float:
    if not rate_bps > 0:
        return INFINITE_LATENCY
    return packet_bits / rate_bps
