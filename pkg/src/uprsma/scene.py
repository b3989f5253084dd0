"""Users, scenarios and random drops over a single circular cell."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "UserRadio",
    "Scenario",
    "DropConfig",
    "dbm_to_watts",
    "watts_to_dbm",
    "channel_gain_from_distance",
    "generate_drop",
    "derive_seed",
    "scenario_to_dict",
    "scenario_from_dict",
    "save_scenario",
    "load_scenario",
]

MIN_DISTANCE_KM = 1e-3


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def watts_to_dbm(watts: float) -> float:
    return 10.0 * math.log10(watts) + 30.0


@dataclass(frozen=True)
class UserRadio:
    id: int
    channel_gain: float
    p_max: float
    packet_bits: int

    def __post_init__(self):
        if not self.channel_gain > 0:
            raise ValueError(f"user {self.id}: channel_gain must be > 0")
        if not self.p_max > 0:
            raise ValueError(f"user {self.id}: p_max must be > 0")
        if int(self.packet_bits) != self.packet_bits or self.packet_bits <= 0:
            raise ValueError(f"user {self.id}: packet_bits must be a positive integer")


@dataclass(frozen=True)
class Scenario:
    users: tuple[UserRadio, ...]
    bandwidth_hz: float = 1e6
    noise_psd_w_per_hz: float = dbm_to_watts(-174.0)
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "users", tuple(self.users))
        if not self.users:
            raise ValueError("scenario needs at least one user")
        if not self.bandwidth_hz > 0:
            raise ValueError("bandwidth_hz must be > 0")
        if not self.noise_psd_w_per_hz > 0:
            raise ValueError("noise_psd_w_per_hz must be > 0")
        if sorted(u.id for u in self.users) != list(range(len(self.users))):
            raise ValueError("user ids must be unique and contiguous from 0")

    @property
    def n_users(self) -> int:
        return len(self.users)

    def user(self, uid: int) -> UserRadio:
        for u in self.users:
            if u.id == uid:
                return u
        raise KeyError(uid)

    def with_packets_scaled(self, k: int) -> "Scenario":
        users = [UserRadio(u.id, u.channel_gain, u.p_max, u.packet_bits * k) for u in self.users]
        return Scenario(users, self.bandwidth_hz, self.noise_psd_w_per_hz, self.seed)


@dataclass(frozen=True)
class DropConfig:
    """Random drop parameters; defaults follow the 1 MHz / 200 m single-cell setup."""

    n_users: int = 4
    cell_radius_km: float = 0.2
    pl_intercept_db: float = 128.1
    pl_slope_db_per_decade: float = 37.6
    packet_bytes_min: int = 50
    packet_bytes_max: int = 1200
    p_max_dbm: float = 23.0
    seed: int = 0
    bandwidth_hz: float = 1e6
    noise_dbm_per_hz: float = -174.0

    def __post_init__(self):
        if int(self.n_users) != self.n_users or self.n_users < 1:
            raise ValueError("n_users must be an integer >= 1")
        if not self.cell_radius_km > 0:
            raise ValueError("cell_radius_km must be > 0")
        if not 1 <= self.packet_bytes_min <= self.packet_bytes_max:
            raise ValueError("need 1 <= packet_bytes_min <= packet_bytes_max")
        if not self.bandwidth_hz > 0:
            raise ValueError("bandwidth_hz must be > 0")


def channel_gain_from_distance(d_km: float, cfg: DropConfig = DropConfig()) -> float:
    """Linear gain for the log-distance path loss ``intercept + slope*log10(d_km)``."""
    if not d_km > 0:
        raise ValueError(f"distance must be > 0 km, got {d_km!r}")
    pl_db = cfg.pl_intercept_db + cfg.pl_slope_db_per_decade * math.log10(d_km)
    return 10.0 ** (-pl_db / 10.0)


def derive_seed(*parts: int) -> int:
    """Deterministic 63-bit seed from a tuple of non-negative integers."""
    state = np.random.SeedSequence([int(p) for p in parts]).generate_state(2, np.uint32)
    return int((int(state[0]) << 31) ^ int(state[1]))


def generate_drop(cfg: DropConfig) -> Scenario:
    rng = np.random.default_rng(cfg.seed)
    # area-uniform over the disk
    d_km = cfg.cell_radius_km * np.sqrt(rng.random(cfg.n_users))
    d_km = np.maximum(d_km, MIN_DISTANCE_KM)
    packet_bytes = rng.integers(cfg.packet_bytes_min, cfg.packet_bytes_max + 1, size=cfg.n_users)
    p_max = dbm_to_watts(cfg.p_max_dbm)
    users = [
        UserRadio(i, channel_gain_from_distance(float(d), cfg), p_max, 8 * int(b))
        for i, (d, b) in enumerate(zip(d_km, packet_bytes))
    ]
    return Scenario(users, cfg.bandwidth_hz, dbm_to_watts(cfg.noise_dbm_per_hz), cfg.seed)


def scenario_to_dict(scn: Scenario) -> dict:
    users = []
    for u in scn.users:
        if u.packet_bits % 8:
            raise ValueError(f"user {u.id}: packet_bits {u.packet_bits} is not whole bytes")
        users.append({
            "id": u.id,
            "gain_linear": u.channel_gain,
            "p_max_dbm": watts_to_dbm(u.p_max),
            "packet_bytes": u.packet_bits // 8,
        })
    return {
        "bandwidth_hz": scn.bandwidth_hz,
        "noise_dbm_per_hz": watts_to_dbm(scn.noise_psd_w_per_hz),
        "seed": scn.seed,
        "users": users,
    }


def scenario_from_dict(doc: dict, cfg: DropConfig = DropConfig()) -> Scenario:
    """Build a scenario from the JSON document layout.

    Each user carries exactly one of ``distance_km`` / ``gain_linear``;
    distances go through the path-loss model of ``cfg``.
    """
    try:
        users = []
        for entry in doc["users"]:
            has_d, has_g = "distance_km" in entry, "gain_linear" in entry
            if has_d == has_g:
                raise ValueError(
                    f"user {entry.get('id')}: give exactly one of distance_km / gain_linear")
            if has_d:
                d = max(float(entry["distance_km"]), MIN_DISTANCE_KM)
                gain = channel_gain_from_distance(d, cfg)
            else:
                gain = float(entry["gain_linear"])
            packet_bytes = entry["packet_bytes"]
            if int(packet_bytes) != packet_bytes:
                raise ValueError(f"user {entry.get('id')}: packet_bytes must be an integer")
            users.append(UserRadio(int(entry["id"]), gain,
                                   dbm_to_watts(float(entry["p_max_dbm"])),
                                   8 * int(packet_bytes)))
        return Scenario(users, float(doc["bandwidth_hz"]),
                        dbm_to_watts(float(doc["noise_dbm_per_hz"])), int(doc.get("seed", 0)))
    except KeyError as exc:
        raise ValueError(f"scenario document is missing field {exc}") from None


def save_scenario(scn: Scenario, path) -> None:
    Path(path).write_text(json.dumps(scenario_to_dict(scn), indent=2) + "\n")


def load_scenario(path, cfg: DropConfig = DropConfig()) -> Scenario:
    return scenario_from_dict(json.loads(Path(path).read_text()), cfg)
