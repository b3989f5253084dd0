"""Min-max latency resource allocation for paired uplink RSMA, with baselines."""

from .pairalloc import AllocationSolution, RegionCase, pair_strong_weak, solve_min_latency
from .scene import DropConfig, Scenario, UserRadio, generate_drop, load_scenario, save_scenario

__version__ = "0.1.0"

__all__ = [
    "AllocationSolution",
    "DropConfig",
    "RegionCase",
    "Scenario",
    "UserRadio",
    "generate_drop",
    "load_scenario",
    "pair_strong_weak",
    "save_scenario",
    "solve_min_latency",
]
