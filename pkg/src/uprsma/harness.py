"""Monte Carlo sweeps, convergence traces, timing runs and their CSV/SVG output."""

from __future__ import annotations

import csv
import math
import statistics
import time
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from . import baselines as bl  # noqa: E402
from .pairalloc import DEFAULT_EPS, solve_min_latency  # noqa: E402
from .scene import DropConfig, Scenario, derive_seed, generate_drop  # noqa: E402
from .search import BisectionStep  # noqa: E402

__all__ = [
    "ConfigError",
    "SCHEMES",
    "SCHEME_CAPS",
    "SweepSpec",
    "ResultRow",
    "BenchEntry",
    "CSV_HEADER",
    "run_scheme",
    "run_sweep",
    "run_convergence_trace",
    "trace_rows",
    "run_bench",
    "emit_csv",
    "read_csv",
    "emit_svg_plot",
]

SCHEMES = (
    "paired-rsma",
    "unpaired-rsma-oracle",
    "rsma-suboptimal",
    "paired-noma",
    "unpaired-noma",
    "rsma-enumeration",
)
SCHEME_CAPS = {
    "unpaired-rsma-oracle": bl.ORACLE_MAX_USERS,
    "rsma-enumeration": bl.ENUMERATION_MAX_USERS,
}
DEFAULT_SCHEMES = ("paired-rsma", "unpaired-rsma-oracle", "rsma-suboptimal",
                   "paired-noma", "unpaired-noma")
SWEEP_KINDS = ("power", "users")

CSV_HEADER = ["scheme", "sweep_kind", "sweep_value", "trial", "seed", "tau_s",
              "sum_alpha", "iterations", "wall_time_s"]


class ConfigError(ValueError):
    """Unsupported scheme, size or sweep layout."""


@dataclass(frozen=True)
class ResultRow:
    scheme: str
    sweep_kind: str
    sweep_value: float
    trial: int
    seed: int
    tau_s: float
    sum_alpha: Optional[float] = None
    iterations: int = 0
    wall_time_s: Optional[float] = None


@dataclass(frozen=True)
class SweepSpec:
    kind: str
    values: tuple
    trials: int = 20
    schemes: tuple = DEFAULT_SCHEMES
    base: DropConfig = field(default_factory=DropConfig)
    eps: float = DEFAULT_EPS
    split_ratio: float = 0.5
    enumeration_grid: int = 200
    record_time: bool = False

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        object.__setattr__(self, "schemes", tuple(self.schemes))
        if self.kind not in SWEEP_KINDS:
            raise ConfigError(f"sweep kind must be one of {SWEEP_KINDS}, got {self.kind!r}")
        if not self.values:
            raise ConfigError("sweep grid is empty")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if not self.schemes:
            raise ConfigError("no schemes selected")
        for s in self.schemes:
            if s not in SCHEMES:
                raise ConfigError(f"unknown scheme {s!r}; choose from {', '.join(SCHEMES)}")

    def drop_config(self, point: int, trial: int) -> DropConfig:
        value = self.values[point]
        if self.kind == "power":
            # same drops at every power level (common random numbers)
            seed = derive_seed(self.base.seed, 0, trial)
            return replace(self.base, p_max_dbm=float(value), seed=seed)
        seed = derive_seed(self.base.seed, point, trial)
        return replace(self.base, n_users=int(value), seed=seed)


def check_caps(schemes: Sequence[str], n_users: int):
    for s in schemes:
        cap = SCHEME_CAPS.get(s)
        if cap is not None and n_users > cap:
            raise ConfigError(f"scheme {s} is capped at N <= {cap} users (requested N = {n_users})")


def run_scheme(name: str, scenario: Scenario, eps: float = DEFAULT_EPS,
               split_ratio: float = 0.5, enumeration_grid: int = 200):
    """Solve one scenario with one scheme; returns (tau, sum_alpha, iterations, solution)."""
    if name == "paired-rsma":
        sol = solve_min_latency(scenario, eps)
        return sol.tau, sol.sum_alpha, sol.iterations, sol
    runners: dict[str, Callable] = {
        "unpaired-rsma-oracle": lambda: bl.rsma_unpaired_oracle_solve(scenario, eps),
        "rsma-suboptimal": lambda: bl.rsma_suboptimal_solve(scenario, split_ratio, eps),
        "paired-noma": lambda: bl.noma_paired_solve(scenario, eps),
        "unpaired-noma": lambda: bl.noma_unpaired_solve(scenario, eps),
        "rsma-enumeration": lambda: bl.rsma_order_enumeration_solve(scenario, enumeration_grid, eps),
    }
    if name not in runners:
        raise ConfigError(f"unknown scheme {name!r}")
    sol = runners[name]()
    return sol.tau, sol.sum_alpha, sol.iterations, sol


def run_sweep(spec: SweepSpec) -> list[ResultRow]:
    """Every grid point x trial x scheme on a freshly seeded drop."""
    for point in range(len(spec.values)):
        check_caps(spec.schemes, spec.drop_config(point, 0).n_users)
    rows = []
    for point, value in enumerate(spec.values):
        for trial in range(spec.trials):
            cfg = spec.drop_config(point, trial)
            scenario = generate_drop(cfg)
            for scheme in spec.schemes:
                t0 = time.perf_counter()
                tau, sum_alpha, iterations, _ = run_scheme(
                    scheme, scenario, spec.eps, spec.split_ratio, spec.enumeration_grid)
                wall = time.perf_counter() - t0
                rows.append(ResultRow(scheme, spec.kind, value, trial, cfg.seed, tau,
                                      None if sum_alpha is None else float(sum_alpha),
                                      iterations, wall if spec.record_time else None))
    rows.sort(key=lambda r: (r.scheme, r.sweep_value, r.trial))
    return rows


def run_convergence_trace(scenario: Scenario, eps: float = DEFAULT_EPS,
                          bounds: Optional[tuple[float, float]] = None) -> list[BisectionStep]:
    """Bisection bracket of the paired-RSMA solver, one entry per iteration.

    Entry 0 is the initial bracket.
    """
    sol = solve_min_latency(scenario, eps, bounds)
    b = sol.bisection
    start = BisectionStep(0, b.tau_lb0, b.tau_ub0, math.nan, True)
    return [start] + list(b.trace)


def trace_rows(steps: Sequence[BisectionStep], seed: int = 0) -> list[ResultRow]:
    return [ResultRow("paired-rsma", "convergence", s.iteration, 0, seed, s.tau_ub,
                      None, s.iteration, None) for s in steps]


@dataclass(frozen=True)
class BenchEntry:
    scheme: str
    n_users: int
    median_s: Optional[float]
    runs: int
    note: str = ""


def run_bench(n_list: Sequence[int], trials: int = 3, schemes: Sequence[str] = DEFAULT_SCHEMES,
              base: DropConfig = DropConfig(), eps: float = DEFAULT_EPS,
              split_ratio: float = 0.5) -> tuple[list[BenchEntry], list[ResultRow]]:
    """Median wall time per scheme and size; schemes over their cap are skipped."""
    entries, rows = [], []
    for point, n in enumerate(n_list):
        for scheme in schemes:
            cap = SCHEME_CAPS.get(scheme)
            if cap is not None and n > cap:
                entries.append(BenchEntry(scheme, n, None, 0, f"skipped: UnsupportedSize (N > {cap})"))
                continue
            times = []
            for trial in range(trials):
                cfg = replace(base, n_users=int(n), seed=derive_seed(base.seed, point, trial))
                scenario = generate_drop(cfg)
                t0 = time.perf_counter()
                tau, sum_alpha, iterations, _ = run_scheme(scheme, scenario, eps, split_ratio)
                dt = time.perf_counter() - t0
                times.append(dt)
                rows.append(ResultRow(scheme, "bench", int(n), trial, cfg.seed, tau,
                                      None if sum_alpha is None else float(sum_alpha),
                                      iterations, dt))
            entries.append(BenchEntry(scheme, n, statistics.median(times), trials))
    return entries, rows


# ---------------------------------------------------------------------- output

def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def emit_csv(rows: Sequence[ResultRow], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in rows:
            w.writerow([_fmt(getattr(r, k)) for k in CSV_HEADER])


def _num(text: str):
    if text == "":
        return None
    try:
        return int(text)
    except ValueError:
        return float(text)


def read_csv(path) -> list[ResultRow]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != CSV_HEADER:
            raise ConfigError(f"{path}: unexpected CSV header {reader.fieldnames}")
        rows = []
        for rec in reader:
            rows.append(ResultRow(
                rec["scheme"], rec["sweep_kind"], _num(rec["sweep_value"]), int(rec["trial"]),
                int(rec["seed"]), float(rec["tau_s"]), _num(rec["sum_alpha"]),
                int(rec["iterations"]), _num(rec["wall_time_s"])))
        return rows


_AXES = {
    "power": ("Maximum transmit power P_max (dBm)", "Max latency (ms)"),
    "users": ("Number of users N", "Max latency (ms)"),
    "convergence": ("Iteration", "Latency upper bound (ms)"),
    "bench": ("Number of users N", "Median solve time (s)"),
}


def emit_svg_plot(rows: Sequence[ResultRow], kind: str, path) -> None:
    """One line per scheme: trial mean with min/max whiskers."""
    if kind not in _AXES:
        raise ConfigError(f"plot kind must be one of {tuple(_AXES)}")
    series: dict[str, dict] = {}
    for r in rows:
        if kind == "bench":
            y = r.wall_time_s
        else:
            y = r.tau_s * 1e3
        if y is None:
            continue
        series.setdefault(r.scheme, {}).setdefault(r.sweep_value, []).append(y)

    with plt.rc_context({"svg.hashsalt": "uprsma", "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(6.4, 4.4))
        for scheme in sorted(series):
            pts = sorted(series[scheme].items())
            xs = [x for x, _ in pts]
            if kind == "bench":
                ys = [statistics.median(v) for _, v in pts]
            else:
                ys = [statistics.fmean(v) for _, v in pts]
            lo = [y - min(v) for y, (_, v) in zip(ys, pts)]
            hi = [max(v) - y for y, (_, v) in zip(ys, pts)]
            ax.errorbar(xs, ys, yerr=[lo, hi], marker="o", capsize=3, label=scheme)
        if kind == "bench":
            ax.set_yscale("log")
        xlabel, ylabel = _AXES[kind]
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        ax.grid(True, alpha=0.3)
        if series:
            ax.legend()
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
