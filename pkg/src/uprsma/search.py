"""Bisection on the latency bound, shared by the proposed solver and the baselines."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

__all__ = ["Unbounded", "BisectionStep", "BisectionResult", "bisect_latency", "iteration_count"]

MAX_DOUBLINGS = 60


class Unbounded(RuntimeError):
    """No feasible latency bound was found within the doubling cap."""


@dataclass(frozen=True)
class BisectionStep:
    iteration: int
    tau_lb: float
    tau_ub: float
    tau_mid: float
    feasible: bool


@dataclass
class BisectionResult:
    tau: float
    certificate: Any
    iterations: int
    tau_lb0: float
    tau_ub0: float
    doublings: int
    trace: list = field(default_factory=list)


def iteration_count(width: float, eps: float) -> int:
    """Halvings needed to shrink a bracket of ``width`` to at most ``eps``."""
    if width <= eps:
        return 0
    return max(0, math.ceil(math.log2(width / eps)))


def bisect_latency(check: Callable[[float], tuple[bool, Any]], eps: float, guess: float,
                   bounds: Optional[tuple[float, float]] = None) -> BisectionResult:
    """Smallest feasible latency to within ``eps``.

    ``check(tau)`` returns ``(feasible, certificate)`` and must be monotone
    (feasible at tau implies feasible above).  Without explicit bounds the
    bracket is [0, guess * 2**k] for the first k that is feasible.  The
    returned certificate is the one computed at the final upper bound.
    """
    if not eps > 0:
        raise ValueError("eps must be > 0")
    doublings = 0
    if bounds is None:
        lb, ub = 0.0, float(guess)
        if not ub > 0 or not math.isfinite(ub):
            raise ValueError(f"initial guess must be finite and > 0, got {guess!r}")
        ok, cert = check(ub)
        while not ok:
            if doublings >= MAX_DOUBLINGS:
                raise Unbounded(f"no feasible latency below {ub:.6g} s")
            ub *= 2.0
            doublings += 1
            ok, cert = check(ub)
    else:
        lb, ub = map(float, bounds)
        if not 0 <= lb < ub:
            raise ValueError("bounds must satisfy 0 <= tau_lb < tau_ub")
        ok, cert = check(ub)
        if not ok:
            raise ValueError(f"upper bound {ub:.6g} s is infeasible")

    lb0, ub0 = lb, ub
    n = iteration_count(ub - lb, eps)
    trace = []
    for k in range(n):
        mid = 0.5 * (lb + ub)
        ok, c = check(mid)
        if ok:
            ub, cert = mid, c
        else:
            lb = mid
        trace.append(BisectionStep(k + 1, lb, ub, mid, ok))
    return BisectionResult(ub, cert, n, lb0, ub0, doublings, trace)
