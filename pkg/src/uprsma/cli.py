"""Command line entry point: ``uprsma {gen,solve,sweep,trace,bench,plot}``."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict

from . import harness as hx
from .baselines import UnsupportedSize
from .pairalloc import DEFAULT_EPS, AllocationSolution
from .scene import DropConfig, generate_drop, load_scenario, save_scenario, scenario_to_dict

EXIT_CONFIG = 2


def _drop_args(p: argparse.ArgumentParser):
    d = DropConfig()
    p.add_argument("--n-users", type=int, default=d.n_users)
    p.add_argument("--p-max-dbm", type=float, default=d.p_max_dbm)
    p.add_argument("--radius-km", type=float, default=d.cell_radius_km)
    p.add_argument("--bandwidth-hz", type=float, default=d.bandwidth_hz)
    p.add_argument("--noise-dbm-per-hz", type=float, default=d.noise_dbm_per_hz)
    p.add_argument("--packet-bytes", type=int, nargs=2, metavar=("MIN", "MAX"),
                   default=(d.packet_bytes_min, d.packet_bytes_max))
    p.add_argument("--seed", type=int, default=d.seed)


def _drop_config(args) -> DropConfig:
    return DropConfig(n_users=args.n_users, cell_radius_km=args.radius_km,
                      packet_bytes_min=args.packet_bytes[0], packet_bytes_max=args.packet_bytes[1],
                      p_max_dbm=args.p_max_dbm, seed=args.seed, bandwidth_hz=args.bandwidth_hz,
                      noise_dbm_per_hz=args.noise_dbm_per_hz)


def _scenario(args):
    if getattr(args, "scenario", None):
        return load_scenario(args.scenario)
    return generate_drop(_drop_config(args))


def _solution_json(scheme: str, sol) -> dict:
    if isinstance(sol, AllocationSolution):
        return {
            "scheme": scheme,
            "tau_s": sol.tau,
            "sum_alpha": sol.sum_alpha,
            "iterations": sol.iterations,
            "pairs": [
                {"users": list(a.pair.user_ids), "case": a.case.value, "alpha": a.alpha,
                 "p11_w": a.p11, "p12_w": a.p12, "p2_w": a.p2, "r1_bps": a.r1, "r2_bps": a.r2}
                for a in sol.allocations
            ],
            "latency_s": {str(k): v for k, v in sol.latencies.items()},
        }
    out = asdict(sol)
    out["tau_s"] = out.pop("tau")
    if out.get("stream_powers"):
        out["stream_powers"] = {f"{u}.{j}": p for (u, j), p in out["stream_powers"].items()}
    if out.get("powers"):
        out["powers"] = {str(k): v for k, v in out["powers"].items()}
    return json.loads(json.dumps(out, default=str))


def cmd_gen(args):
    scn = generate_drop(_drop_config(args))
    if args.out:
        save_scenario(scn, args.out)
    else:
        print(json.dumps(scenario_to_dict(scn), indent=2))


def cmd_solve(args):
    scn = _scenario(args)
    hx.check_caps([args.scheme], scn.n_users)
    _, _, _, sol = hx.run_scheme(args.scheme, scn, args.eps, args.split_ratio, args.enum_grid)
    text = json.dumps(_solution_json(args.scheme, sol), indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def cmd_sweep(args):
    values = args.values
    if values is None:
        values = [10, 16, 23, 30, 40] if args.kind == "power" else list(range(4, 42, 4))
    cast = float if args.kind == "power" else int
    spec = hx.SweepSpec(kind=args.kind, values=tuple(cast(v) for v in values), trials=args.trials,
                        schemes=tuple(args.schemes), base=_drop_config(args), eps=args.eps,
                        split_ratio=args.split_ratio, enumeration_grid=args.enum_grid)
    rows = hx.run_sweep(spec)
    hx.emit_csv(rows, args.out)
    if args.svg:
        hx.emit_svg_plot(rows, args.kind, args.svg)
    print(f"wrote {len(rows)} rows to {args.out}")


def cmd_trace(args):
    scn = _scenario(args)
    steps = hx.run_convergence_trace(scn, args.eps)
    print(f"{'iter':>4} {'tau_lb_ms':>14} {'tau_ub_ms':>14} feasible")
    for s in steps:
        print(f"{s.iteration:>4} {s.tau_lb * 1e3:>14.9f} {s.tau_ub * 1e3:>14.9f} "
              f"{'-' if s.iteration == 0 else s.feasible}")
    rows = hx.trace_rows(steps, scn.seed)
    if args.out:
        hx.emit_csv(rows, args.out)
    if args.svg:
        hx.emit_svg_plot(rows, "convergence", args.svg)


def cmd_bench(args):
    entries, rows = hx.run_bench(args.n_list, args.trials, args.schemes,
                                 _drop_config(args), args.eps, args.split_ratio)
    print(f"{'scheme':<22} {'N':>4} {'median_s':>12}  note")
    for e in entries:
        med = "-" if e.median_s is None else f"{e.median_s:.6f}"
        print(f"{e.scheme:<22} {e.n_users:>4} {med:>12}  {e.note}")
    if args.out:
        hx.emit_csv(rows, args.out)
    if args.svg:
        hx.emit_svg_plot(rows, "bench", args.svg)


def cmd_plot(args):
    rows = hx.read_csv(args.csv)
    hx.emit_svg_plot(rows, args.kind, args.out)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="uprsma",
                                     description="Min-max latency allocation for uplink RSMA")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a random scenario as JSON")
    _drop_args(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("solve", help="solve one scenario with one scheme")
    p.add_argument("scenario", nargs="?", help="scenario JSON (default: random drop)")
    _drop_args(p)
    p.add_argument("--scheme", choices=hx.SCHEMES, default="paired-rsma")
    p.add_argument("--eps", type=float, default=DEFAULT_EPS)
    p.add_argument("--split-ratio", type=float, default=0.5)
    p.add_argument("--enum-grid", type=int, default=200)
    p.add_argument("--out")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="Monte Carlo sweep over power or user count")
    p.add_argument("--kind", choices=hx.SWEEP_KINDS, default="power")
    p.add_argument("--values", nargs="+", type=float)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--schemes", nargs="+", choices=hx.SCHEMES, default=list(hx.DEFAULT_SCHEMES))
    _drop_args(p)
    p.add_argument("--eps", type=float, default=DEFAULT_EPS)
    p.add_argument("--split-ratio", type=float, default=0.5)
    p.add_argument("--enum-grid", type=int, default=200)
    p.add_argument("--out", required=True)
    p.add_argument("--svg")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("trace", help="bisection bracket per iteration of the paired solver")
    p.add_argument("scenario", nargs="?")
    _drop_args(p)
    p.add_argument("--eps", type=float, default=DEFAULT_EPS)
    p.add_argument("--out")
    p.add_argument("--svg")
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("bench", help="median solve time per scheme and user count")
    p.add_argument("--n-list", type=int, nargs="+", default=[4, 10, 20, 30, 40])
    p.add_argument("--trials", type=int, default=3)
    p.add_argument("--schemes", nargs="+", choices=hx.SCHEMES, default=list(hx.DEFAULT_SCHEMES))
    _drop_args(p)
    p.add_argument("--eps", type=float, default=DEFAULT_EPS)
    p.add_argument("--split-ratio", type=float, default=0.5)
    p.add_argument("--out")
    p.add_argument("--svg")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("plot", help="render a results CSV as SVG")
    p.add_argument("csv")
    p.add_argument("--kind", choices=("power", "users", "convergence", "bench"), required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (hx.ConfigError, UnsupportedSize, ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return 0


if __name__ == "__main__":
    sys.exit(main())
