"""Bisection bracket of the paired-RSMA solver per iteration on one N=4 drop."""

import argparse
from pathlib import Path

from uprsma import harness as hx
from uprsma.scene import DropConfig, generate_drop


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-users", type=int, default=4)
    p.add_argument("--ratio", type=float, default=1024.0,
                   help="initial bracket width over eps (1024 gives 10 iterations)")
    p.add_argument("--outdir", default="results")
    args = p.parse_args()

    scn = generate_drop(DropConfig(n_users=args.n_users, seed=args.seed))
    width0 = hx.run_convergence_trace(scn)[0].tau_ub
    steps = hx.run_convergence_trace(scn, width0 / args.ratio)
    for s in steps:
        print(f"{s.iteration:>3}  lb {s.tau_lb * 1e3:.6f} ms  ub {s.tau_ub * 1e3:.6f} ms")
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    rows = hx.trace_rows(steps, scn.seed)
    hx.emit_csv(rows, out / "convergence.csv")
    hx.emit_svg_plot(rows, "convergence", out / "convergence.svg")


if __name__ == "__main__":
    main()
