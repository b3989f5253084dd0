"""Mean max-latency vs P_max for every scheme at N=4."""

import argparse
from pathlib import Path

from uprsma import harness as hx
from uprsma.scene import DropConfig


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--powers", type=float, nargs="+", default=[10, 16, 23, 30, 40])
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--n-users", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--outdir", default="results")
    args = p.parse_args()

    spec = hx.SweepSpec(kind="power", values=tuple(args.powers), trials=args.trials,
                        base=DropConfig(n_users=args.n_users, seed=args.seed))
    rows = hx.run_sweep(spec)
    for scheme in spec.schemes:
        means = []
        for v in spec.values:
            taus = [r.tau_s for r in rows if r.scheme == scheme and r.sweep_value == v]
            means.append(1e3 * sum(taus) / len(taus))
        print(f"{scheme:<22}" + "".join(f"{m:9.4f}" for m in means) + "  ms")
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    hx.emit_csv(rows, out / "power_sweep.csv")
    hx.emit_svg_plot(rows, "power", out / "power_sweep.svg")


if __name__ == "__main__":
    main()
