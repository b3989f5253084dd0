"""Mean max-latency vs number of users at P_max = 23 dBm.

The polymatroid oracle enumerates 2^N subsets, so it only runs up to its cap.
"""

import argparse
from pathlib import Path

from uprsma import baselines as bl
from uprsma import harness as hx
from uprsma.scene import DropConfig


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--users", type=int, nargs="+", default=list(range(4, 41, 4)))
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--outdir", default="results")
    args = p.parse_args()

    base = DropConfig(seed=args.seed)
    schemes = tuple(s for s in hx.DEFAULT_SCHEMES if s != "unpaired-rsma-oracle")
    rows = hx.run_sweep(hx.SweepSpec(kind="users", values=tuple(args.users), trials=args.trials,
                                     schemes=schemes, base=base))
    small = tuple(n for n in args.users if n <= bl.ORACLE_MAX_USERS)
    if small:
        rows += hx.run_sweep(hx.SweepSpec(kind="users", values=small, trials=args.trials,
                                          schemes=("unpaired-rsma-oracle",), base=base))
    rows.sort(key=lambda r: (r.scheme, r.sweep_value, r.trial))
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    hx.emit_csv(rows, out / "user_sweep.csv")
    hx.emit_svg_plot(rows, "users", out / "user_sweep.svg")
    print(f"wrote {len(rows)} rows to {out / 'user_sweep.csv'}")


if __name__ == "__main__":
    main()
