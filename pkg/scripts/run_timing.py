"""Median wall time per scheme and user count (single-threaded)."""

import argparse
from pathlib import Path

from uprsma import harness as hx


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--n-list", type=int, nargs="+", default=[4, 10, 20, 30, 40])
    p.add_argument("--trials", type=int, default=5)
    p.add_argument("--schemes", nargs="+", default=["paired-rsma", "unpaired-rsma-oracle",
                                                     "rsma-suboptimal", "rsma-enumeration"])
    p.add_argument("--outdir", default="results")
    args = p.parse_args()

    entries, rows = hx.run_bench(args.n_list, args.trials, args.schemes)
    print(f"{'scheme':<22}" + "".join(f"{'N=' + str(n):>12}" for n in args.n_list))
    for scheme in args.schemes:
        cells = []
        for n in args.n_list:
            e = next(e for e in entries if e.scheme == scheme and e.n_users == n)
            cells.append("skipped" if e.median_s is None else f"{e.median_s * 1e3:.3f} ms")
        print(f"{scheme:<22}" + "".join(f"{c:>12}" for c in cells))
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    hx.emit_csv(rows, out / "timing.csv")
    hx.emit_svg_plot(rows, "bench", out / "timing.svg")


if __name__ == "__main__":
    main()
