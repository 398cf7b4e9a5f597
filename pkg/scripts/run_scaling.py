#!/usr/bin/env python3
"""Worst-case CoT token scaling for the built-in machines, as CSV.

Usage: python3 scripts/run_scaling.py [--out results/scaling.csv]
"""

import argparse
import sys

from bapo.harness import cmd_scale, write_scale_csv

GRIDS = {
    "majority": [8, 16, 32, 64, 128, 256, 512],
    "match3": [8, 16, 32, 64, 128],
    "reachability": [8, 16, 32, 64],
    "doubling-cot": [8, 16, 32, 64, 128, 256, 512],
}


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--out", default="-")
    p.add_argument("--samples", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)
    rows = []
    for machine_id, ns in GRIDS.items():
        rows.extend(cmd_scale(machine_id, ns, args.samples, args.seed))
    write_scale_csv(rows, args.out)
    over = [r for r in rows if r["tokens"] > r["predicted"]]
    for r in over:
        print("BOUND EXCEEDED: %(machine)s n=%(n)d tokens=%(tokens)d "
              "predicted=%(predicted)d" % r, file=sys.stderr)
    return 1 if over else 0


if __name__ == "__main__":
    sys.exit(main())
