#!/usr/bin/env python3
"""Build and verify the three fooling certificates at unit bandwidths,
writing each as JSON.

Usage: python3 scripts/run_fooling.py [--out-dir results/]
"""

import argparse
import os
import sys

from bapo.adversary import smallest_match3_n, smallest_reachability_d
from bapo.harness import cmd_fool


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--out-dir", default=None)
    args = p.parse_args(argv)
    if args.out_dir:
        os.makedirs(args.out_dir, exist_ok=True)
    jobs = [
        ("majority", 1, 1, 2, 3),
        ("match3", 1, 1, 2, smallest_match3_n(1, 1, 2)),
        ("reachability", 1, 1, 1, smallest_reachability_d(1, 1, 1)),
    ]
    failures = 0
    for problem, a, b, c, size in jobs:
        out = (os.path.join(args.out_dir, "fool_%s.json" % problem)
               if args.out_dir else None)
        cert, report = cmd_fool(problem, a, b, c, size, out=out)
        status = "ok" if report.ok else "FAILED (%s)" % report.reason
        print("%s: size=%d inputs=%d tokens, truths %s/%s, verify %s"
              % (problem, size, len(cert.input_a),
                 cert.truth_a, cert.truth_b, status))
        failures += 0 if report.ok else 1
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
