"""Command-line interface.

Exit codes: 0 all passed, 1 verification failures, 2 usage or precondition
errors.
"""

import argparse
import sys

from . import harness
from .errors import BapoError, PreconditionViolated, SchemaMismatch


def _parse_ns(text):
    return [int(x) for x in text.split(",") if x]


def build_parser():
    p = argparse.ArgumentParser(prog="bapo",
                                description="BAPO-CoT simulator and harness")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate problem instances as JSONL")
    g.add_argument("problem", choices=["majority", "match3", "reachability"])
    g.add_argument("--n", required=True, help="comma-separated sizes")
    g.add_argument("--count", type=int, default=10, help="instances per label")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", default="-")

    v = sub.add_parser("verify", help="run machines against instances")
    v.add_argument("instances", help="JSONL instance file")
    v.add_argument("--machine", default=None, help="machine id (default: by problem)")
    v.add_argument("--budget", type=int, default=100000)
    v.add_argument("--out", default="-")
    v.add_argument("--format", choices=["csv", "jsonl"], default="jsonl")

    s = sub.add_parser("scale", help="worst-case CoT token scaling report")
    s.add_argument("machine", help="machine id")
    s.add_argument("--n", required=True, help="comma-separated sizes")
    s.add_argument("--samples", type=int, default=5, help="instances per label")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", default="-")
    s.add_argument("--format", choices=["csv", "jsonl"], default="csv")

    f = sub.add_parser("fool", help="build a fooling certificate")
    f.add_argument("problem", choices=["majority", "match3", "reachability"])
    f.add_argument("--a", type=int, default=1)
    f.add_argument("--b", type=int, default=1)
    f.add_argument("--c", type=int, default=2, help="candidate step budget")
    f.add_argument("--size", type=int, required=True,
                   help="m_param (majority), n (match3), or d (reachability)")
    f.add_argument("--candidate", default="heuristic")
    f.add_argument("--out", default=None)

    t = sub.add_parser("tm", help="simulate a Turing machine spec as a CoT")
    t.add_argument("spec", help="TM spec file")
    t.add_argument("input", help="binary input string")
    t.add_argument("--n", type=int, default=None, help="capacity (default: input length)")

    c = sub.add_parser("consistency", help="check prefix-oracle consistency")
    c.add_argument("machine", help="machine id")
    c.add_argument("--max-len", type=int, default=10)
    return p


def _write_report(report, out, fmt):
    import csv as _csv
    import json as _json
    with harness._open_out(out) as fh:
        if fmt == "csv":
            w = _csv.writer(fh)
            w.writerow(["instance", "pass", "answer", "truth", "witness"])
            for r in report.rows:
                w.writerow([r["instance"], r["pass"], r["answer"],
                            r["truth"], r["witness"] or ""])
        else:
            for r in report.rows:
                fh.write(_json.dumps(r) + "\n")


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "gen":
            records = harness.cmd_gen(args.problem, _parse_ns(args.n),
                                      args.count, args.seed, args.out)
            print("wrote %d records" % len(records), file=sys.stderr)
            return 0
        if args.command == "verify":
            report = harness.cmd_verify(args.machine, args.instances,
                                        budget=args.budget)
            _write_report(report, args.out, args.format)
            fails = sum(1 for r in report.rows if not r["pass"])
            print("%d/%d passed" % (len(report.rows) - fails, len(report.rows)),
                  file=sys.stderr)
            return 0 if report.all_pass else 1
        if args.command == "scale":
            rows = harness.cmd_scale(args.machine, _parse_ns(args.n),
                                     args.samples, args.seed)
            if args.format == "csv":
                harness.write_scale_csv(rows, args.out)
            else:
                import json as _json
                with harness._open_out(args.out) as fh:
                    for r in rows:
                        fh.write(_json.dumps(r) + "\n")
            return 0
        if args.command == "fool":
            cert, report = harness.cmd_fool(args.problem, args.a, args.b,
                                            args.c, args.size,
                                            candidate_id=args.candidate,
                                            out=args.out)
            print("certificate: inputs of length %d, truths %s/%s, verify=%s"
                  % (len(cert.input_a), cert.truth_a, cert.truth_b,
                     report.reason), file=sys.stderr)
            return 0 if report.ok else 1
        if args.command == "tm":
            n = args.n if args.n is not None else len(args.input)
            info = harness.cmd_tm_run(args.spec, args.input, n)
            print("tm=%(name)s answer=%(answer)d accepted=%(accepted)s "
                  "tm_steps=%(tm_steps)d chunk_length=%(chunk_length)d "
                  "cot_tokens=%(cot_tokens)d" % info)
            return 0
        if args.command == "consistency":
            machine, rep = harness.cmd_consistency(args.machine, args.max_len)
            if rep.trivially:
                print("%s: trivially consistent (a=0)" % machine.name)
            elif rep.consistent:
                print("%s: consistent (%d checks)" % (machine.name, rep.checked))
            else:
                print("%s: VIOLATION after %d checks: %r"
                      % (machine.name, rep.checked, rep.first_violation))
            return 0 if rep.consistent else 1
        return 2
    except (PreconditionViolated, SchemaMismatch) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except BapoError as exc:
        print("error: %s: %s" % (type(exc).__name__, exc), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
