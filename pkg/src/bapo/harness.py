"""Verification sweeps, scaling reports, and the command bodies behind the CLI.

Machine ids understood by the registry:
  majority, match3, reachability       (instance-generator problems)
  doubling-cot, doubling-bapo          (parity oracle inside a doubled input)
  dfa-parity, dfa-contains11
  tm-palindrome, tm-matching, tm-lastbit
"""

import csv
import itertools
import json
import sys
from dataclasses import dataclass, field

from . import tokens as tk
from .adversary import (HEURISTIC_CANDIDATES, fool_majority, fool_match3,
                        fool_reachability, verify_fooling_certificate)
from .core import (SplitSchedule, check_consistency, evaluate_all_splits,
                   explore_cot_worstcase, run_cot)
from .errors import BapoError, SchemaMismatch
from .machines import (build_dfa_cbapo, build_input_doubling_bapo,
                       build_input_doubling_cot, build_majority_machine,
                       build_match3_machine, build_reachability_machine,
                       build_tm_machine, contains_11_dfa, last_bit_tm,
                       matching_tm, palindrome_tm, parity_dfa, run_tm)
from .machines.tm import chunk_length
from .problems import (GENERATORS, InstanceRecord, SplitMix64,
                       encode_instance)
from .specfmt import parse_spec_text


def _parity(bits):
    return sum(bits) % 2 == 1


_TM_SPECS = {"tm-palindrome": palindrome_tm, "tm-matching": matching_tm,
             "tm-lastbit": last_bit_tm}
_DFA_SPECS = {"dfa-parity": parity_dfa, "dfa-contains11": contains_11_dfa}


def build_machine(machine_id, n):
    """n is the generator-size parameter (for match3 the machine input is one
    longer: the n listed values plus the anchor)."""
    if machine_id == "majority":
        return build_majority_machine(n)
    if machine_id == "match3":
        return build_match3_machine(n + 1, 2 * n + 1)
    if machine_id == "reachability":
        return build_reachability_machine(n)
    if machine_id == "doubling-cot":
        return build_input_doubling_cot(_parity, n)
    if machine_id == "doubling-bapo":
        return build_input_doubling_bapo(_parity, n)
    if machine_id in _DFA_SPECS:
        return build_dfa_cbapo(_DFA_SPECS[machine_id](), n)
    if machine_id in _TM_SPECS:
        return build_tm_machine(_TM_SPECS[machine_id](), n)
    raise SchemaMismatch("unknown machine id %r" % machine_id)


def machine_id_for(problem):
    if problem in ("majority", "match3", "reachability"):
        return problem
    raise SchemaMismatch("no default machine for problem %r" % problem)


def truth_token(problem, truth):
    if problem == "match3":
        return tk.intval(1 if truth else 0)
    return tk.bit(1 if truth else 0)


# --- gen --------------------------------------------------------------------

def cmd_gen(problem, ns, count, seed, out):
    """count yes + count no records per n, one JSON object per line."""
    if problem not in GENERATORS:
        raise SchemaMismatch("unknown problem %r" % problem)
    gen = GENERATORS[problem]
    counter = itertools.count(seed)
    records = []
    for n in ns:
        for label in ("yes", "no"):
            for _ in range(count):
                records.append(gen(n, label, next(counter)))
    with _open_out(out) as fh:
        for rec in records:
            fh.write(json.dumps(rec.to_json()) + "\n")
    return records


def read_instances(path):
    records = []
    with open(path) as fh:
        for ln, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                records.append(InstanceRecord.from_json(json.loads(line)))
            except (KeyError, ValueError) as exc:
                raise SchemaMismatch("line %d: %s" % (ln, exc))
    return records


# --- verify -----------------------------------------------------------------

@dataclass
class VerificationReport:
    rows: list = field(default_factory=list)
    all_pass: bool = True

    def add(self, row):
        self.rows.append(row)
        if not row["pass"]:
            self.all_pass = False


def first_divergence(machine, sequence, max_steps=100000):
    """Walk one CoT and report the first step where different splits/sets
    would emit different tokens: (step, (k, G, token), (k', G', token'))."""
    seq = list(sequence)
    for step in range(max_steps):
        outputs, table = evaluate_all_splits(machine, seq)
        if len(outputs) > 1:
            seen = {}
            for (k, G, tok) in table:
                if tok not in seen:
                    seen[tok] = (k, G, tok)
                if len(seen) > 1:
                    a, b = list(seen.values())[:2]
                    return step, a, b
        tok = next(iter(outputs))
        if tok == tk.HALT:
            return None
        seq.append(tok)
    return None


def verify_instance(machine, record, budget=100000, exhaustive_limit=10):
    problem = record.problem
    x = encode_instance(record)
    want = truth_token(problem, record.truth)
    row = {"instance": record.instance_id(), "truth": record.truth,
           "pass": False, "answer": None, "witness": None}
    try:
        if record.n <= exhaustive_limit:
            _, summary = explore_cot_worstcase(machine, x, branch_budget=budget)
            answers = summary.answers
            ok = summary.consistent and answers == {want}
            row["answer"] = ", ".join(repr(t) for t in sorted(answers, key=repr))
            if not summary.consistent:
                row["witness"] = repr(first_divergence(machine, x))
        else:
            answers = set()
            for sched in _schedules(record.seed):
                answers.add(run_cot(machine, x, sched, max_steps=budget).answer)
            ok = answers == {want}
            row["answer"] = ", ".join(repr(t) for t in sorted(answers, key=repr))
        row["pass"] = ok
        if not ok and row["witness"] is None:
            row["witness"] = "answer != truth"
    except BapoError as exc:
        row["witness"] = "%s: %s" % (type(exc).__name__, exc)
    return row


def _schedules(seed):
    yield SplitSchedule("input_boundary")
    for i in range(5):
        yield SplitSchedule("random", seed=seed * 7 + i)


def cmd_verify(machine_id, instances_path, budget=100000):
    records = read_instances(instances_path)
    report = VerificationReport()
    for rec in records:
        mid = machine_id or machine_id_for(rec.problem)
        machine = build_machine(mid, rec.n)
        report.add(verify_instance(machine, rec, budget=budget))
    report.rows.sort(key=lambda r: r["instance"])
    return report


# --- scale ------------------------------------------------------------------

def predicted_tokens(machine_id, n):
    if machine_id == "majority":
        L = n.bit_length()
        return n * L + L + 1
    if machine_id == "match3":
        return 2 * n + 1          # input length n+1 with the anchor
    if machine_id == "reachability":
        return (n + 2) + (n + 1) ** 2
    if machine_id in ("doubling-cot", "doubling-bapo"):
        return n + 1
    if machine_id in _DFA_SPECS:
        return 1
    raise SchemaMismatch("no closed-form prediction for %r" % machine_id)


def _scale_inputs(machine_id, n, samples, seed):
    if machine_id in GENERATORS:
        gen = GENERATORS[machine_id]
        for label in ("yes", "no"):
            for i in range(samples):
                yield encode_instance(gen(n, label, seed + i))
    elif machine_id == "doubling-cot":
        rng = SplitMix64(seed)
        for _ in range(2 * samples):
            yield [tk.bit(rng.randrange(2)) for _ in range(n)]
    else:
        raise SchemaMismatch("no instance source for %r" % machine_id)


def cmd_scale(machine_id, ns, samples, seed):
    rows = []
    for n in ns:
        machine = build_machine(machine_id, n)
        worst = 0
        for x in _scale_inputs(machine_id, n, samples, seed):
            for sched in _schedules(seed + n):
                t = run_cot(machine, x, sched)
                worst = max(worst, t.cot_token_count)
        pred = predicted_tokens(machine_id, n)
        rows.append({"machine": machine.name, "n": n, "tokens": worst,
                     "predicted": pred, "ratio": worst / pred})
    return rows


def write_scale_csv(rows, out):
    with _open_out(out) as fh:
        w = csv.writer(fh)
        w.writerow(["machine", "n", "tokens", "predicted", "ratio"])
        for r in rows:
            w.writerow([r["machine"], r["n"], r["tokens"], r["predicted"],
                        "%.6f" % r["ratio"]])


# --- fool -------------------------------------------------------------------

def cmd_fool(problem, a, b, c, size_param, candidate_id="heuristic", out=None):
    if problem not in HEURISTIC_CANDIDATES:
        raise SchemaMismatch("unknown fooling problem %r" % problem)
    if candidate_id != "heuristic":
        raise SchemaMismatch("unknown candidate id %r" % candidate_id)
    candidate = HEURISTIC_CANDIDATES[problem](a=a, b=b, c=c)
    fool = {"majority": fool_majority, "match3": fool_match3,
            "reachability": fool_reachability}[problem]
    cert = fool(candidate, size_param)
    report = verify_fooling_certificate(candidate, cert)
    if out:
        with _open_out(out) as fh:
            fh.write(cert.dumps() + "\n")
    return cert, report


# --- tm ---------------------------------------------------------------------

def cmd_tm_run(spec_path, input_bits, n):
    with open(spec_path) as fh:
        spec = parse_spec_text(fh.read())
    machine = build_tm_machine(spec, n)
    x = [tk.bit(int(ch)) for ch in input_bits]
    transcript = run_cot(machine, x, max_steps=10 ** 7)
    accepted, steps = run_tm(spec, list(input_bits), n)
    return {"name": spec.name, "answer": transcript.answer.payload[0],
            "accepted": bool(accepted), "tm_steps": steps,
            "chunk_length": chunk_length(spec, n),
            "cot_tokens": transcript.cot_token_count}


# --- consistency ------------------------------------------------------------

def _consistency_inputs(machine_id, max_len):
    if machine_id.startswith("doubling"):
        # doubled inputs plus truncated ones, which is where a
        # divider-dependent prefix oracle can betray inconsistency
        half = max(1, max_len // 2)
        for ln in range(1, half + 1):
            for combo in itertools.product([0, 1], repeat=ln):
                w = [tk.bit(v) for v in combo]
                for cut in range(ln + 1):
                    yield w + [tk.DIVIDER] + w[:cut]
    else:
        for ln in range(1, max_len + 1):
            for combo in itertools.product([0, 1], repeat=ln):
                yield [tk.bit(v) for v in combo]


def cmd_consistency(machine_id, max_len):
    if machine_id in _DFA_SPECS:
        machine = build_dfa_cbapo(_DFA_SPECS[machine_id](), max_len)
    else:
        machine = build_machine(machine_id, max_len)
    inputs = list(_consistency_inputs(machine_id, max_len))
    return machine, check_consistency(machine, inputs)


# --- io ---------------------------------------------------------------------

class _open_out:
    def __init__(self, out):
        self.out = out
        self.fh = None

    def __enter__(self):
        self.fh = sys.stdout if self.out in (None, "-") else open(self.out, "w")
        return self.fh

    def __exit__(self, *exc):
        if self.fh is not sys.stdout:
            self.fh.close()
        return False
