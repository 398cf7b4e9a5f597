"""Strict text format for TM and DFA specifications.

One `key: value` pair per line; `#` starts a comment; repeated `delta:`
lines carry one transition each.  Unknown keys are rejected so that spec
files stay portable across implementations.

TM transition row:   delta: STATE R1 .. Rk -> STATE' W1 .. Wk M1 .. Mk
(k = tapes * heads_per_tape reads/writes, moves in {L,R,S}; reads and
writes are tape symbols, `_` the blank)

DFA transition row:  delta: STATE SYM -> STATE'

Example:

    kind: dfa
    name: parity
    states: even odd
    start: even
    accept: odd
    delta: even 0 -> even
    delta: even 1 -> odd
    delta: odd 0 -> odd
    delta: odd 1 -> even
"""

import itertools

from .errors import SchemaMismatch
from .machines.dfa import DfaSpec
from .machines.tm import TmSpec

_TM_KEYS = {"kind", "name", "states", "tape_alphabet", "tapes",
            "heads_per_tape", "start", "accept", "reject", "space_bound",
            "delta"}
_DFA_KEYS = {"kind", "name", "states", "start", "accept", "delta"}


def _lines(text):
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise SchemaMismatch("line %d: expected 'key: value', got %r" % (ln, raw))
        key, val = line.split(":", 1)
        yield ln, key.strip(), val.strip()


def _delta_row(ln, val):
    if "->" not in val:
        raise SchemaMismatch("line %d: delta row needs '->'" % ln)
    lhs, rhs = val.split("->", 1)
    return lhs.split(), rhs.split()


def parse_spec_text(text):
    """Returns a TmSpec or DfaSpec."""
    fields = {}
    deltas = []
    kind = None
    for ln, key, val in _lines(text):
        if key == "kind":
            if val not in ("tm", "dfa"):
                raise SchemaMismatch("line %d: kind must be tm or dfa" % ln)
            kind = val
            continue
        if kind is None:
            raise SchemaMismatch("line %d: 'kind:' must come first" % ln)
        allowed = _TM_KEYS if kind == "tm" else _DFA_KEYS
        if key not in allowed:
            raise SchemaMismatch("line %d: unknown %s field %r" % (ln, kind, key))
        if key == "delta":
            deltas.append(_delta_row(ln, val))
        elif key in fields:
            raise SchemaMismatch("line %d: duplicate field %r" % (ln, key))
        else:
            fields[key] = val
    if kind is None:
        raise SchemaMismatch("missing 'kind:' line")
    if kind == "dfa":
        return _build_dfa(fields, deltas)
    return _build_tm(fields, deltas)


def _need(fields, key):
    if key not in fields:
        raise SchemaMismatch("missing required field %r" % key)
    return fields[key]


def _build_dfa(fields, deltas):
    states = _need(fields, "states").split()
    delta = {}
    for lhs, rhs in deltas:
        if len(lhs) != 2 or len(rhs) != 1:
            raise SchemaMismatch("bad dfa delta row: %r -> %r" % (lhs, rhs))
        delta[(lhs[0], lhs[1])] = rhs[0]
    return DfaSpec(states, delta, _need(fields, "start"),
                   _need(fields, "accept").split(),
                   name=fields.get("name", "dfa"))


def _build_tm(fields, deltas):
    states = _need(fields, "states").split()
    tapes = int(_need(fields, "tapes"))
    heads = int(_need(fields, "heads_per_tape"))
    width = tapes * heads
    delta = {}
    for lhs, rhs in deltas:
        if len(lhs) != 1 + width or len(rhs) != 1 + 2 * width:
            raise SchemaMismatch(
                "bad tm delta row (want %d reads, %d writes+moves): %r -> %r"
                % (width, 2 * width, lhs, rhs))
        moves = rhs[1 + width:]
        if any(mv not in ("L", "R", "S") for mv in moves):
            raise SchemaMismatch("moves must be L/R/S in row %r -> %r" % (lhs, rhs))
        delta[(lhs[0], tuple(lhs[1:]))] = (
            rhs[0], tuple(rhs[1:1 + width]), tuple(moves))
    return TmSpec(states, _need(fields, "tape_alphabet").split(),
                  tapes, heads, delta, _need(fields, "start"),
                  _need(fields, "accept"), _need(fields, "reject"),
                  space_bound=int(fields.get("space_bound", "1")),
                  name=fields.get("name", "tm"))


def tm_spec_to_text(spec):
    """Serialize, expanding a callable delta into explicit rows."""
    width = spec.tapes * spec.heads_per_tape
    out = ["kind: tm", "name: %s" % spec.name,
           "states: %s" % " ".join(spec.states),
           "tape_alphabet: %s" % " ".join(spec.tape_alphabet),
           "tapes: %d" % spec.tapes,
           "heads_per_tape: %d" % spec.heads_per_tape,
           "start: %s" % spec.start, "accept: %s" % spec.accept,
           "reject: %s" % spec.reject]
    if not callable(spec.space_bound):
        out.append("space_bound: %d" % spec.space_bound)
    live = [q for q in spec.states if q not in (spec.accept, spec.reject)]
    for q in live:
        for reads in itertools.product(spec.tape_alphabet, repeat=width):
            q2, writes, moves = spec.step(q, reads)
            out.append("delta: %s %s -> %s %s %s" %
                       (q, " ".join(reads), q2, " ".join(writes), " ".join(moves)))
    return "\n".join(out) + "\n"


def dfa_spec_to_text(spec):
    out = ["kind: dfa", "name: %s" % spec.name,
           "states: %s" % " ".join(spec.states),
           "start: %s" % spec.start,
           "accept: %s" % " ".join(spec.accept)]
    for q in spec.states:
        for sym in ("0", "1"):
            out.append("delta: %s %s -> %s" % (q, sym, spec.delta[(q, sym)]))
    return "\n".join(out) + "\n"
