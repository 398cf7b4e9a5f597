"""Multi-tape multi-head Turing machine simulation as a (0, 2+tau*eta)-BAPO-CoT.

The CoT is a sequence of chunks, each a full snapshot of the machine: tau
tape segments of W = n + s(n) cells (TapeSym tokens carrying the symbol and
the set of (tape, head) pairs parked on the cell) followed by a State token.
Chunk 0 is the input padded with Blank up to the chunk length; chunk 1 is
the initial configuration; each later chunk applies one transition.  When
the previous chunk's state is accepting/rejecting the machine emits the
answer bit and halts.

Head-write conflicts resolve in ascending (tape, head) order, last writer
wins.  Moving left on the leftmost cell stays put; moving right past the
W-cell window raises SpaceExceeded (the space bound is part of the spec).
"""

from dataclasses import dataclass
from typing import Callable, Union

from ..core import BapoMachine, read_at
from ..errors import (InputNotBits, InputTooLong, MalformedEncoding,
                      NonTermination, SpaceExceeded)
from ..tokens import BIT0, BIT1, BLANK, HALT, tape_sym, tm_state

BLANK_SYM = "_"


@dataclass
class TmSpec:
    states: list
    tape_alphabet: list                  # symbols as strings; must include 0, 1, _
    tapes: int
    heads_per_tape: int
    delta: Union[dict, Callable]         # (state, read-vector) -> (state, writes, moves)
    start: str
    accept: str
    reject: str
    space_bound: Union[int, Callable] = 1
    name: str = "tm"

    def __post_init__(self):
        for sym in ("0", "1", BLANK_SYM):
            if sym not in self.tape_alphabet:
                raise MalformedEncoding("tape alphabet must contain %r" % sym)
        if self.accept == self.reject:
            raise MalformedEncoding("accept and reject states must differ")
        if isinstance(self.delta, dict):
            nh = [q for q in self.states if q not in (self.accept, self.reject)]
            combos = [()]
            for _ in range(self.tapes * self.heads_per_tape):
                combos = [c + (s,) for c in combos for s in self.tape_alphabet]
            for q in nh:
                for c in combos:
                    if (q, c) not in self.delta:
                        raise MalformedEncoding("delta not total: missing (%r, %r)" % (q, c))

    def space(self, n):
        return self.space_bound(n) if callable(self.space_bound) else self.space_bound

    def step(self, q, reads):
        if callable(self.delta) and not isinstance(self.delta, dict):
            return self.delta(q, reads)
        return self.delta[(q, tuple(reads))]


def _heads(spec):
    """All (tape, head) pairs in ascending order; 1-based ids."""
    return [(t, hd) for t in range(1, spec.tapes + 1)
            for hd in range(1, spec.heads_per_tape + 1)]


def run_tm(spec, bits, n, max_steps=1000000):
    """Direct execution; returns (accepted, steps)."""
    if len(bits) > n:
        raise InputTooLong("input longer than n=%d" % n)
    W = n + spec.space(n)
    tapes = {t: [BLANK_SYM] * W for t in range(1, spec.tapes + 1)}
    for i, bval in enumerate(bits):
        tapes[1][i] = str(bval)
    pos = {th: 0 for th in _heads(spec)}
    q = spec.start
    for step in range(max_steps):
        if q == spec.accept:
            return True, step
        if q == spec.reject:
            return False, step
        reads = tuple(tapes[t][pos[(t, hd)]] for (t, hd) in _heads(spec))
        q, writes, moves = spec.step(q, reads)
        for i, th in enumerate(_heads(spec)):
            tapes[th[0]][pos[th]] = writes[i]
        for i, th in enumerate(_heads(spec)):
            d = moves[i]
            if d == "R":
                if pos[th] + 1 >= W:
                    raise SpaceExceeded("head %r past cell %d" % (th, W - 1))
                pos[th] += 1
            elif d == "L":
                pos[th] = max(0, pos[th] - 1)
    raise NonTermination("TM did not halt in %d steps" % max_steps)


def build_tm_machine(spec, n):
    W = n + spec.space(n)
    ell = 1 + spec.tapes * W
    heads = _heads(spec)
    all_heads_set = frozenset(range(1, spec.heads_per_tape + 1))

    def check(x):
        if len(x) > n:
            raise InputTooLong("input longer than n=%d" % n)
        for t in x:
            if t.kind != "bit":
                raise InputNotBits("TM input must be bits, got %r" % (t,))

    def f(prefix):
        return ""

    def _offsets(m):
        p = m + 1
        return p, (p - 1) % ell, (p - 1) // ell

    def g(suffix, k, token, index):
        m = k + len(suffix)
        p, o, ch = _offsets(m)
        if ch == 0:
            return 0
        if ch == 1:
            return 1 if index == p - ell else 0
        cs = p - o - ell                   # first position of the previous chunk
        if index == p - ell:
            return 1
        if index == cs + ell - 1 and token.kind == "state":
            return 1
        if cs <= index < cs + ell - 1 and token.kind == "tape" and token.payload[1]:
            return 1
        return 0

    def support(seq, m, cache):
        p, o, ch = _offsets(m)
        if ch == 0:
            return {}
        if ch == 1:
            return {p - ell: 1}
        cs = p - o - ell
        sup = {p - ell: 1, cs + ell - 1: 1}
        for q in range(cs, cs + ell - 1):
            if seq[q - 1].payload[1]:      # head-bearing cell
                sup[q] = 1
        return sup

    def h(bits, G, suffix, k):
        m = k + len(suffix)
        p, o, ch = _offsets(m)
        if suffix[-1].kind == "bit" and m > ell:
            return HALT                    # the answer bit was just written
        if ch == 0:
            return BLANK
        tape_idx, cell = o // W, o % W
        if ch == 1:
            if o == ell - 1:
                return tm_state(spec.start)
            src = read_at(G, suffix, k, p - ell)
            sym = str(src.payload[0]) if src.kind == "bit" else BLANK_SYM
            hs = frozenset((tape_idx + 1, hd) for hd in all_heads_set) if cell == 0 else frozenset()
            return tape_sym(sym, hs)
        cs = p - o - ell
        q = read_at(G, suffix, k, cs + ell - 1).payload[0]
        if q in (spec.accept, spec.reject):
            return BIT1 if q == spec.accept else BIT0
        # locate head-bearing cells of the previous chunk, then fetch them
        # through the attention channel
        positions = []
        for qq in range(cs, cs + ell - 1):
            if suffix.base[qq - 1].payload[1]:
                positions.append(qq)
        head_at = {}
        for qq in positions:
            tok = read_at(G, suffix, k, qq)
            oo = (qq - 1) % ell
            for th in tok.payload[1]:
                head_at[th] = (oo // W + 1, oo % W, tok.payload[0])
        reads = tuple(head_at[th][2] for th in heads)
        q2, writes, moves = spec.step(q, reads)
        if o == ell - 1:
            return tm_state(q2)
        src = read_at(G, suffix, k, p - ell)
        sym = src.payload[0]
        new_heads = set()
        for i, th in enumerate(heads):
            t_of, c_of, _ = head_at[th]
            if t_of == tape_idx + 1 and c_of == cell:
                sym = writes[i]            # ascending head order, last writer wins
            d = moves[i]
            c_new = c_of + (1 if d == "R" else -1 if d == "L" else 0)
            c_new = max(0, c_new)
            if c_new >= W:
                raise SpaceExceeded("head %r past cell %d" % (th, W - 1))
            if t_of == tape_idx + 1 and c_new == cell:
                new_heads.add(th)
        return tape_sym(sym, frozenset(new_heads))

    return BapoMachine(0, 2 + spec.tapes * spec.heads_per_tape, f, g, h,
                       name="tm-%s-n%d" % (spec.name, n), claims_cbapo=True,
                       attention_support=support, uniform_steps=True,
                       input_check=check)


def chunk_length(spec, n):
    return 1 + spec.tapes * (n + spec.space(n))


# --- example machines -------------------------------------------------------

def last_bit_tm():
    """Single tape, single head: accept iff the last input bit is 1."""

    def delta(q, reads):
        c = reads[0]
        if q == "walk":
            if c == BLANK_SYM:
                return "back", (c,), ("L",)
            return "walk", (c,), ("R",)
        if q == "back":
            if c == "1":
                return "acc", (c,), ("S",)
            return "rej", (c,), ("S",)
        raise MalformedEncoding("no transition from %r" % q)

    return TmSpec(["walk", "back", "acc", "rej"], ["0", "1", BLANK_SYM],
                  1, 1, delta, "walk", "acc", "rej", space_bound=1,
                  name="lastbit")


def palindrome_tm():
    """One tape, two heads: head 2 seeks the right end, then the heads
    compare symbols moving inward, crossing off compared cells with X."""

    def delta(q, reads):
        c0, c1 = reads
        if q == "seek":
            if c1 != BLANK_SYM:
                return "seek", (c0, c1), ("S", "R")
            return "cmp", (c0, c1), ("S", "L")
        if q == "cmp":
            if c0 in ("X", BLANK_SYM) or c1 in ("X", BLANK_SYM):
                return "acc", (c0, c1), ("S", "S")     # heads met or crossed
            if c0 == c1:
                return "cmp", ("X", "X"), ("R", "L")
            return "rej", (c0, c1), ("S", "S")
        raise MalformedEncoding("no transition from %r" % q)

    return TmSpec(["seek", "cmp", "acc", "rej"], ["0", "1", "X", BLANK_SYM],
                  1, 2, delta, "seek", "acc", "rej", space_bound=1,
                  name="palindrome")


def matching_tm():
    """One tape, two heads: match each 1 (head 1) against a 0 (head 2),
    crossing off pairs; accept iff an unmatched 1 remains."""

    def delta(q, reads):
        c0, c1 = reads
        if q == "scan":
            if c0 == BLANK_SYM:
                return "rej", (c0, c1), ("S", "S")     # no surplus 1
            if c1 == BLANK_SYM:
                if c0 == "1":
                    return "acc", (c0, c1), ("S", "S")
                return "seek1", (c0, c1), ("R", "S")
            if c0 in ("0", "X"):
                return "scan", (c0, c1), ("R", "S")
            if c1 in ("1", "X"):
                return "scan", (c0, c1), ("S", "R")
            return "scan", ("X", "X"), ("R", "R")      # c0 = 1, c1 = 0: pair off
        if q == "seek1":
            if c0 == "1":
                return "acc", (c0, c1), ("S", "S")
            if c0 == BLANK_SYM:
                return "rej", (c0, c1), ("S", "S")
            return "seek1", (c0, c1), ("R", "S")
        raise MalformedEncoding("no transition from %r" % q)

    return TmSpec(["scan", "seek1", "acc", "rej"], ["0", "1", "X", BLANK_SYM],
                  1, 2, delta, "scan", "acc", "rej", space_bound=1,
                  name="matching")
