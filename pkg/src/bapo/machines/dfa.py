"""DFA machines: any regular language over {0,1} is decided by a
(ceil(log2 |Q|), 0) consistent BAPO.

f encodes the state reached after the prefix in binary; h resumes the run
over the suffix from that state and emits the accept bit.  The consistency
witness h' re-derives the post-suffix state from (bits, suffix) so the
harness can confirm f really is a state homomorphism on every split.
"""

import math
from dataclasses import dataclass

from ..core import BapoMachine
from ..errors import InputNotBits, MalformedEncoding
from ..tokens import HALT, bit


@dataclass
class DfaSpec:
    states: list
    delta: dict              # (state, "0"|"1") -> state
    start: str
    accept: list
    name: str = "dfa"

    def __post_init__(self):
        if self.start not in self.states:
            raise MalformedEncoding("start state %r unknown" % self.start)
        for q in self.accept:
            if q not in self.states:
                raise MalformedEncoding("accept state %r unknown" % q)
        for q in self.states:
            for sym in ("0", "1"):
                if (q, sym) not in self.delta:
                    raise MalformedEncoding("delta not total: missing (%r, %r)" % (q, sym))
                if self.delta[(q, sym)] not in self.states:
                    raise MalformedEncoding("delta maps into unknown state")

    def run(self, q, bits):
        for bval in bits:
            q = self.delta[(q, str(bval))]
        return q


def run_dfa(spec, bits):
    return spec.run(spec.start, bits) in spec.accept


def build_dfa_cbapo(spec, n):
    a = max(1, math.ceil(math.log2(len(spec.states))))
    idx = {q: i for i, q in enumerate(spec.states)}

    def encode(q):
        return format(idx[q], "0%db" % a)

    def decode(bits):
        i = int(bits, 2)
        if i >= len(spec.states):
            raise MalformedEncoding("bits %r decode to no state" % bits)
        return spec.states[i]

    def check(x):
        toks = list(x)
        if len(toks) != n:
            raise MalformedEncoding("expected %d input bits, got %d" % (n, len(toks)))
        for t in toks:
            if t.kind != "bit":
                raise InputNotBits("DFA input must be bits, got %r" % (t,))

    def _bits_of(view):
        return [t.payload[0] for t in view.tokens() if t.kind == "bit"]

    def f(prefix):
        return encode(spec.run(spec.start, _bits_of(prefix)))

    def g(suffix, k, token, index):
        return 0

    def h(bits, G, suffix, k):
        m = k + len(suffix)
        if m > n:
            return HALT
        q = spec.run(decode(bits), _bits_of(suffix))
        return bit(1 if q in spec.accept else 0)

    def h_witness(bits, G, suffix, k):
        return encode(spec.run(decode(bits), _bits_of(suffix)))

    def g_witness(suffix, k, token, index):
        return 0

    return BapoMachine(a, 0, f, g, h, name="dfa-%s-n%d" % (spec.name, n),
                       claims_cbapo=True,
                       consistency_witness=(g_witness, h_witness),
                       attention_support=lambda seq, m, cache: {},
                       uniform_steps=True, input_check=check)


def parity_dfa():
    """Accepts bit strings with an odd number of ones."""
    delta = {("even", "0"): "even", ("even", "1"): "odd",
             ("odd", "0"): "odd", ("odd", "1"): "even"}
    return DfaSpec(["even", "odd"], delta, "even", ["odd"], name="parity")


def contains_11_dfa():
    """Accepts bit strings containing two consecutive ones."""
    delta = {("q0", "0"): "q0", ("q0", "1"): "q1",
             ("q1", "0"): "q0", ("q1", "1"): "q2",
             ("q2", "0"): "q2", ("q2", "1"): "q2"}
    return DfaSpec(["q0", "q1", "q2"], delta, "q0", ["q2"], name="contains11")
