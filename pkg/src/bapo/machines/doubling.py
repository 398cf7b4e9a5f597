"""Machines for the input-doubling trick: any predicate over n bits becomes
solvable with tiny bandwidth once the input is repeated.

Two constructions:

* build_input_doubling_bapo: a (1,0)-BAPO over inputs w DIVIDER w.  Whatever
  the split, one side contains a full copy: f reports oracle(w) when the
  divider landed in the prefix, and h recomputes from the suffix copy
  otherwise.  No attention needed.

* build_input_doubling_cot: a (1,1)-BAPO-CoT over single-copy inputs that
  manufactures the second copy itself (pad the input region to capacity n
  with Blank, copy the n positions one per step with one attended read,
  then answer as above with the CoT copy playing the suffix role).
"""

from ..core import BapoMachine, read_at
from ..errors import InputNotBits, InputTooLong, MalformedInput
from ..tokens import BLANK, DIVIDER, HALT, bit


def _oracle_bits(tokens):
    return [t.payload[0] for t in tokens if t.kind == "bit"]


def build_input_doubling_bapo(oracle, n, name="doubling"):
    """Inputs: w DIVIDER w with |w| = n.  Decides oracle(w)."""
    n_in = 2 * n + 1

    def check(x):
        toks = list(x)
        if len(toks) != n_in:
            raise MalformedInput("expected %d tokens, got %d" % (n_in, len(toks)))
        if toks[n] != DIVIDER:
            raise MalformedInput("divider must sit at position %d" % (n + 1))
        for t in toks[:n] + toks[n + 1:]:
            if t.kind != "bit":
                raise InputNotBits("halves must be bits, got %r" % (t,))
        if toks[:n] != toks[n + 1:]:
            raise MalformedInput("halves must be identical copies")

    def f(prefix):
        toks = list(prefix.tokens())
        if DIVIDER in toks:
            return "1" if oracle(_oracle_bits(toks[:toks.index(DIVIDER)])) else "0"
        return "0"

    def g(suffix, k, token, index):
        return 0

    def h(bits, G, suffix, k):
        m = k + len(suffix)
        if m > n_in:
            return HALT
        toks = list(suffix.tokens())
        if DIVIDER in toks:
            w = _oracle_bits(toks[toks.index(DIVIDER) + 1:])
            return bit(1 if oracle(w) else 0)
        return bit(int(bits))

    def h_witness(bits, G, suffix, k):
        # the machine's own answer logic, recast to emit f's codomain; on
        # truncated inputs (divider in the suffix but only part of a copy
        # after it) this recomputes the oracle on the fragment and disagrees
        # with f, which is exactly the self-consistency failure
        toks = list(suffix.tokens())
        if DIVIDER in toks:
            w = _oracle_bits(toks[toks.index(DIVIDER) + 1:])
            return "1" if oracle(w) else "0"
        return bits

    return BapoMachine(1, 0, f, g, h, name="%s-bapo-n%d" % (name, n),
                       attention_support=lambda seq, m, cache: {},
                       uniform_steps=True, input_check=check,
                       consistency_witness=(g, h_witness))


def build_input_doubling_cot(oracle, n, name="doubling"):
    """Inputs: w alone, |w| <= n.  The CoT writes the second copy."""

    def check(x):
        toks = list(x)
        if not toks:
            raise MalformedInput("input must be nonempty")
        if len(toks) > n:
            raise InputTooLong("input longer than n=%d" % n)
        for t in toks:
            if t.kind != "bit":
                raise InputNotBits("input must be bits, got %r" % (t,))

    def f(prefix):
        toks = list(prefix.tokens())
        if len(toks) < n:
            return "0"
        return "1" if oracle(_oracle_bits(toks[:n])) else "0"

    def g(suffix, k, token, index):
        m = k + len(suffix)
        if n <= m < 2 * n and index == m + 1 - n:
            return 1
        return 0

    def support(seq, m, cache):
        if n <= m < 2 * n:
            return {m + 1 - n: 1}
        return {}

    def h(bits, G, suffix, k):
        m = k + len(suffix)
        if m < n:
            return BLANK
        if m < 2 * n:
            return read_at(G, suffix, k, m + 1 - n)
        if m == 2 * n:
            if k <= n:
                copy = [suffix.base[p - 1] for p in range(n + 1, 2 * n + 1)]
                return bit(1 if oracle(_oracle_bits(copy)) else 0)
            return bit(int(bits))
        return HALT

    return BapoMachine(1, 1, f, g, h, name="%s-cot-n%d" % (name, n),
                       attention_support=support, uniform_steps=True,
                       input_check=check)
