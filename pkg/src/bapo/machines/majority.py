"""Strict-majority machine: a (0,2)-BAPO-CoT counting ones with an L-bit
little-endian counter, then comparing against floor(n/2) big-endian.

CoT layout for input x_1..x_n: n counter blocks of L tokens each (block i
holds popcount(x_1..x_i), little-endian, the Carry token standing for a zero
bit with a pending carry), then up to L compare tokens, then the halt symbol.
"""

from ..core import BapoMachine, read_at
from ..errors import InputNotBits
from ..tokens import BIT0, BIT1, CARRY, HALT


def _bitval(tok):
    # counter bits: Carry reads as 0
    return tok.payload[0] if tok.kind == "bit" else 0


def build_majority_machine(n):
    if n < 2:
        raise ValueError("n must be >= 2")
    L = n.bit_length()                      # ceil(log2(n+1)): count can reach n
    half = n // 2
    thr = [(half >> (L - 1 - j)) & 1 for j in range(L)]   # big-endian bits
    count_end = n + n * L                   # position of the last counter token

    def phase(m):
        """(i, j, cj): block index and offset while counting, compare step after."""
        d = m - n
        if d < n * L:
            return d // L + 1, d % L, None
        return None, None, d - n * L

    def check(x):
        for t in x:
            if t.kind != "bit":
                raise InputNotBits("majority input must be bits, got %r" % (t,))

    def f(prefix):
        return ""

    def g(suffix, k, token, index):
        m = k + len(suffix)
        i, j, cj = phase(m)
        if cj is not None:
            return 1 if index == count_end - cj else 0
        if j == 0 and index == i:
            return 1
        if i >= 2 and index == m + 1 - L:
            return 1
        return 0

    def support(seq, m, cache):
        i, j, cj = phase(m)
        if cj is not None:
            return {count_end - cj: 1}
        sup = {}
        if j == 0:
            sup[i] = 1
        if i >= 2:
            sup[m + 1 - L] = 1
        return sup

    def h(bits, G, suffix, k):
        m = k + len(suffix)
        i, j, cj = phase(m)
        if cj is not None:
            last = suffix[-1]
            if cj >= 1 and last.kind == "bit":
                return HALT
            c = _bitval(read_at(G, suffix, k, count_end - cj))
            if c != thr[cj]:
                return BIT1 if c > thr[cj] else BIT0
            if cj == L - 1:
                return BIT0          # counter equals floor(n/2): no strict majority
            return CARRY             # still checking
        # counting phase: emit bit j of block i = popcount(x_1..x_i)
        prev = 0 if i == 1 else _bitval(read_at(G, suffix, k, m + 1 - L))
        if j == 0:
            carry = read_at(G, suffix, k, i).payload[0]   # add the next input bit
        else:
            carry = 1 if suffix[-1] == CARRY else 0
        s = prev + carry
        if s == 0:
            return BIT0
        if s == 1:
            return BIT1
        return CARRY                 # bit 0 with carry pending

    mach = BapoMachine(0, 2, f, g, h, name="majority-n%d" % n,
                       claims_cbapo=True, attention_support=support,
                       uniform_steps=True, input_check=check)
    mach.counter_width = L
    return mach
