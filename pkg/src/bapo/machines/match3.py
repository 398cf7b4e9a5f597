"""Pair-sum search machine: a (0,2)-BAPO-CoT for deciding whether some pair
x_i + x_j (i < j < n) sums to -x_n mod m.

Odd CoT steps write the complement -(x_j + x_n) mod m for the current pair
index j; even steps write a 1/0 indicator of whether that complement occurs
at some index < n other than j.  Halts on the first hit, or after the last
pair index.
"""

from ..core import BapoMachine, present, read_at
from ..errors import TokenOutOfRange
from ..tokens import HALT, intval

INT1 = intval(1)


def build_match3_machine(n, m):
    if n < 3:
        raise ValueError("n must be >= 3")
    if m < 2:
        raise ValueError("m must be >= 2")

    def check(x):
        for t in x:
            if t.kind != "int" or not 0 <= t.payload[0] < m:
                raise TokenOutOfRange("match3 input must be Z_%d values, got %r" % (m, t))

    def f(prefix):
        return ""

    def g(suffix, k, token, index):
        t_len = k + len(suffix)
        i = t_len - n + 1
        if i % 2 == 1:                      # writing the complement for pair j
            j = (i + 1) // 2
            return 1 if index in (j, n) else 0
        j = i // 2                          # searching for the last written value
        if index < n and index != j and token == suffix[-1]:
            return 1
        return 0

    def support(seq, t_len, cache):
        i = t_len - n + 1
        if i % 2 == 1:
            j = (i + 1) // 2
            return {j: 1, n: 1}
        j = i // 2
        target = seq[-1]
        return {p: 1 for p in range(1, n) if p != j and seq[p - 1] == target}

    def h(bits, G, suffix, k):
        t_len = k + len(suffix)
        i = t_len - n + 1
        last = suffix[-1]
        if i % 2 == 1:
            if i >= 3 and last == INT1:
                return HALT                 # match reported by the last check
            if i == 2 * n - 1:
                return HALT                 # every pair index checked
            j = (i + 1) // 2
            xj = read_at(G, suffix, k, j).payload[0]
            xn = read_at(G, suffix, k, n).payload[0]
            return intval((-(xj + xn)) % m)
        j = i // 2
        hit = any(present(G, suffix, k, p, last) for p in range(1, n) if p != j)
        return intval(1 if hit else 0)

    return BapoMachine(0, 2, f, g, h, name="match3-n%d-m%d" % (n, m),
                       claims_cbapo=True, attention_support=support,
                       uniform_steps=True, input_check=check)
