"""Graph-search machine: a (0,3)-BAPO-CoT for directed s-t reachability.

Input: edge tokens in list order, then Node(s), Node(t).  The CoT is a first
fetch token, an n-step initialization block, and then rounds of one fetch
token plus n block tokens.  A SearchMark(cur, node, visited, active) token
carries the per-node search state; the mark (v, v, 1, 0) appears at most
once and is the permanent "v was visited" record, while active flags are
rewritten every round.  The fetch step picks the rightmost active mark of
the previous round (score i/len keeps rightmost on top), emitting Bit(1)
when it is the target, Bit(0) when the frontier is empty, and a new current
marker (u, u, 0, 0) otherwise.

Every step derives its position in this layout from the last token alone
(always visible in the suffix), so no explicit step counter is needed:
Node -> first fetch; marker (u,u,0,0) -> block step 1; mark for node v < n
-> block step v+1; mark for node n -> fetch; Bit -> halt.
"""

from ..core import BapoMachine, read_at
from ..errors import MalformedEncoding
from ..tokens import BIT0, BIT1, HALT, Token, search_mark


def _scan_input(seq):
    """(edge_count, input_len): the input is edges then two node tokens."""
    e = 0
    while e < len(seq) and seq[e].kind == "edge":
        e += 1
    return e, e + 2


def _is_active(tok):
    return tok.kind == "mark" and tok.payload[3] == 1


def build_reachability_machine(n):
    if n < 2:
        raise ValueError("n must be >= 2")

    def check(x):
        if len(x) < 2 or x[-1].kind != "node" or x[-2].kind != "node":
            raise MalformedEncoding("input must end with two node tokens")
        e, n_in = _scan_input(list(x))
        if n_in != len(x):
            raise MalformedEncoding("input must be edge tokens then two nodes")

    def f(prefix):
        return ""

    def _info(suffix):
        """Input layout, memoized per run (the region never changes)."""
        info = suffix.cache.get("rinfo")
        if info is None:
            e, n_in = _scan_input(suffix.base)
            edge_pos = {suffix.base[p].payload: p + 1 for p in range(e)}
            info = (e, n_in, edge_pos)
            suffix.cache["rinfo"] = info
        return info

    def _step_kind(last):
        """What does the last token say the next step is?"""
        if last.kind == "bit":
            return "halt", None
        if last.kind == "node":
            return "first", None
        cur, v, viz, act = last.payload
        if cur == v and viz == 0 and act == 0:
            return "block", 1               # a fresh current marker starts a block
        if v == n:
            return "fetch", None
        return "block", v + 1

    def g(suffix, k, token, index):
        m = k + len(suffix)
        kind, j = _step_kind(suffix[-1])
        if kind in ("halt", "first"):
            return 1 if token.kind == "node" else 0
        if kind == "fetch":
            if token.kind == "node":
                return 1
            if _is_active(token):
                return index / m
            return 0
        u = suffix[-1].payload[0]
        if token.kind == "edge" and token.payload == (u, j):
            return 1
        if token == Token("mark", (j, j, 1, 0)):
            return 1
        if index == m - n and _is_active(token) and token.payload[1] == j:
            return 1
        return 0

    def support(seq, m, cache):
        kind, j = _step_kind(seq[-1])
        e, n_in, edge_pos = cache.get("rinfo") or (None, None, None)
        if e is None:
            e = 0
            while e < len(seq) and seq[e].kind == "edge":
                e += 1
            n_in = e + 2
            edge_pos = {seq[p].payload: p + 1 for p in range(e)}
            cache["rinfo"] = (e, n_in, edge_pos)
        if kind in ("halt", "first"):
            return {n_in - 1: 1, n_in: 1}
        if kind == "fetch":
            sup = {n_in - 1: 1, n_in: 1}
            for p in range(n_in, m):
                if _is_active(seq[p]):
                    sup[p + 1] = (p + 1) / m
            return sup
        u = seq[-1].payload[0]
        sup = {}
        p = edge_pos.get((u, j))
        if p is not None:
            sup[p] = 1
        vm = Token("mark", (j, j, 1, 0))
        # scan the CoT region incrementally for the (at most one) visited marker
        scanned, vmarks = cache.get("rvm", (n_in, {}))
        for q in range(scanned, m):
            t = seq[q]
            if t.kind == "mark" and t.payload[2] == 1:
                vmarks[t.payload[1]] = q + 1
        cache["rvm"] = (m, vmarks)
        q = vmarks.get(j)
        if q is not None and seq[q - 1] == vm:
            sup[q] = 1
        prev = seq[m - n - 1]
        if _is_active(prev) and prev.payload[1] == j:
            sup[m - n] = 1
        return sup

    def h(bits, G, suffix, k):
        m = k + len(suffix)
        last = suffix[-1]
        kind, j = _step_kind(last)
        if kind == "halt":
            return HALT
        e, n_in, edge_pos = _info(suffix)
        if kind == "first":
            t = last.payload[0]
            s = read_at(G, suffix, k, n_in - 1).payload[0]
            return BIT1 if s == t else search_mark(s, s, 0, 0)
        if kind == "fetch":
            t = read_at(G, suffix, k, n_in).payload[0]
            best = None
            for p in range(m, max(k, m - n), -1):       # suffix side of the last round
                if _is_active(suffix.base[p - 1]):
                    best = suffix.base[p - 1]
                    break
            if best is None:
                gp, gt = None, None
                for (tok, pos) in G.entries:            # prefix side, via attention
                    if _is_active(tok) and pos > m - n and (gp is None or pos > gp):
                        gp, gt = pos, tok
                best = gt
            if best is None:
                return BIT0                             # frontier empty: unreachable
            u = best.payload[1]
            return BIT1 if u == t else search_mark(u, u, 0, 0)
        # block step j with current node u
        u = last.payload[0]
        if j == u:
            return search_mark(u, u, 1, 0)              # the current node is now visited
        p0 = m - n                                      # this node's mark, previous round
        if p0 > k:
            tok0 = suffix.base[p0 - 1]
            was_active = _is_active(tok0) and tok0.payload[1] == j
        else:
            tok0 = G.get(p0)
            was_active = tok0 is not None and _is_active(tok0)
        if was_active:
            return search_mark(u, j, 0, 1)              # active nodes stay active
        p = edge_pos.get((u, j))
        has_edge = p is not None and (p > k or (Token("edge", (u, j)), p) in G.entries)
        if has_edge:
            vm = Token("mark", (j, j, 1, 0))
            visited = any(tok == vm for (tok, _) in G.entries)
            if not visited:
                q = p0
                while q > max(k, n_in):                 # visited marker sits j steps into some round
                    if suffix.base[q - 1] == vm:
                        visited = True
                        break
                    q -= n + 1
            if not visited:
                return search_mark(u, j, 0, 1)          # newly reached neighbor
        return search_mark(u, j, 0, 0)

    return BapoMachine(0, 3, f, g, h, name="reachability-n%d" % n,
                       claims_cbapo=True, attention_support=support,
                       uniform_steps=True, input_check=check)
