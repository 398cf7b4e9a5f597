"""Adversarial fooling-pair constructions against bounded candidates.

Each fool_* procedure treats the candidate machine strictly as a black box
(f, g, h callable on demand) and builds two inputs with opposite ground
truths that the candidate cannot distinguish under a fixed prefix/suffix
split and an adversarially scheduled attended set: masking tokens are
placed so that, at every CoT step and for every possible prefix-oracle
output and suffix, the b highest attention scores land on positions whose
contents both inputs share.  A pigeonhole collision of the a-bit prefix
oracle on the constructed prefix family then yields the pair.

The resulting FoolingCertificate is machine-checkable: the verifier replays
both inputs under the recorded schedule, re-verifies that every scheduled
attended set is maximal under the candidate's own g, and confirms the twin
transcripts emit identical tokens while the truths differ.
"""

import itertools
import json
from dataclasses import dataclass, field

from .core import (AttendedSet, SeqView, _call_f, attention_scores,
                   is_maximal)
from .errors import (BandwidthViolation, NoCollision, PreconditionViolated,
                     SearchExhausted)
from .problems import Graph, majority_truth, match3_truth, reachability_truth
from .tokens import (HALT, Token, bit, edge, intval, node, token_from_json,
                     token_to_json)

_OPAQUE = Token("opaque")        # placeholder for not-yet-committed prefix cells


@dataclass
class CandidateCot:
    machine: object
    a: int
    b: int
    c: int                       # step budget

    def __post_init__(self):
        if (self.a, self.b) != (self.machine.a, self.machine.b):
            raise PreconditionViolated(
                "declared bandwidths (%d,%d) do not match the machine's (%d,%d)"
                % (self.a, self.b, self.machine.a, self.machine.b))
        if self.c < 1:
            raise PreconditionViolated("step budget must be >= 1")


@dataclass
class FoolingCertificate:
    problem: str
    input_a: list
    input_b: list
    truth_a: bool
    truth_b: bool
    split_k: int                 # fixed for every step
    attention_schedule: list     # one AttendedSet per step, shared by both inputs
    transcript_a: list           # emitted tokens (HALT included when reached)
    transcript_b: list
    meta: dict = field(default_factory=dict)

    def to_json(self):
        return {
            "problem": self.problem,
            "input_a": [token_to_json(t) for t in self.input_a],
            "input_b": [token_to_json(t) for t in self.input_b],
            "truth_a": self.truth_a, "truth_b": self.truth_b,
            "split_k": self.split_k,
            "attention_schedule": [
                sorted(([token_to_json(t), p] for (t, p) in G.entries),
                       key=lambda e: e[1])
                for G in self.attention_schedule],
            "transcript_a": [token_to_json(t) for t in self.transcript_a],
            "transcript_b": [token_to_json(t) for t in self.transcript_b],
            "meta": self.meta,
        }

    @classmethod
    def from_json(cls, obj):
        return cls(
            obj["problem"],
            [token_from_json(t) for t in obj["input_a"]],
            [token_from_json(t) for t in obj["input_b"]],
            obj["truth_a"], obj["truth_b"], obj["split_k"],
            [AttendedSet((token_from_json(t), p) for (t, p) in G)
             for G in obj["attention_schedule"]],
            [token_from_json(t) for t in obj["transcript_a"]],
            [token_from_json(t) for t in obj["transcript_b"]],
            obj.get("meta", {}),
        )

    def dumps(self):
        return json.dumps(self.to_json(), indent=2, sort_keys=True)

    @classmethod
    def loads(cls, text):
        return cls.from_json(json.loads(text))


def _require(cond, what):
    if not cond:
        raise PreconditionViolated("gate failed: %s" % what)


def _bth(masked_scores, b):
    """b-th largest masked score; -inf with no masks, 0-padded when fewer
    than b masks exist."""
    if not masked_scores:
        return float("-inf")
    ranked = sorted(masked_scores, reverse=True)
    return ranked[b - 1] if len(ranked) >= b else 0.0


def _suffix_view(prefix_len, suffix_tokens, z):
    base = [_OPAQUE] * prefix_len + list(suffix_tokens) + list(z)
    return SeqView(base, prefix_len, len(base))


def _top_b_set(entries, b):
    """entries: [(score, idx, token)]; top-b positive scores, ties by index."""
    ranked = sorted((e for e in entries if e[0] > 0),
                    key=lambda e: (-e[0], e[1]))[:b]
    return AttendedSet((tok, idx) for (_, idx, tok) in ranked)


def _bitstrings(a):
    return ["".join(c) for c in itertools.product("01", repeat=a)]


# --- packing lemma ----------------------------------------------------------

def packing_pair(S, Z, m, s):
    """Find x, y with x+y+s = 0 (mod m) such that neither forms a match with
    any z in Z for any s' in S.  Bounded brute force; existence guaranteed
    under the size preconditions."""
    S, Z = set(S), set(Z)
    if s not in S:
        raise PreconditionViolated("s must be in S")
    root = m ** 0.5
    _require(m > 100, "m > 100")
    _require(max(S) <= root, "max(S) <= sqrt(m)")
    _require(len(S) <= root / 2, "|S| <= sqrt(m)/2")
    _require(len(Z) <= root / 2, "|Z| <= sqrt(m)/2")
    forbidden = {(-z - sp) % m for z in Z for sp in S}
    for x in range(m):
        if x in Z or x in forbidden:
            continue
        y = (-s - x) % m
        if y in Z or y in forbidden:
            continue
        return x, y
    raise SearchExhausted("no packing pair for s=%d (preconditions violated?)" % s)


# --- majority ---------------------------------------------------------------

def fool_majority(candidate, m_param):
    mach, a, b, c = candidate.machine, candidate.a, candidate.b, candidate.c
    _require(m_param > c, "m_param > c")
    cap = b * (2 ** a) * c * (2 ** a + 1)
    lead = 2 ** (2 * a + 1) * b * m_param
    _require(cap < lead, "2^a*c*b*(2^a+1) < 2^(2a+1)*b*m_param")
    P = 2 ** (2 * a + 2) * b * m_param + 2 ** a + 1   # prefix length
    n_suffix = 2 ** a + 1
    suffixes = {ks: [bit(0)] * (2 ** a - ks) + [bit(1)] * (ks + 1)
                for ks in range(2 ** a + 1)}
    pi0, pi1 = set(), set()
    schedules = {}

    def masked_entries(view):
        return ([(mach.g(view, P, bit(0), i), i, bit(0)) for i in pi0] +
                [(mach.g(view, P, bit(1), i), i, bit(1)) for i in pi1])

    for fx in _bitstrings(a):
        for ks in range(2 ** a + 1):
            z, Gs = [], []
            for _step in range(c):
                for val, pool in ((0, pi0), (1, pi1)):
                    while True:
                        view = _suffix_view(P, suffixes[ks], z)
                        thr = _bth([e[0] for e in masked_entries(view)], b)
                        best = None
                        for i in range(1, P + 1):
                            if i in pi0 or i in pi1:
                                continue
                            s = mach.g(view, P, bit(val), i)
                            if s > thr and (best is None or s > best[0]):
                                best = (s, i)
                        if best is None:
                            break
                        pool.add(best[1])
                        if len(pool) > cap:
                            raise BandwidthViolation(
                                "masking capacity exceeded: g admits more than "
                                "%d distinct top positions" % cap)
                view = _suffix_view(P, suffixes[ks], z)
                G = _top_b_set(masked_entries(view), b)
                tok = mach.h(fx, G, view, P)
                Gs.append(G)
                z.append(tok)
                if tok == HALT:
                    break
            schedules[(fx, ks)] = Gs

    # realize the prefixes: masked slots pinned, the rest filled with the
    # remaining source characters in order
    half = 2 ** (2 * a + 1) * b * m_param
    prefixes = {}
    for ks in range(2 ** a + 1):
        vals = [None] * P
        for j in pi0:
            vals[j - 1] = 0
        for j in pi1:
            vals[j - 1] = 1
        rest = ([0] * (half - len(pi0)) + [1] * (half - len(pi1)) +
                [0] * ks + [1] * (2 ** a + 1 - ks))
        it = iter(rest)
        for j in range(P):
            if vals[j] is None:
                vals[j] = next(it)
        prefixes[ks] = [bit(v) for v in vals]

    outs = {ks: _call_f(mach, prefixes[ks], P, {}) for ks in prefixes}
    pair = _collision_pair(outs)
    if pair is None:
        raise NoCollision("f distinguishes all %d prefixes with a=%d bits"
                          % (len(prefixes), a))
    k1, k2 = pair
    fx_star = outs[k1]
    input_a = prefixes[k1] + suffixes[k1]        # strict majority of ones
    input_b = prefixes[k2] + suffixes[k1]        # not a strict majority
    cert = _assemble(candidate, "majority", input_a, input_b, P,
                     schedules[(fx_star, k1)],
                     meta={"m_param": m_param, "pi0": sorted(pi0),
                           "pi1": sorted(pi1), "suffix_ks": [k1, k2]})
    return cert


def _collision_pair(outs):
    """Lexicographically smallest key pair with equal values."""
    keys = sorted(outs)
    for i, k1 in enumerate(keys):
        for k2 in keys[i + 1:]:
            if outs[k1] == outs[k2]:
                return k1, k2
    return None


# --- match3 -----------------------------------------------------------------

def smallest_match3_n(a, b, c):
    n = 11
    while not (2 ** a * c * b * (a + 1) < n / 4 - 1 and 2 * (a + 1) < n / 4):
        n += 1
    return n


def fool_match3(candidate, n):
    mach, a, b, c = candidate.machine, candidate.a, candidate.b, candidate.c
    _require(2 ** a * c * b * (a + 1) < n / 4 - 1, "2^a*c*b*(a+1) < n/4 - 1")
    _require(n > 10, "n > 10")
    _require(2 * (a + 1) < n / 4, "2(a+1) < n/4")
    m = n * n
    filler = m // 3
    S = list(range(a + 1))
    star = {1: filler}                # occupied index -> value (the P* graph)
    forbidden = {(-filler - s) % m for s in S}
    cap = 2 ** a * (a + 1) * c * b + 1
    schedules = {}
    k = n - 1                         # fixed split: everything but the anchor

    def star_entries(view):
        return [(mach.g(view, k, intval(v), i), i, intval(v))
                for i, v in star.items()]

    for fx in _bitstrings(a):
        for s in S:
            z, Gs = [], []
            for _step in range(c):
                while True:
                    view = _suffix_view(k, [intval(s)], z)
                    thr = _bth([e[0] for e in star_entries(view)], b)
                    best = None
                    for i in range(1, n):
                        if i in star:
                            continue
                        for x in range(m):
                            if x in forbidden:
                                continue
                            sc = mach.g(view, k, intval(x), i)
                            if sc > thr and (best is None or sc > best[0]):
                                best = (sc, x, i)
                    if best is None:
                        break
                    _, x, i = best
                    star[i] = x
                    forbidden.update((-x - sp) % m for sp in S)
                    if len(star) > cap:
                        raise BandwidthViolation(
                            "masking capacity exceeded: g admits more than "
                            "%d distinct top tokens" % cap)
                view = _suffix_view(k, [intval(s)], z)
                G = _top_b_set(star_entries(view), b)
                tok = mach.h(fx, G, view, k)
                Gs.append(G)
                z.append(tok)
                if tok == HALT:
                    break
            schedules[(fx, s)] = Gs

    Z = set(star.values())
    pairs = {}
    for s in S:
        x, y = packing_pair(S, Z, m, s)
        pairs[s] = (x, y)
        Z.update((x, y))

    free = sorted(set(range(1, n)) - set(star))
    slot = {s: (free[2 * j], free[2 * j + 1]) for j, s in enumerate(S)}

    def build_prefix(R):
        vals = [filler] * (n - 1)
        for i, v in star.items():
            vals[i - 1] = v
        for s in R:
            x, y = pairs[s]
            i, j = slot[s]
            vals[i - 1], vals[j - 1] = x, y
        return [intval(v) for v in vals]

    subsets = [frozenset(R) for r in range(len(S) + 1)
               for R in itertools.combinations(S, r)]
    built = {R: build_prefix(R) for R in subsets}
    outs = {R: _call_f(mach, built[R], k, {}) for R in subsets}
    best_pair = None
    for R1, R2 in itertools.combinations(subsets, 2):
        if outs[R1] != outs[R2]:
            continue
        diff = R1 ^ R2
        key = (len(diff), sorted(R1), sorted(R2))
        if best_pair is None or key < best_pair[0]:
            best_pair = (key, R1, R2, diff)
    if best_pair is None:
        raise NoCollision("f distinguishes all %d prefixes with a=%d bits"
                          % (len(subsets), a))
    _, R1, R2, diff = best_pair
    s_star = min(diff)
    if s_star not in R1:
        R1, R2 = R2, R1              # input_a carries the planted pair
    input_a = built[R1] + [intval(s_star)]
    input_b = built[R2] + [intval(s_star)]
    cert = _assemble(candidate, "match3", input_a, input_b, k,
                     schedules[(outs[R1], s_star)],
                     meta={"n": n, "m": m, "suffix": s_star,
                           "pair": list(pairs[s_star]),
                           "masked_indices": sorted(star)})
    return cert


# --- reachability -----------------------------------------------------------

def smallest_reachability_d(a, b, c):
    p = 2 * a + 4
    d = 1
    while not c < d * p / (b * 2 ** (a + 1) * p * p):
        d += 1
    return d


def fool_reachability(candidate, d):
    mach, a, b, c = candidate.machine, candidate.a, candidate.b, candidate.c
    p = 2 * a + 4
    m_edges = d * p
    _require(c < m_edges / (b * 2 ** (a + 1) * p * p),
             "c < m_edges / (b*2^(a+1)*p^2)")

    def nid(i, j):
        return j * p + i             # node i of layer j (layers 0..d)

    def eidx(i, j):
        return j * p + i             # canonical index of the edge leaving (i,j)

    sources = [(i, j) for j in range(d) for i in range(1, p + 1)]
    star = {}                        # (i,j) -> target node id (the E* edges)
    indeg = {j: set() for j in range(1, d + 1)}  # layers with a masked in-edge
    S = set(sources)
    cap = 2 ** a * p * p * c * b
    schedules = {}
    k = m_edges

    def nxt(u):
        i, j = u
        return [nid(i2, j + 1) for i2 in range(1, p + 1)
                if nid(i2, j + 1) not in indeg[j + 1]]

    def star_entries(view):
        return [(mach.g(view, k, edge(nid(*u), v), eidx(*u)), eidx(*u),
                 edge(nid(*u), v)) for u, v in star.items()]

    for fx in _bitstrings(a):
        for (si, tj) in itertools.product(range(1, p + 1), repeat=2):
            suffix = [node(nid(si, 0)), node(nid(tj, d))]
            z, Gs = [], []
            for _step in range(c):
                while True:
                    view = _suffix_view(k, suffix, z)
                    thr = _bth([e[0] for e in star_entries(view)], b)
                    best = None
                    for u in S:
                        for v in nxt(u):
                            sc = mach.g(view, k, edge(nid(*u), v), eidx(*u))
                            if sc > thr and (best is None or sc > best[0]):
                                best = (sc, u, v)
                    if best is None:
                        break
                    _, u, v = best
                    star[u] = v
                    indeg[u[1] + 1].add(v)
                    S.discard(u)
                    if len(star) > cap:
                        raise BandwidthViolation(
                            "masking capacity exceeded: g admits more than "
                            "%d distinct top edges" % cap)
                view = _suffix_view(k, suffix, z)
                G = _top_b_set(star_entries(view), b)
                tok = mach.h(fx, G, view, k)
                Gs.append(G)
                z.append(tok)
                if tok == HALT:
                    break
            schedules[(fx, si, tj)] = Gs

    # complete the disjoint paths: each open source connects to the first
    # in-degree-0 node of the next layer
    completion = {}
    for u in sources:
        if u in star:
            continue
        i, j = u
        v = min(nid(i2, j + 1) for i2 in range(1, p + 1)
                if nid(i2, j + 1) not in indeg[j + 1])
        completion[u] = v
        indeg[j + 1].add(v)

    masked_per_layer = [sum(1 for (i, j) in star if j == jj) for jj in range(d)]
    j_star = min(jj for jj in range(d) if masked_per_layer[jj] <= p // 2)
    free_sources = sorted(u for u in completion if u[1] == j_star)
    free_targets = [completion[u] for u in free_sources]

    def edges_for(assign):
        out = dict(star)
        out.update(completion)
        for u, v in zip(free_sources, assign):
            out[u] = v
        return out

    def prefix_tokens(edges_map):
        return [edge(nid(*u), edges_map[u])
                for u in sorted(sources, key=lambda u: eidx(*u))]

    seen, pair = {}, None
    perms = []
    for assign in itertools.permutations(free_targets):
        perms.append(assign)
        out = _call_f(mach, prefix_tokens(edges_for(assign)), k, {})
        if out in seen:
            pair = (seen[out], assign)
            break
        seen[out] = assign
    if pair is None:
        raise NoCollision("f distinguishes all %d permutations with a=%d bits"
                          % (len(perms), a))

    e1, e2 = edges_for(pair[0]), edges_for(pair[1])

    def endpoint(edges_map, i):
        v = nid(i, 0)
        for j in range(d):
            v = edges_map[((v - 1) % p + 1, j)]
        return v

    si_star = next(i for i in range(1, p + 1)
                   if endpoint(e1, i) != endpoint(e2, i))
    t_star = endpoint(e1, si_star)
    tj_star = t_star - d * p
    input_a = prefix_tokens(e1) + [node(nid(si_star, 0)), node(t_star)]
    input_b = prefix_tokens(e2) + [node(nid(si_star, 0)), node(t_star)]
    fx_star = _call_f(mach, prefix_tokens(e1), k, {})
    cert = _assemble(candidate, "reachability", input_a, input_b, k,
                     schedules[(fx_star, si_star, tj_star)],
                     meta={"d": d, "p": p, "n_nodes": p * (d + 1),
                           "layer": j_star,
                           "masked_edges": len(star)})
    return cert


# --- certificate assembly and verification ----------------------------------

def _replay(machine, sequence, k, schedule):
    """Run the candidate under a fixed split and a recorded attended-set
    schedule.  Returns (emissions, infeasible_step or None)."""
    base = list(sequence)
    emissions = []
    for step, G in enumerate(schedule):
        positives = [(s, i + 1, base[i])
                     for i, s in enumerate(attention_scores(machine, base, k))
                     if s > 0]
        if not is_maximal(positives, G, machine.b):
            return emissions, step
        bits = _call_f(machine, base, k, {})
        tok = machine.h(bits, G, SeqView(base, k, len(base)), k)
        emissions.append(tok)
        if tok == HALT:
            break
        base.append(tok)
    return emissions, None


def _truth_of(problem, tokens, meta):
    if problem == "majority":
        return majority_truth([t.payload[0] for t in tokens])
    if problem == "match3":
        vals = [t.payload[0] for t in tokens]
        # the anchor here is the raw suffix integer s: a pair matches when
        # x + y + s = 0 (mod m), i.e. x + y = -s, matching the oracle's
        # anchor convention directly
        return match3_truth(vals, meta["m"])
    if problem == "reachability":
        edges = [t.payload for t in tokens if t.kind == "edge"]
        s, t = tokens[-2].payload[0], tokens[-1].payload[0]
        return reachability_truth(Graph(meta["n_nodes"], list(edges)), s, t)
    raise PreconditionViolated("unknown problem %r" % problem)


def _assemble(candidate, problem, input_a, input_b, k, schedule, meta):
    truth_a = _truth_of(problem, input_a, meta)
    truth_b = _truth_of(problem, input_b, meta)
    ta, _ = _replay(candidate.machine, input_a, k, schedule)
    tb, _ = _replay(candidate.machine, input_b, k, schedule)
    return FoolingCertificate(problem, list(input_a), list(input_b),
                              truth_a, truth_b, k, list(schedule), ta, tb,
                              meta)


@dataclass
class VerifyReport:
    ok: bool
    reason: str = "ok"
    detail: tuple = ()


def verify_fooling_certificate(candidate, cert):
    machine = cert_machine = candidate.machine
    if cert.truth_a == cert.truth_b:
        return VerifyReport(False, "truths-equal", (cert.truth_a,))
    for which, toks, truth in (("a", cert.input_a, cert.truth_a),
                               ("b", cert.input_b, cert.truth_b)):
        if _truth_of(cert.problem, toks, cert.meta) != truth:
            return VerifyReport(False, "stored-truth-wrong", (which,))
    for step, G in enumerate(cert.attention_schedule):
        for (tok, pos) in G.entries:
            if pos > cert.split_k:
                return VerifyReport(False, "attends-past-split", (step, pos))
            if cert.input_a[pos - 1] != tok or cert.input_b[pos - 1] != tok:
                return VerifyReport(False, "masked-positions-differ", (step, pos))
    ea, bad_a = _replay(machine, cert.input_a, cert.split_k, cert.attention_schedule)
    if bad_a is not None:
        return VerifyReport(False, "schedule-infeasible", ("a", bad_a))
    eb, bad_b = _replay(machine, cert.input_b, cert.split_k, cert.attention_schedule)
    if bad_b is not None:
        return VerifyReport(False, "schedule-infeasible", ("b", bad_b))
    if ea != eb:
        step = next(i for i, (x, y) in enumerate(zip(ea, eb)) if x != y) \
            if any(x != y for x, y in zip(ea, eb)) else min(len(ea), len(eb))
        return VerifyReport(False, "emission-divergence", (step,))
    if ea != cert.transcript_a or eb != cert.transcript_b:
        return VerifyReport(False, "transcript-mismatch", ())
    return VerifyReport(True)


# --- heuristic candidates (fooling targets) ---------------------------------

def _parity_bits(a, value):
    return format(value % 2, "b").rjust(a, "0")[-a:]


def heuristic_majority_candidate(a=1, b=1, c=2):
    """Votes with the majority of its attended bits; f reports the parity of
    ones in the prefix."""
    from .core import BapoMachine

    def f(prefix):
        return _parity_bits(a, sum(t.payload[0] for t in prefix.tokens()
                                   if t.kind == "bit"))

    def g(suffix, k, token, index):
        return 0.5 if token.kind == "bit" else 0.0

    def h(bits, G, suffix, k):
        if suffix[-1].kind == "int":
            return HALT
        votes = [tok.payload[0] for (tok, _) in G.entries if tok.kind == "bit"]
        return intval(1 if votes and sum(votes) * 2 > len(votes) else 0)

    mach = BapoMachine(a, b, f, g, h, name="heuristic-majority")
    return CandidateCot(mach, a, b, c)


def heuristic_match3_candidate(a=1, b=1, c=2):
    """Guesses from the residues of its attended integers; f reports the
    parity of the prefix sum."""
    from .core import BapoMachine

    def f(prefix):
        return _parity_bits(a, sum(t.payload[0] for t in prefix.tokens()
                                   if t.kind == "int"))

    def g(suffix, k, token, index):
        if token.kind != "int":
            return 0.0
        return ((token.payload[0] + index) % 5) / 5.0

    def h(bits, G, suffix, k):
        if len(suffix) >= 2:
            return HALT
        hit = any((tok.payload[0] + suffix[-1].payload[0]) % 3 == 0
                  for (tok, _) in G.entries if tok.kind == "int")
        return intval(1 if hit else 0)

    mach = BapoMachine(a, b, f, g, h, name="heuristic-match3")
    return CandidateCot(mach, a, b, c)


def heuristic_reachability_candidate(a=1, b=1, c=1):
    """Attends to edges leaving the source node and answers whether any of
    them hits the target; f reports the parity of edge-endpoint sums."""
    from .core import BapoMachine

    def f(prefix):
        return _parity_bits(a, sum(t.payload[0] + t.payload[1]
                                   for t in prefix.tokens()
                                   if t.kind == "edge"))

    def g(suffix, k, token, index):
        if token.kind != "edge":
            return 0.0
        src = suffix[0].payload[0] if suffix[0].kind == "node" else -1
        return 1.0 if token.payload[0] == src else 0.2

    def h(bits, G, suffix, k):
        if suffix[-1].kind == "bit":
            return HALT
        tgt = suffix[1].payload[0] if len(suffix) >= 2 and \
            suffix[1].kind == "node" else -1
        hit = any(tok.payload[1] == tgt
                  for (tok, _) in G.entries if tok.kind == "edge")
        return bit(1 if hit else 0)

    mach = BapoMachine(a, b, f, g, h, name="heuristic-reachability")
    return CandidateCot(mach, a, b, c)


HEURISTIC_CANDIDATES = {
    "majority": heuristic_majority_candidate,
    "match3": heuristic_match3_candidate,
    "reachability": heuristic_reachability_candidate,
}
