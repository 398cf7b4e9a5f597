"""Truth oracles, instance generators, and token encoders for the three
benchmark problems (majority, match3, reachability).

Randomness comes from SplitMix64, a counter-based generator spelled out in
full here so that corpora are reproducible bit-for-bit from (args, seed)
across implementations and languages.
"""

from collections import deque
from dataclasses import dataclass, field

from . import tokens as tk
from .errors import MalformedEncoding, NodeOutOfRange, ValueOutOfRange

_MASK = (1 << 64) - 1


class SplitMix64:
    """SplitMix64 PRNG.  next_u64 advances the state by the golden-gamma
    constant and mixes; randrange reduces by modulus; shuffle is the
    descending Fisher-Yates using randrange(i+1)."""

    def __init__(self, seed):
        self.state = seed & _MASK

    def next_u64(self):
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def randrange(self, n):
        return self.next_u64() % n

    def shuffle(self, xs):
        for i in range(len(xs) - 1, 0, -1):
            j = self.randrange(i + 1)
            xs[i], xs[j] = xs[j], xs[i]

    def sample(self, population, k):
        pool = list(population)
        self.shuffle(pool)
        return pool[:k]

    def choice(self, seq):
        return seq[self.randrange(len(seq))]


# --- truth oracles ----------------------------------------------------------

def majority_truth(bits):
    if not bits:
        raise ValueOutOfRange("empty bit list")
    return sum(bits) * 2 > len(bits)


def match3_truth(values, m):
    """Is there i < j < n with x_i + x_j + x_n = 0 (mod m)?  The last
    element is the anchor; the pair is drawn strictly before it."""
    if len(values) < 3:
        raise ValueOutOfRange("need at least 3 values")
    for v in values:
        if not 0 <= v < m:
            raise ValueOutOfRange("value %d not in Z_%d" % (v, m))
    xn = values[-1]
    seen = set()
    for v in values[:-1]:
        if (-xn - v) % m in seen:
            return True
        seen.add(v)
    return False


@dataclass
class Graph:
    n: int
    edges: list = field(default_factory=list)

    def __post_init__(self):
        seen = set()
        for (u, v) in self.edges:
            if not (1 <= u <= self.n and 1 <= v <= self.n):
                raise NodeOutOfRange("edge (%d, %d) outside [1, %d]" % (u, v, self.n))
            if u == v or (u, v) in seen:
                raise MalformedEncoding("self-loop or duplicate edge (%d, %d)" % (u, v))
            seen.add((u, v))

    def adjacency(self):
        adj = {i: [] for i in range(1, self.n + 1)}
        for (u, v) in self.edges:
            adj[u].append(v)
        return adj


def reachability_truth(graph, s, t):
    if not (1 <= s <= graph.n and 1 <= t <= graph.n):
        raise NodeOutOfRange("s=%d or t=%d outside [1, %d]" % (s, t, graph.n))
    if s == t:
        return True
    adj = graph.adjacency()
    seen = {s}
    queue = deque([s])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if v == t:
                return True
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return False


# --- instance records -------------------------------------------------------

@dataclass
class InstanceRecord:
    problem: str
    n: int
    seed: int
    truth: bool
    payload: dict

    def instance_id(self):
        return "%s-n%d-seed%d" % (self.problem, self.n, self.seed)

    def to_json(self):
        return {"problem": self.problem, "n": self.n, "seed": self.seed,
                "truth": self.truth, "payload": self.payload}

    @classmethod
    def from_json(cls, obj):
        return cls(obj["problem"], obj["n"], obj["seed"], obj["truth"], obj["payload"])


def gen_majority(n, label, seed):
    """Exactly floor(n/2)+1 ones for a yes instance, floor(n/2) for a no,
    randomly shuffled."""
    if n < 1:
        raise ValueOutOfRange("n must be >= 1")
    ones = n // 2 + 1 if label == "yes" else n // 2
    bits = [1] * ones + [0] * (n - ones)
    SplitMix64(seed).shuffle(bits)
    return InstanceRecord("majority", n, seed, majority_truth(bits), {"bits": bits})


def gen_match3(n, label, seed):
    """Modulus m = 2n+1.  Yes: plant two distinct values summing to a random
    target, pad randomly.  No: pick one member of each pair (i, t-i),
    skipping the self-paired element t/2, so no two entries sum to t."""
    if n < 2:
        raise ValueOutOfRange("n must be >= 2")
    m = 2 * n + 1
    rng = SplitMix64(seed)
    if label == "yes":
        a = rng.randrange(m)
        b = rng.randrange(m - 1)
        if b >= a:
            b += 1
        t = (a + b) % m
        values = [a, b] + [rng.randrange(m) for _ in range(n - 2)]
    else:
        t = rng.randrange(m)
        half = (t * pow(2, -1, m)) % m   # the unique i with 2i = t (mod m)
        values = []
        for i in range(m):
            j = (t - i) % m
            if i == half or i > j:
                continue
            values.append(i if rng.randrange(2) == 0 else j)
        assert len(values) == n
    rng.shuffle(values)
    payload = {"m": m, "target": t, "list": values}
    return InstanceRecord("match3", n, seed,
                          match3_truth(values + [(-t) % m], m), payload)


def _edge_cap_yes(n):
    return min(3 * n, n * (n - 1) // 2)


def gen_reachability(n, label, seed):
    """Yes: an s-t path through floor(n/2) distinct intermediates plus random
    padding edges up to the cap.  No: partition into S (with s) and T (with
    t) and place edges strictly inside each side."""
    if n < 3:
        raise ValueOutOfRange("n must be >= 3")
    rng = SplitMix64(seed)
    nodes = list(range(1, n + 1))
    if label == "yes":
        s, t = rng.sample(nodes, 2)
        mids = rng.sample([v for v in nodes if v not in (s, t)], n // 2)
        path = [s] + mids + [t]
        edges = list(zip(path, path[1:]))
        chosen = set(edges)
        cap = _edge_cap_yes(n)
        while len(edges) < cap:
            u = nodes[rng.randrange(n)]
            v = nodes[rng.randrange(n)]
            if u != v and (u, v) not in chosen:
                chosen.add((u, v))
                edges.append((u, v))
    else:
        perm = list(nodes)
        rng.shuffle(perm)
        S, T = perm[:n // 2], perm[n // 2:]
        s, t = S[rng.randrange(len(S))], T[rng.randrange(len(T))]
        cap_s = len(S) * (len(S) - 1)
        cap_t = len(T) * (len(T) - 1)
        total = min(3 * n, cap_s + cap_t)
        e_s = min(total // 2, cap_s)
        e_t = min(total - e_s, cap_t)
        e_s = min(total - e_t, cap_s)

        def pick_inside(side, count):
            pairs = [(u, v) for u in side for v in side if u != v]
            rng.shuffle(pairs)
            return pairs[:count]

        edges = pick_inside(S, e_s) + pick_inside(T, e_t)
    graph = Graph(n, edges)
    payload = {"n": n, "edges": [list(e) for e in edges], "source": s, "target": t}
    return InstanceRecord("reachability", n, seed,
                          reachability_truth(graph, s, t), payload)


GENERATORS = {"majority": gen_majority, "match3": gen_match3,
              "reachability": gen_reachability}


# --- token encoding ---------------------------------------------------------

def encode_instance(record):
    p = record.payload
    if record.problem == "majority":
        return [tk.bit(b) for b in p["bits"]]
    if record.problem == "match3":
        xs = list(p["list"]) + [(-p["target"]) % p["m"]]
        return [tk.intval(v) for v in xs]
    if record.problem == "reachability":
        seq = [tk.edge(u, v) for (u, v) in p["edges"]]
        seq.append(tk.node(p["source"]))
        seq.append(tk.node(p["target"]))
        return seq
    raise MalformedEncoding("unknown problem %r" % record.problem)


def decode_instance(problem, sequence, m=None):
    """Inverse of encode_instance, back to a payload dict."""
    if problem == "majority":
        return {"bits": [t.payload[0] for t in sequence]}
    if problem == "match3":
        if m is None:
            raise MalformedEncoding("match3 decoding needs the modulus")
        vals = [t.payload[0] for t in sequence]
        return {"m": m, "target": (-vals[-1]) % m, "list": vals[:-1]}
    if problem == "reachability":
        if len(sequence) < 2 or sequence[-1].kind != "node" or sequence[-2].kind != "node":
            raise MalformedEncoding("input must end with two node tokens")
        edges = [list(t.payload) for t in sequence[:-2]]
        return {"n": max([0] + [max(e) for e in edges] +
                         [sequence[-2].payload[0], sequence[-1].payload[0]]),
                "edges": edges,
                "source": sequence[-2].payload[0], "target": sequence[-1].payload[0]}
    raise MalformedEncoding("unknown problem %r" % problem)


def instance_truth(record):
    p = record.payload
    if record.problem == "majority":
        return majority_truth(p["bits"])
    if record.problem == "match3":
        return match3_truth(list(p["list"]) + [(-p["target"]) % p["m"]], p["m"])
    if record.problem == "reachability":
        return reachability_truth(Graph(p["n"], [tuple(e) for e in p["edges"]]),
                                  p["source"], p["target"])
    raise MalformedEncoding("unknown problem %r" % record.problem)
