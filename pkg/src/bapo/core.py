"""BAPO execution semantics.

A machine is a triple of pure functions (f, g, h) with prefix bandwidth a
(bits f may pass across the split) and attention bandwidth b (prefix tokens
the suffix side may read losslessly).  For a sequence y_1..y_m split at k,
one step computes h(f(y_1..y_k), G, y_{k+1}..y_m, k) where G is a maximal
attended set: a subset of at most b positive-score (token, index) pairs of
maximal total score under g.  A machine solves an instance only if the
emitted token is the same for *every* split k and *every* maximal G; the
explorer in this module checks exactly that.

Positions are 1-based throughout.

Performance notes (this matters: the test sweeps run on one core).  A naive
split sweep costs m-1 h-calls per CoT step.  Built-in machines therefore
declare `uniform_steps` and provide `attention_support`, which lets
`step_token_set` certify split-invariance from a single traced h evaluation;
the conditions under which this is sound are spelled out at
`_fast_step_outcome`, and the fast path falls back to the dense sweep
whenever they do not hold.
"""

import itertools
import random as _random
from dataclasses import dataclass
from typing import Callable, Optional

from .errors import (BandwidthViolation, BudgetExhausted, IndexOutOfRange,
                     MalformedHalt, MissingWitness, NonTermination)
from .tokens import HALT


class SeqView:
    """A read-only window over a shared token list, addressed by absolute
    1-based position.  `cache` is a per-run scratch dict machines may use to
    memoize position lookups (see read_at / present for the visibility
    rules that keep such caches honest)."""

    __slots__ = ("base", "lo", "hi", "cache")

    def __init__(self, base, lo, hi, cache=None):
        self.base = base
        self.lo = lo    # positions lo+1 .. hi are visible
        self.hi = hi
        self.cache = cache if cache is not None else {}

    def __len__(self):
        return self.hi - self.lo

    def __getitem__(self, i):
        # relative 0-based indexing within the window
        if i < 0:
            i += self.hi - self.lo
        if not 0 <= i < self.hi - self.lo:
            raise IndexOutOfRange("relative index %d outside window" % i)
        return self.base[self.lo + i]

    def at(self, pos):
        """Absolute read; only positions inside the window are visible."""
        if not self.lo < pos <= self.hi:
            raise IndexOutOfRange(
                "position %d outside visible window (%d, %d]" % (pos, self.lo, self.hi))
        if _trace is not None:
            _trace.reads.add(pos)
        return self.base[pos - 1]

    def raw(self, pos):
        """Unchecked read of the underlying sequence, for cache validation
        only: callers may use this to confirm a memoized position still
        holds the expected token, never to route information across the
        split."""
        return self.base[pos - 1] if pos <= len(self.base) else None

    def tokens(self):
        return self.base[self.lo:self.hi]


class AttendedSet:
    """A set of (token, index) pairs the suffix side reads losslessly."""

    __slots__ = ("entries", "by_index")

    def __init__(self, pairs=()):
        self.entries = frozenset(pairs)
        self.by_index = {i: t for (t, i) in self.entries}

    def get(self, pos):
        return self.by_index.get(pos)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __eq__(self, other):
        return isinstance(other, AttendedSet) and self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def __repr__(self):
        return "G{%s}" % ", ".join(
            "%r@%d" % (t, i) for (t, i) in sorted(self.entries, key=lambda e: e[1]))


EMPTY_SET = AttendedSet()


# --- read tracing -----------------------------------------------------------
#
# When a trace is active, read_at / present / SeqView.at record which
# positions the suffix function actually consulted.  The fast split sweep
# uses this to certify that an h evaluation is split-invariant.

class _ReadTrace:
    __slots__ = ("reads", "misses")

    def __init__(self):
        self.reads = set()       # positions whose value influenced h
        self.misses = []         # (pos, token) presence probes that came back absent


_trace = None


def read_at(G, suffix, k, pos):
    """Read position `pos` from the suffix side of a split at k: directly if
    pos > k, through the attended set otherwise."""
    if _trace is not None:
        _trace.reads.add(pos)
    if pos > k:
        if pos > suffix.hi:
            raise IndexOutOfRange("position %d beyond sequence end %d" % (pos, suffix.hi))
        return suffix.base[pos - 1]
    t = G.by_index.get(pos)
    if t is None:
        raise IndexOutOfRange("position %d is in the prefix but not attended" % pos)
    return t


def present(G, suffix, k, pos, token):
    """Can the suffix side see `token` at `pos`?  True iff the position is
    suffix-visible and holds the token, or the (token, pos) pair is in G."""
    if pos > k:
        hit = pos <= suffix.hi and suffix.base[pos - 1] == token
    else:
        hit = (token, pos) in G.entries
    if _trace is not None:
        if hit:
            _trace.reads.add(pos)
        else:
            _trace.misses.append((pos, token))
    return hit


# --- machines ---------------------------------------------------------------

@dataclass
class BapoMachine:
    a: int
    b: int
    f: Callable            # prefix view -> a-bit string
    g: Callable            # (suffix view, k, token, index) -> score in [0, 1]
    h: Callable            # (bits, AttendedSet, suffix view, k) -> Token
    name: str = "machine"
    layers: int = 1
    claims_cbapo: bool = False
    consistency_witness: Optional[tuple] = None      # (g', h') pair
    attention_support: Optional[Callable] = None     # (seq, m) -> {pos: score}, k-invariant
    uniform_steps: bool = False
    input_check: Optional[Callable] = None


@dataclass
class SplitSchedule:
    """Where to cut the sequence at each CoT step.

    policies: input_boundary (k pinned at the original input length),
    fixed (a constant k, clamped into range), random (seeded per-step draw),
    explicit (a caller-supplied list), exhaustive (explorer only).
    """

    policy: str = "input_boundary"
    k: Optional[int] = None
    seed: Optional[int] = None
    ks: Optional[list] = None

    def make_rng(self):
        return _random.Random(self.seed) if self.policy == "random" else None

    def next_k(self, step_index, m, input_len, rng):
        if m == 1:
            return 0  # degenerate: empty prefix is the only admissible cut
        if self.policy == "input_boundary":
            return min(input_len, m - 1)
        if self.policy == "fixed":
            return max(1, min(self.k, m - 1))
        if self.policy == "random":
            return rng.randrange(1, m)
        if self.policy == "explicit":
            if step_index >= len(self.ks):
                raise IndexOutOfRange("explicit schedule exhausted at step %d" % step_index)
            return max(1, min(self.ks[step_index], m - 1))
        raise ValueError("policy %r not usable with run_cot" % self.policy)


@dataclass
class StepOutcome:
    k: int
    attended: AttendedSet
    token: object


@dataclass
class Transcript:
    input: tuple
    steps: list
    answer: object
    halted: bool
    cot_token_count: int


def split_choices(m):
    return (0,) if m == 1 else range(1, m)


# --- scores and maximal sets ------------------------------------------------

def attention_scores(machine, sequence, k):
    """Dense score vector over prefix positions 1..k."""
    m = len(sequence)
    if m == 1 and k == 0:
        return []
    if not 1 <= k < m:
        raise IndexOutOfRange("split %d not in [1, %d)" % (k, m))
    suffix = SeqView(sequence, k, m)
    g = machine.g
    return [g(suffix, k, sequence[i], i + 1) for i in range(k)]


class MaximalSets(list):
    """List of maximal AttendedSets, with a truncation flag."""

    truncated = False


def _maximal_from_positives(positives, b, limit):
    """positives: list of (score, idx, token) with score > 0.  Returns every
    size-<=b subset of maximal total score, canonically ordered (descending
    score, then ascending index), truncated at `limit`."""
    out = MaximalSets()
    if b == 0 or not positives:
        out.append(EMPTY_SET)
        return out
    ranked = sorted(positives, key=lambda e: (-e[0], e[1]))
    if len(ranked) <= b:
        out.append(AttendedSet((tok, idx) for (_, idx, tok) in ranked))
        return out
    threshold = ranked[b - 1][0]
    mandatory = [e for e in ranked if e[0] > threshold]
    tied = [e for e in ranked if e[0] == threshold]
    room = b - len(mandatory)
    base = [(tok, idx) for (_, idx, tok) in mandatory]
    for combo in itertools.combinations(tied, room):
        if len(out) >= limit:
            out.truncated = True
            break
        out.append(AttendedSet(base + [(tok, idx) for (_, idx, tok) in combo]))
    return out


def maximal_attended_sets(scores, tokens, b, limit=64):
    """Public dense-vector form: scores[i-1] scores position i holding tokens[i-1]."""
    if limit < 1:
        raise ValueError("limit must be >= 1")
    positives = [(s, i + 1, tokens[i]) for i, s in enumerate(scores) if s > 0]
    return _maximal_from_positives(positives, b, limit)


def is_maximal(positives, G, b):
    """Check G against a positive-score list [(score, idx, token)]."""
    if len(G) > b:
        return False
    by_idx = {idx: s for (s, idx, _) in positives}
    total = 0.0
    for (tok, idx) in G.entries:
        s = by_idx.get(idx)
        if s is None:
            return False
        total += s
    best = sum(s for (s, _, _) in sorted(positives, key=lambda e: -e[0])[:b])
    return abs(total - best) < 1e-12


# --- single-step evaluation -------------------------------------------------

def _call_f(machine, sequence, k, cache):
    bits = machine.f(SeqView(sequence, 0, k, cache))
    if len(bits) != machine.a or (bits and set(bits) - {"0", "1"}):
        raise BandwidthViolation(
            "f returned %r, expected %d bits" % (bits, machine.a))
    return bits


def bapo_step(machine, sequence, k, G, cache=None):
    """h(f(prefix), G, suffix, k) with bandwidth checks."""
    if len(G) > machine.b:
        raise BandwidthViolation("|G| = %d exceeds b = %d" % (len(G), machine.b))
    if cache is None:
        cache = {}
    m = len(sequence)
    bits = _call_f(machine, sequence, k, cache)
    return machine.h(bits, G, SeqView(sequence, k, m, cache), k)


def _positives_for(machine, sequence, m, cache):
    """Sparse positive-score list [(score, idx, token)] valid for every k,
    or None when the machine provides no k-invariant support hint."""
    if machine.attention_support is None:
        return None
    support = machine.attention_support(sequence, m, cache)
    return sorted(((s, i, sequence[i - 1]) for i, s in support.items() if s > 0),
                  key=lambda e: (-e[0], e[1]))


def evaluate_all_splits(machine, sequence, set_limit=64):
    """Sweep every split k and every maximal G; return (distinct output
    tokens, table of (k, G, token)).  A machine solves the instance iff the
    output set is a singleton equal to the truth token."""
    sequence = list(sequence)
    m = len(sequence)
    if m < 2:
        raise IndexOutOfRange("need at least 2 tokens to split")
    cache = {}
    positives = _positives_for(machine, sequence, m, cache)
    table = []
    outputs = set()
    for k in range(1, m):
        if positives is None:
            sets = maximal_attended_sets(
                attention_scores(machine, sequence, k), sequence, machine.b, set_limit)
        else:
            sets = _maximal_from_positives(
                [e for e in positives if e[1] <= k], machine.b, set_limit)
        for G in sets:
            tok = bapo_step(machine, sequence, k, G, cache)
            outputs.add(tok)
            table.append((k, G, tok))
    return outputs, table


# --- split-invariance certification (the fast sweep) ------------------------

def _fast_step_outcome(machine, sequence, m, positives, cache):
    """Try to certify in O(1 h-call) that the next emitted token is the same
    for every split k and every maximal G.  Sound when all of:

      * a = 0 (f carries nothing, so h cannot depend on the prefix oracle);
      * at most b positive scores, so every positive position is in the
        unique maximal G at every k >= its index;
      * every position h actually read is positive-scored (or the final
        position m, which is suffix-visible at every k < m);
      * every presence probe that missed targets a cell that really does not
        hold the probed token (so the miss reproduces at every k).

    Under those conditions the traced h run at k = m-1 reads the same values
    and takes the same branches at every other split.  Returns the token or
    None when certification fails and the dense sweep must run.
    """
    global _trace
    if machine.a != 0 or len(positives) > machine.b:
        return None
    k = m - 1 if m > 1 else 0
    G = AttendedSet((tok, idx) for (_, idx, tok) in positives if idx <= k)
    trace = _ReadTrace()
    _trace = trace
    try:
        tok = machine.h("", G, SeqView(sequence, k, m, cache), k)
    except IndexOutOfRange:
        return None   # h needed something unreadable; let the dense sweep surface it
    finally:
        _trace = None
    support_idx = {idx for (_, idx, _) in positives}
    for pos in trace.reads:
        if pos != m and pos not in support_idx:
            return None
    for (pos, probed) in trace.misses:
        if pos <= m and sequence[pos - 1] == probed:
            return None
    return tok


def step_token_set(machine, sequence, set_limit=64):
    """Distinct tokens the machine can emit next, over all (k, G)."""
    m = len(sequence)
    cache = {}
    positives = _positives_for(machine, sequence, m, cache)
    if positives is not None and machine.uniform_steps:
        tok = _fast_step_outcome(machine, sequence, m, positives, cache)
        if tok is not None:
            return {tok}
    outputs = set()
    for k in split_choices(m):
        if positives is None:
            sets = maximal_attended_sets(
                attention_scores(machine, sequence, k), sequence, machine.b, set_limit)
        else:
            sets = _maximal_from_positives(
                [e for e in positives if e[1] <= k], machine.b, set_limit)
        for G in sets:
            outputs.add(bapo_step(machine, sequence, k, G, cache))
    return outputs


# --- the CoT loop -----------------------------------------------------------

def run_cot(machine, input, schedule=None, tiebreak="first", max_steps=100000,
            set_limit=64):
    """Iterate the machine, appending one token per step until Halt."""
    if schedule is None:
        schedule = SplitSchedule()
    if max_steps < 1:
        raise ValueError("max_steps must be >= 1")
    if machine.input_check is not None:
        machine.input_check(input)
    sequence = list(input)
    n_input = len(sequence)
    rng = schedule.make_rng()
    tb_rng = None
    if isinstance(tiebreak, tuple) and tiebreak[0] == "random":
        tb_rng = _random.Random(tiebreak[1])
    cache = {}
    steps = []
    for i in range(max_steps):
        m = len(sequence)
        k = schedule.next_k(i, m, n_input, rng)
        positives = _positives_for(machine, sequence, m, cache)
        if positives is None:
            sets = maximal_attended_sets(
                attention_scores(machine, sequence, k), sequence, machine.b, set_limit)
        else:
            sets = _maximal_from_positives(
                [e for e in positives if e[1] <= k], machine.b, set_limit)
        if tiebreak == "first":
            G = sets[0]
        elif tb_rng is not None:
            G = sets[tb_rng.randrange(len(sets))]
        else:
            G = tiebreak(i, sets)
        tok = bapo_step(machine, sequence, k, G, cache)
        steps.append(StepOutcome(k, G, tok))
        if tok == HALT:
            if len(steps) < 2:
                raise MalformedHalt("halt emitted with no preceding answer token")
            return Transcript(tuple(input), steps, steps[-2].token, True, len(steps) - 1)
        sequence.append(tok)
    raise NonTermination("no halt within %d steps" % max_steps)


@dataclass
class ExploreSummary:
    max_tokens: int
    answers: set
    consistent: bool
    leaves: int
    branched: bool


def explore_cot_worstcase(machine, input, branch_budget=100000, set_limit=64,
                          max_steps=100000):
    """Depth-first search over every per-step (k, G) choice.

    Children are deduplicated by emitted token (two choices that emit the
    same token lead to the same continuation), and repeated continuation
    states are pruned.  Each extra distinct child beyond the first consumes
    branch budget; budget 1 degenerates to the single first-choice path.
    """
    if branch_budget < 1:
        raise ValueError("branch_budget must be >= 1")
    if machine.input_check is not None:
        machine.input_check(input)
    sequence = list(input)
    n_input = len(sequence)
    summary = ExploreSummary(0, set(), True, 0, False)
    budget = [branch_budget]
    seen = set()

    def visit(depth):
        if depth > max_steps:
            raise NonTermination("no halt within %d steps" % max_steps)
        tokens = step_token_set(machine, sequence, set_limit)
        if len(tokens) > 1:
            summary.branched = True
            key = tuple(sequence)
            if key in seen:
                return
            seen.add(key)
        first = True
        for tok in tokens:
            if not first:
                budget[0] -= 1
                if budget[0] <= 0:
                    raise BudgetExhausted("branch budget exhausted",
                                          partial_max=summary.max_tokens)
            first = False
            if tok == HALT:
                if len(sequence) == n_input:
                    raise MalformedHalt("halt emitted with no preceding answer token")
                count = len(sequence) - n_input
                summary.leaves += 1
                summary.answers.add(sequence[-1])
                if count > summary.max_tokens:
                    summary.max_tokens = count
            else:
                sequence.append(tok)
                visit(depth + 1)
                sequence.pop()

    visit(0)
    summary.consistent = len(summary.answers) <= 1
    return summary.max_tokens, summary


# --- consistency ------------------------------------------------------------

@dataclass
class ConsistencyReport:
    consistent: bool
    trivially: bool
    checked: int
    first_violation: Optional[tuple] = None   # (input, k, G, got, expected)


def check_consistency(machine, inputs, set_limit=64):
    """Verify f(x_1..x_n) = h'(f(x_1..x_k), G, x_{k+1}..x_n, k) for every
    input, split, and maximal G under the witness attention g'."""
    if machine.a == 0:
        return ConsistencyReport(True, True, 0)
    if machine.consistency_witness is None:
        raise MissingWitness("machine has a > 0 and no (g', h') witness")
    g2, h2 = machine.consistency_witness
    checked = 0
    for x in inputs:
        sequence = list(x)
        m = len(sequence)
        if m < 2:
            continue
        cache = {}
        expected = _call_f(machine, sequence, m, cache)
        for k in range(1, m):
            suffix = SeqView(sequence, k, m, cache)
            scores = [g2(suffix, k, sequence[i], i + 1) for i in range(k)]
            sets = maximal_attended_sets(scores, sequence, machine.b, set_limit)
            bits = _call_f(machine, sequence, k, cache)
            for G in sets:
                got = h2(bits, G, suffix, k)
                checked += 1
                if got != expected:
                    return ConsistencyReport(False, False, checked,
                                             (tuple(x), k, G, got, expected))
    return ConsistencyReport(True, False, checked)
