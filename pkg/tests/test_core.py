"""Execution-semantics unit and property tests: scores, maximal sets, the
single step, split sweeps, the CoT loop, exploration, and consistency."""

import dataclasses
import itertools

import pytest
from hypothesis import given, settings, strategies as st

from bapo import tokens as tk
from bapo.core import (AttendedSet, BapoMachine, EMPTY_SET, SeqView,
                       SplitSchedule, attention_scores, bapo_step,
                       check_consistency, evaluate_all_splits,
                       explore_cot_worstcase, is_maximal,
                       maximal_attended_sets, present, read_at, run_cot,
                       step_token_set)
from bapo.errors import (BandwidthViolation, BudgetExhausted, IndexOutOfRange,
                         MalformedHalt, MissingWitness, NonTermination)
from bapo.machines import (build_input_doubling_cot, build_majority_machine,
                           build_match3_machine)


def const_machine(tok, a=0, b=0, **kw):
    """Emits `tok` once then Halt, ignoring everything."""
    def h(bits, G, suffix, k):
        return tk.HALT if suffix[-1] == tok else tok
    return BapoMachine(a, b, lambda p: "0" * a, lambda s, k, t, i: 0, h, **kw)


def split_sensitive_machine():
    """Answer depends on the split index: int(k mod 2), then Halt."""
    def h(bits, G, suffix, k):
        return tk.HALT if suffix[-1].kind == "int" else tk.intval(k % 2)
    return BapoMachine(0, 0, lambda p: "", lambda s, k, t, i: 0, h,
                       name="split-sensitive")


# --- SeqView and read helpers ------------------------------------------------

def test_seqview_window_and_bounds():
    base = [tk.bit(0), tk.bit(1), tk.bit(1)]
    v = SeqView(base, 1, 3)
    assert len(v) == 2
    assert v[0] == tk.bit(1) and v[-1] == tk.bit(1)
    assert v.tokens() == base[1:3]
    assert v.at(2) == tk.bit(1) and v.at(3) == tk.bit(1)
    with pytest.raises(IndexOutOfRange):
        v.at(1)          # inside the prefix
    with pytest.raises(IndexOutOfRange):
        v[2]


def test_read_at_routes_through_attended_set():
    base = [tk.bit(0), tk.bit(1), tk.bit(1)]
    suffix = SeqView(base, 2, 3)
    G = AttendedSet([(tk.bit(0), 1)])
    assert read_at(G, suffix, 2, 1) == tk.bit(0)     # prefix, attended
    assert read_at(G, suffix, 2, 3) == tk.bit(1)     # suffix, direct
    with pytest.raises(IndexOutOfRange):
        read_at(G, suffix, 2, 2)                     # prefix, not attended
    with pytest.raises(IndexOutOfRange):
        read_at(G, suffix, 2, 4)                     # past the end


def test_present_checks_both_sides():
    base = [tk.bit(0), tk.bit(1), tk.bit(1)]
    suffix = SeqView(base, 2, 3)
    G = AttendedSet([(tk.bit(0), 1)])
    assert present(G, suffix, 2, 1, tk.bit(0))
    assert not present(G, suffix, 2, 1, tk.bit(1))
    assert not present(G, suffix, 2, 2, tk.bit(1))   # held but not attended
    assert present(G, suffix, 2, 3, tk.bit(1))
    assert not present(G, suffix, 2, 9, tk.bit(1))


# --- attention scores --------------------------------------------------------

def test_zero_g_gives_all_zero_vector():
    m = const_machine(tk.intval(0))
    seq = [tk.bit(0)] * 5
    assert attention_scores(m, seq, 3) == [0, 0, 0]


def test_attention_scores_rejects_bad_split():
    m = const_machine(tk.intval(0))
    seq = [tk.bit(0)] * 3
    with pytest.raises(IndexOutOfRange):
        attention_scores(m, seq, 0)
    with pytest.raises(IndexOutOfRange):
        attention_scores(m, seq, 3)
    assert attention_scores(m, [tk.bit(0)], 0) == []   # m = 1 degenerate


def test_majority_counting_phase_scores_two_positions():
    n = 6
    mach = build_majority_machine(n)
    seq = [tk.bit(1), tk.bit(0), tk.bit(1), tk.bit(1), tk.bit(0), tk.bit(1)]
    # run a few steps, then inspect the dense score vector mid-count
    t = run_cot(mach, seq, max_steps=1000)
    L = mach.counter_width
    # after L emitted tokens the machine starts block 2: it must consult both
    # the next input bit and the previous counter block's matching bit
    state = list(seq) + [s.token for s in t.steps[:L]]
    k = len(state) - 1
    scores = attention_scores(mach, state, k)
    assert sum(1 for s in scores if s > 0) == 2
    assert all(s in (0, 1) for s in scores)


# --- maximal attended sets ---------------------------------------------------

def toks(n):
    return [tk.intval(i + 1) for i in range(n)]


def test_unique_maximum_single_set():
    sets = maximal_attended_sets([1, 0, 0.5], toks(3), b=1)
    assert list(sets) == [AttendedSet([(tk.intval(1), 1)])]
    assert not sets.truncated


def test_three_way_tie_three_singletons():
    sets = maximal_attended_sets([0.5, 0.5, 0.5], toks(3), b=1)
    assert len(sets) == 3
    assert {frozenset(G.entries) for G in sets} == {
        frozenset([(tk.intval(i + 1), i + 1)]) for i in range(3)}


def test_all_zero_scores_yield_empty_set():
    sets = maximal_attended_sets([0, 0, 0], toks(3), b=3)
    assert list(sets) == [EMPTY_SET]


def test_b_zero_yields_empty_set():
    sets = maximal_attended_sets([1, 1], toks(2), b=0)
    assert list(sets) == [EMPTY_SET]


def test_truncation_flag():
    sets = maximal_attended_sets([0.5] * 10, toks(10), b=2, limit=5)
    assert len(sets) == 5 and sets.truncated


def test_canonical_order_is_deterministic():
    a = maximal_attended_sets([0.3, 0.7, 0.3, 0.7], toks(4), b=2)
    b = maximal_attended_sets([0.3, 0.7, 0.3, 0.7], toks(4), b=2)
    assert list(a) == list(b)
    assert a[0] == AttendedSet([(tk.intval(2), 2), (tk.intval(4), 4)])


def brute_force_maximal(scores, b):
    """All subsets of positive positions with |S| <= b of maximal score."""
    pos = [i + 1 for i, s in enumerate(scores) if s > 0]
    best, out = -1.0, []
    for r in range(min(b, len(pos)) + 1):
        for combo in itertools.combinations(pos, r):
            total = sum(scores[i - 1] for i in combo)
            if total > best + 1e-12:
                best, out = total, [frozenset(combo)]
            elif abs(total - best) <= 1e-12:
                out.append(frozenset(combo))
    # subsets of equal score: keep only maximal-score ones of any size
    return set(out)


@given(st.lists(st.sampled_from([0, 0.25, 0.5, 1.0]), min_size=0, max_size=7),
       st.integers(min_value=0, max_value=4))
@settings(max_examples=300, deadline=None)
def test_maximal_sets_match_brute_force(scores, b):
    sets = maximal_attended_sets(scores, toks(len(scores)), b, limit=10000)
    got = {frozenset(i for (_, i) in G.entries) for G in sets}
    want = brute_force_maximal(scores, b)
    # the enumerator returns full-score subsets; brute force may include
    # smaller subsets only when every score is zero (empty set case)
    assert got == want
    positives = [(s, i + 1, toks(len(scores))[i])
                 for i, s in enumerate(scores) if s > 0]
    for G in sets:
        assert len(G) <= b or not positives
        assert is_maximal(positives, G, b)


def test_is_maximal_rejects_submaximal():
    positives = [(1.0, 1, tk.intval(1)), (0.5, 2, tk.intval(2))]
    assert is_maximal(positives, AttendedSet([(tk.intval(1), 1)]), 1)
    assert not is_maximal(positives, AttendedSet([(tk.intval(2), 2)]), 1)
    assert not is_maximal(positives, AttendedSet([(tk.intval(3), 3)]), 1)


# --- bapo_step and bandwidth -------------------------------------------------

def test_step_checks_f_width():
    bad = BapoMachine(2, 0, lambda p: "0", lambda s, k, t, i: 0,
                      lambda bits, G, s, k: tk.HALT)
    with pytest.raises(BandwidthViolation):
        bapo_step(bad, [tk.bit(0), tk.bit(1)], 1, EMPTY_SET)


def test_step_checks_f_alphabet():
    bad = BapoMachine(1, 0, lambda p: "x", lambda s, k, t, i: 0,
                      lambda bits, G, s, k: tk.HALT)
    with pytest.raises(BandwidthViolation):
        bapo_step(bad, [tk.bit(0), tk.bit(1)], 1, EMPTY_SET)


def test_step_checks_attended_size():
    m = const_machine(tk.intval(0))
    G = AttendedSet([(tk.bit(0), 1)])
    with pytest.raises(BandwidthViolation):
        bapo_step(m, [tk.bit(0), tk.bit(1)], 1, G)


def test_step_echo_last_token():
    echo = BapoMachine(0, 0, lambda p: "", lambda s, k, t, i: 0,
                       lambda bits, G, s, k: s[-1])
    seq = [tk.bit(0), tk.bit(1), tk.intval(9)]
    assert bapo_step(echo, seq, 2, EMPTY_SET) == tk.intval(9)


# --- evaluate_all_splits -----------------------------------------------------

def test_length_two_input_tests_single_split():
    m = const_machine(tk.intval(0))
    outputs, table = evaluate_all_splits(m, [tk.bit(0), tk.bit(1)])
    assert outputs == {tk.intval(0)}
    assert [k for (k, _, _) in table] == [1]


def test_split_sensitive_machine_yields_two_outputs():
    outputs, _ = evaluate_all_splits(split_sensitive_machine(),
                                     [tk.bit(0)] * 4)
    assert outputs == {tk.intval(0), tk.intval(1)}


def test_too_short_input_rejected():
    with pytest.raises(IndexOutOfRange):
        evaluate_all_splits(const_machine(tk.intval(0)), [tk.bit(0)])


# --- run_cot -----------------------------------------------------------------

def test_minimal_run_two_steps():
    m = const_machine(tk.intval(7))
    t = run_cot(m, [tk.bit(0), tk.bit(1)])
    assert t.halted and t.answer == tk.intval(7)
    assert t.cot_token_count == 1 and len(t.steps) == 2
    assert t.steps[-1].token == tk.HALT


def test_halt_first_is_malformed():
    m = BapoMachine(0, 0, lambda p: "", lambda s, k, t, i: 0,
                    lambda bits, G, s, k: tk.HALT)
    with pytest.raises(MalformedHalt):
        run_cot(m, [tk.bit(0), tk.bit(1)])


def test_nontermination_raises():
    m = BapoMachine(0, 0, lambda p: "", lambda s, k, t, i: 0,
                    lambda bits, G, s, k: tk.intval(0))
    with pytest.raises(NonTermination):
        run_cot(m, [tk.bit(0), tk.bit(1)], max_steps=20)


def test_halt_appears_exactly_once_and_last():
    mach = build_majority_machine(5)
    t = run_cot(mach, [tk.bit(1), tk.bit(0), tk.bit(1), tk.bit(1), tk.bit(0)])
    emitted = [s.token for s in t.steps]
    assert emitted.count(tk.HALT) == 1 and emitted[-1] == tk.HALT
    assert t.answer == emitted[-2]
    assert t.cot_token_count == len(t.steps) - 1


@given(st.lists(st.integers(0, 1), min_size=2, max_size=9),
       st.sampled_from(["input_boundary", "random"]))
@settings(max_examples=60, deadline=None)
def test_run_cot_is_deterministic(bits, policy):
    mach = build_majority_machine(len(bits))
    x = [tk.bit(v) for v in bits]
    sched = SplitSchedule(policy, seed=5)
    t1 = run_cot(mach, x, sched, tiebreak=("random", 3))
    t2 = run_cot(mach, x, sched, tiebreak=("random", 3))
    assert t1 == t2
    assert repr(t1.steps) == repr(t2.steps)


def test_explicit_schedule_and_exhaustion():
    m = const_machine(tk.intval(0))
    t = run_cot(m, [tk.bit(0), tk.bit(1)], SplitSchedule("explicit", ks=[1, 1]))
    assert t.halted
    with pytest.raises(IndexOutOfRange):
        run_cot(m, [tk.bit(0), tk.bit(1)], SplitSchedule("explicit", ks=[1]))


def test_schedule_policies_stay_in_range():
    sched = SplitSchedule("fixed", k=100)
    assert sched.next_k(0, 5, 5, None) == 4
    sched = SplitSchedule("random", seed=1)
    rng = sched.make_rng()
    for step in range(50):
        k = sched.next_k(step, 7, 7, rng)
        assert 1 <= k < 7
    assert SplitSchedule("input_boundary").next_k(3, 9, 4, None) == 4


# --- fast-path vs dense sweep ------------------------------------------------

def dense_copy(machine):
    """Same machine with the support hint stripped, forcing the full sweep."""
    return dataclasses.replace(machine, attention_support=None,
                               uniform_steps=False)


@given(st.lists(st.integers(0, 1), min_size=2, max_size=7))
@settings(max_examples=40, deadline=None)
def test_fast_step_matches_dense_on_majority(bits):
    mach = build_majority_machine(len(bits))
    slow = dense_copy(mach)
    seq = [tk.bit(v) for v in bits]
    for _ in range(200):
        fast = step_token_set(mach, seq)
        dense = step_token_set(slow, seq)
        assert fast == dense
        tok = next(iter(fast))
        if tok == tk.HALT:
            break
        seq.append(tok)
    else:
        pytest.fail("no halt")


@given(st.lists(st.integers(0, 10), min_size=3, max_size=6))
@settings(max_examples=40, deadline=None)
def test_fast_step_matches_dense_on_match3(vals):
    mach = build_match3_machine(len(vals), 11)
    slow = dense_copy(mach)
    seq = [tk.intval(v) for v in vals]
    for _ in range(200):
        fast = step_token_set(mach, seq)
        assert fast == step_token_set(slow, seq)
        tok = next(iter(fast))
        if tok == tk.HALT:
            break
        seq.append(tok)
    else:
        pytest.fail("no halt")


@given(st.lists(st.integers(0, 1), min_size=1, max_size=6))
@settings(max_examples=40, deadline=None)
def test_fast_step_matches_dense_on_doubling_cot(bits):
    mach = build_input_doubling_cot(lambda bs: sum(bs) % 2 == 1, len(bits))
    slow = dense_copy(mach)
    seq = [tk.bit(v) for v in bits]
    for _ in range(50):
        fast = step_token_set(mach, seq)
        assert fast == step_token_set(slow, seq)
        tok = next(iter(fast))
        if tok == tk.HALT:
            break
        seq.append(tok)
    else:
        pytest.fail("no halt")


# --- worst-case exploration --------------------------------------------------

def test_explore_flags_split_sensitive_machine():
    _, summary = explore_cot_worstcase(split_sensitive_machine(),
                                       [tk.bit(0)] * 4)
    assert not summary.consistent and summary.branched
    assert summary.answers == {tk.intval(0), tk.intval(1)}


def test_explore_budget_one_is_single_path():
    mach = build_majority_machine(4)
    x = [tk.bit(1), tk.bit(1), tk.bit(0), tk.bit(1)]
    worst, summary = explore_cot_worstcase(mach, x, branch_budget=1)
    t = run_cot(mach, x)
    assert worst == t.cot_token_count
    assert summary.answers == {t.answer}


def test_explore_budget_exhaustion():
    def h(bits, G, suffix, k):
        m = k + len(suffix)
        return tk.HALT if m >= 7 else tk.intval(k % 2)
    chain = BapoMachine(0, 0, lambda p: "", lambda s, k, t, i: 0, h)
    with pytest.raises(BudgetExhausted):
        explore_cot_worstcase(chain, [tk.bit(0)] * 4, branch_budget=2)


def test_explore_agrees_with_run_on_invariant_machine():
    mach = build_majority_machine(5)
    x = [tk.bit(v) for v in (1, 0, 1, 1, 0)]
    worst, summary = explore_cot_worstcase(mach, x)
    assert summary.consistent and summary.answers == {tk.bit(1)}
    assert worst == run_cot(mach, x).cot_token_count


# --- consistency -------------------------------------------------------------

def test_a_zero_is_trivially_consistent():
    rep = check_consistency(const_machine(tk.intval(0)), [[tk.bit(0)] * 3])
    assert rep.consistent and rep.trivially and rep.checked == 0


def test_missing_witness_raises():
    m = BapoMachine(1, 0, lambda p: "0", lambda s, k, t, i: 0,
                    lambda bits, G, s, k: tk.HALT)
    with pytest.raises(MissingWitness):
        check_consistency(m, [[tk.bit(0), tk.bit(1)]])


def test_witness_violation_reported_with_location():
    def f(prefix):
        return "1" if any(t == tk.bit(1) for t in prefix.tokens()) else "0"

    def h2(bits, G, suffix, k):
        return bits    # ignores the suffix: wrong whenever the 1 is there
    m = BapoMachine(1, 0, f, lambda s, k, t, i: 0, lambda b, G, s, k: tk.HALT,
                    consistency_witness=(lambda s, k, t, i: 0, h2))
    rep = check_consistency(m, [[tk.bit(0), tk.bit(1)]])
    assert not rep.consistent
    x, k, G, got, expected = rep.first_violation
    assert k == 1 and got == "0" and expected == "1"
