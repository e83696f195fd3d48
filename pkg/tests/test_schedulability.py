import itertools

import pytest

from gen import corpus
from mkdbp.core import BoundOverflowError, KSequence, Task, TaskSet, state_bound
from mkdbp.schedulability import (
    FEASIBLE,
    INFEASIBLE,
    SearchSpaceTooLarge,
    Verdict,
    exact_test,
    feasibility_interval,
    oracle_test,
    period_statistics,
    search_initial_sequences,
)
from mkdbp.sim import Simulator, resume, simulate


def seqs(*texts):
    return tuple(KSequence.from_string(t) for t in texts)


def test_exact_figure1(table1):
    for tb in ("edf", "rm", "index"):
        v = exact_test(table1.with_tiebreak(tb))
        assert v.outcome == INFEASIBLE
        assert (v.violation_time, v.violating_task, str(v.violating_sequence)) == (16, 0, "0010")


def test_exact_figure2(table1):
    v = exact_test(table1.with_initial(["0101", "1111"]))
    assert v.feasible
    assert (v.transient_start, v.period) == (0, 20)


def test_exact_figure3(table1):
    v = exact_test(table1.with_initial(["0010", "1011"]))
    assert v.feasible
    # the t=20 state (0101, 1111) recurs at t=40
    assert (v.transient_start, v.period) == (20, 20)


def test_exact_figure4_variant(table2_k3):
    v = exact_test(table2_k3)
    assert v.feasible
    assert v.period == 6 == 2 * v.hyperperiod
    assert v.transient_start == 9


def test_exact_table2_as_printed(table2_printed):
    # Hand-derived boundary states (tau1, tau2) under index tie-breaking:
    # 0:(111,1111) 3:(111,1110) 6:(111,1100) 9:(110,1001) 12:(101,0010)
    # 15:(011,0100) 18:(110,1001) -> repeats the t=9 state.
    sim = Simulator(table2_printed)
    states = []
    for t in range(0, 21, 3):
        sim.run_until(t)
        states.append(tuple(str(s) for s in sim.system_state()))
    assert states == [
        ("111", "1111"), ("111", "1110"), ("111", "1100"), ("110", "1001"),
        ("101", "0010"), ("011", "0100"), ("110", "1001"),
    ]
    v = exact_test(table2_printed)
    assert v.feasible and (v.transient_start, v.period) == (9, 9)
    assert oracle_test(table2_printed) == FEASIBLE


def test_exact_single_task():
    ts = TaskSet.build([Task("a", 1, 1, 1, 1, 1)], ["1"])
    v = exact_test(ts)
    assert v.feasible and (v.period, v.transient_start) == (1, 0)


def test_feasibility_interval(table1, table2_printed):
    assert feasibility_interval(table1) == (0, 1100)
    assert feasibility_interval(table2_printed) == (0, 315)
    assert feasibility_interval(TaskSet.build([Task("a", 1, 1, 1, 1, 1)])) == (0, 1)


def test_overflow_reported():
    ts = TaskSet.build([Task("a", 7, 1, 7, 1, 62), Task("b", 5, 1, 5, 1, 3)])
    with pytest.raises(BoundOverflowError):
        feasibility_interval(ts)
    with pytest.raises(BoundOverflowError):
        exact_test(ts)


def test_oracle_examples(table1):
    assert oracle_test(table1) == INFEASIBLE
    assert oracle_test(table1.with_initial(["0101", "1111"])) == FEASIBLE
    assert oracle_test(table1.with_initial(["0010", "1011"])) == FEASIBLE


@pytest.mark.parametrize("fictive", [False, True])
def test_exact_agrees_with_oracle(fictive):
    for ts in corpus(seed=11, count=150, limit=20000, fictive=fictive):
        assert exact_test(ts).outcome == oracle_test(ts)


def test_verdict_soundness():
    for ts in corpus(seed=12, count=120, limit=20000):
        v = exact_test(ts)
        bound = state_bound(ts)
        if v.feasible:
            assert v.period > 0 and v.period % v.hyperperiod == 0
            assert v.transient_start % v.hyperperiod == 0
            assert v.transient_start + v.period <= bound * v.hyperperiod
            assert v.hyperperiods <= bound + 1
            sim = Simulator(ts)
            sim.run_until(v.transient_start)
            snap = sim.snapshot()
            end = resume(snap, ts, v.period).end_state
            assert end.sequences == snap.sequences
            assert not end.jobs and not snap.jobs
        else:
            assert v.violating_sequence.count < ts.tasks[v.violating_task].m
            tr = simulate(ts, v.violation_time)
            last = tr.violations[0]
            assert (last.time, last.task_index, last.sequence) == (
                v.violation_time, v.violating_task, v.violating_sequence)


def test_boundary_snapshots_are_valid():
    for ts in corpus(seed=13, count=80, limit=5000, fictive=True):
        v = exact_test(ts)
        if not v.feasible:
            continue
        sim = Simulator(ts)
        for j in range(1, (v.transient_start + v.period) // v.hyperperiod + 1):
            sim.run_until(j * v.hyperperiod)
            for s, t in zip(sim.system_state(), ts.tasks):
                assert s.count >= t.m


def test_constant_state_recurs_after_one_hyperperiod():
    ts = TaskSet.build([Task("a", 2, 2, 2, 1, 1)])
    assert exact_test(ts).hyperperiods == 1


def test_search_table1_valid(table1_tasks):
    rep = search_initial_sequences(table1_tasks, "edf", space="valid", mode="all")
    assert not rep.default_feasible
    assert rep.total_candidates == 55
    assert seqs("0101", "1111") in rep.feasible_assignments
    assert not rep.includes_error_states
    for a in rep.feasible_assignments:
        assert exact_test(TaskSet(table1_tasks, a, "edf")).feasible
    assert rep.feasible_assignments == sorted(
        rep.feasible_assignments, key=lambda a: [x.bits for x in a])


def test_search_table1_all(table1_tasks):
    rep = search_initial_sequences(table1_tasks, "edf", space="all", mode="all")
    assert rep.total_candidates == 256 and rep.includes_error_states
    assert seqs("0010", "1011") in rep.feasible_assignments
    brute = [
        a for a in itertools.product(*[
            [KSequence(b) for b in itertools.product((0, 1), repeat=4)]] * 2)
        if oracle_test(TaskSet(table1_tasks, a, "edf")) == FEASIBLE
    ]
    assert rep.feasible_assignments == brute


def test_search_first_and_parallel_match_sequential(table1_tasks):
    seq = search_initial_sequences(table1_tasks, "edf", space="all", mode="all")
    par = search_initial_sequences(table1_tasks, "edf", space="all", mode="all", jobs=3)
    assert par == seq
    first = search_initial_sequences(table1_tasks, "edf", space="all", mode="first")
    first_par = search_initial_sequences(table1_tasks, "edf", space="all", mode="first", jobs=3)
    assert first.feasible_assignments == seq.feasible_assignments[:1]
    assert first_par.feasible_assignments == first.feasible_assignments
    assert first_par.evaluated == first.evaluated


def test_search_single_task_all_feasible():
    rep = search_initial_sequences([Task("a", 5, 2, 4, 2, 3)], space="valid")
    assert rep.default_feasible
    assert len(rep.feasible_assignments) == rep.total_candidates == 4


def test_search_nothing_feasible():
    tasks = [Task("a", 2, 2, 2, 2, 2), Task("b", 2, 2, 2, 2, 2)]
    rep = search_initial_sequences(tasks, space="all")
    assert rep.feasible_assignments == []
    for a in itertools.product(*[[KSequence(b) for b in itertools.product((0, 1), repeat=2)]] * 2):
        assert oracle_test(TaskSet(tuple(tasks), a)) == INFEASIBLE


def test_search_space_too_large():
    tasks = [Task("a", 2, 1, 2, 1, 16), Task("b", 2, 1, 2, 1, 16)]
    with pytest.raises(SearchSpaceTooLarge) as e:
        search_initial_sequences(tasks, space="all")
    assert e.value.count == 2**32


def test_period_statistics(table1, table2_k3):
    v2 = exact_test(table1.with_initial(["0101", "1111"]))
    v4 = exact_test(table2_k3)
    assert period_statistics([v2]).period_ratios == {1: 1}
    assert period_statistics([v4]).period_ratios == {2: 1}
    assert period_statistics([v4]).transient_ratios == {3: 1}
    empty = period_statistics([])
    assert empty.period_ratios == {} and empty.transient_ratios == {}
    with pytest.raises(ValueError):
        period_statistics([Verdict(INFEASIBLE, 20)])
