"""Exact DBP schedulability via hyper-period state recurrence.

With synchronous releases and constrained deadlines every job released before
``j*P`` is finished or expired at ``j*P``, so the k-sequences alone identify
the system state there.  A deterministic memoryless scheduler that revisits a
state repeats its schedule forever; the number of valid states bounds how many
hyper-periods have to be simulated.
"""

from __future__ import annotations

import itertools
import logging
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .core import (
    BoundOverflowError,
    KSequence,
    Task,
    TaskSet,
    checked_add,
    checked_mul,
    count_valid_sequences,
    hyperperiod,
    is_error_state,
    state_bound,
)
from .sim import Simulator

log = logging.getLogger(__name__)

FEASIBLE = "feasible"
INFEASIBLE = "infeasible"

DEFAULT_MAX_CANDIDATES = 10**6


class SearchSpaceTooLarge(ValueError):
    def __init__(self, count: int, limit: int) -> None:
        super().__init__(
            "search space too large: %d candidates (limit %d)" % (count, limit)
        )
        self.count = count
        self.limit = limit


@dataclass(frozen=True)
class Verdict:
    outcome: str
    hyperperiod: int
    # number of hyper-periods simulated before concluding
    hyperperiods: int = 0
    transient_start: Optional[int] = None
    period: Optional[int] = None
    violation_time: Optional[int] = None
    violating_task: Optional[int] = None
    violating_sequence: Optional[KSequence] = None

    @property
    def feasible(self) -> bool:
        return self.outcome == FEASIBLE

    def to_dict(self, ts: Optional[TaskSet] = None) -> dict:
        d = {"outcome": self.outcome, "hyperperiod": self.hyperperiod}
        if self.feasible:
            d["transient_start"] = self.transient_start
            d["period"] = self.period
        else:
            task = self.violating_task
            d["violation_time"] = self.violation_time
            d["task"] = ts.tasks[task].name if ts is not None else task
            d["sequence"] = str(self.violating_sequence)
        return d


def feasibility_interval(ts: TaskSet) -> tuple[int, int]:
    """Half-open interval ``[0, state_bound * P)`` whose compliance implies compliance forever."""
    return (0, checked_mul(state_bound(ts), hyperperiod(ts)))


def exact_test(ts: TaskSet) -> Verdict:
    """Simulate one hyper-period at a time until a violation or a repeated state.

    The state after hyper-period ``j`` is compared with every earlier one,
    including the initial sequences.
    """
    P = hyperperiod(ts)
    bound = state_bound(ts)
    checked_mul(checked_add(bound, 1), P)
    sim = Simulator(ts, record=False)
    seen = {sim.system_state(): 0}
    j = 0
    while True:
        sim.run_until((j + 1) * P)
        j += 1
        if sim.violated:
            ev = sim.violation
            return Verdict(
                INFEASIBLE, P, j,
                violation_time=ev.time,
                violating_task=ev.task_index,
                violating_sequence=ev.sequence,
            )
        state = sim.system_state()
        prev = seen.get(state)
        if prev is not None:
            return Verdict(FEASIBLE, P, j, transient_start=prev * P, period=(j - prev) * P)
        seen[state] = j
        # j=0 may be a fictive error state, hence the +1
        if j > bound + 1:
            raise RuntimeError("no recurrence after %d hyper-periods; bound violated" % j)


def oracle_test(ts: TaskSet) -> str:
    """Simulate the whole feasibility interval and report the outcome only.

    Fictive error-state initials are not counted among the valid states, so
    one extra hyper-period is simulated for them.
    """
    P = hyperperiod(ts)
    _, end = feasibility_interval(ts)
    if any(is_error_state(s, t.m) for s, t in zip(ts.initial_sequences, ts.tasks)):
        end = checked_mul(state_bound(ts) + 1, P)
    sim = Simulator(ts, record=False)
    sim.run_until(end)
    return INFEASIBLE if sim.violated else FEASIBLE


def _candidates_for(task: Task, include_errors: bool) -> list[KSequence]:
    out = []
    for bits in itertools.product((0, 1), repeat=task.k):
        if include_errors or sum(bits) >= task.m:
            out.append(KSequence(bits))
    return out


@dataclass
class InitSearchReport:
    default_feasible: bool
    feasible_assignments: list[tuple[KSequence, ...]]
    total_candidates: int
    includes_error_states: bool
    evaluated: int = 0

    def to_dict(self) -> dict:
        return {
            "default_feasible": self.default_feasible,
            "total_candidates": self.total_candidates,
            "evaluated": self.evaluated,
            "includes_error_states": self.includes_error_states,
            "feasible_assignments": [[str(s) for s in a] for a in self.feasible_assignments],
        }


def _is_feasible(args) -> bool:
    tasks, seqs, tiebreak = args
    return exact_test(TaskSet(tasks, seqs, tiebreak)).feasible


def search_initial_sequences(
    tasks: Sequence[Task],
    tiebreak: str = "edf",
    space: str = "valid",
    mode: str = "all",
    jobs: int = 1,
    max_candidates: int = DEFAULT_MAX_CANDIDATES,
) -> InitSearchReport:
    """Brute-force the initial k-sequences for which the task set is schedulable.

    Candidates are visited in lexicographic order of their bit strings, task
    by task.  ``space="all"`` also tries fictive error states.  The report is
    the same for any ``jobs`` value.
    """
    if space not in ("valid", "valid_only", "all"):
        raise ValueError("space must be 'valid' or 'all'")
    if mode not in ("first", "all"):
        raise ValueError("mode must be 'first' or 'all'")
    tasks = tuple(tasks)
    include_errors = space == "all"
    total = 1
    for t in tasks:
        total *= 2**t.k if include_errors else count_valid_sequences(t.m, t.k)
    if total > max_candidates:
        raise SearchSpaceTooLarge(total, max_candidates)

    default = exact_test(TaskSet(tasks, (), tiebreak)).feasible
    per_task = [_candidates_for(t, include_errors) for t in tasks]
    found: list[tuple[KSequence, ...]] = []
    evaluated = 0
    work = ((tasks, seqs, tiebreak) for seqs in itertools.product(*per_task))

    if jobs <= 1:
        for args in work:
            evaluated += 1
            if _is_feasible(args):
                found.append(args[1])
                if mode == "first":
                    break
    else:
        chunk = max(16, jobs * 8)
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            while True:
                batch = list(itertools.islice(work, chunk))
                if not batch:
                    break
                results = list(pool.map(_is_feasible, batch, chunksize=4))
                stop = False
                for args, ok in zip(batch, results):
                    evaluated += 1
                    if ok:
                        found.append(args[1])
                        if mode == "first":
                            stop = True
                            break
                if stop:
                    break
    log.debug("searched %d of %d candidates, %d feasible", evaluated, total, len(found))
    return InitSearchReport(default, found, total, include_errors, evaluated)


@dataclass
class PeriodStatistics:
    period_ratios: dict[int, int] = field(default_factory=dict)
    transient_ratios: dict[int, int] = field(default_factory=dict)


def period_statistics(verdicts: Iterable[Verdict]) -> PeriodStatistics:
    """Histograms of period / P and transient_start / P over feasible verdicts."""
    periods: Counter = Counter()
    transients: Counter = Counter()
    for v in verdicts:
        if not v.feasible:
            raise ValueError("period statistics need feasible verdicts")
        periods[v.period // v.hyperperiod] += 1
        transients[v.transient_start // v.hyperperiod] += 1
    return PeriodStatistics(dict(sorted(periods.items())), dict(sorted(transients.items())))


__all__ = [
    "BoundOverflowError",
    "FEASIBLE",
    "INFEASIBLE",
    "InitSearchReport",
    "PeriodStatistics",
    "SearchSpaceTooLarge",
    "Verdict",
    "exact_test",
    "feasibility_interval",
    "oracle_test",
    "period_statistics",
    "search_initial_sequences",
]
