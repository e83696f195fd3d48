"""Event-driven, non-preemptive DBP simulator for synchronous periodic tasks.

Time is integral and nothing changes between decision instants (job
completions, arrivals and deadline expiries), so the simulator jumps from one
instant to the next.  At each instant ``t`` events are processed in a fixed
order:

1. completion of the running job (outcome '1');
2. deadline expiry of every unfinished job whose deadline is ``t`` (outcome '0');
3. violation check on the sequences shifted in 1-2, halting on failure;
4. arrivals;
5. when idle, discard waiting jobs that can no longer meet their deadline;
6. when idle, start the highest-priority eligible job.

A run stopped at a decision instant ``t`` has processed steps 1-3 of ``t``
and nothing else.  :class:`SimulatorState` snapshots are taken at that point
(or between instants), which is what makes :func:`resume` reproduce the
original suffix exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, Optional, Sequence

from .core import InvalidTaskError, KSequence, Task, TaskSet, dbp_distance

WAITING = "waiting"
RUNNING = "running"
DISCARDED = "discarded"

EVENT_KINDS = ("arrival", "start", "completion", "miss", "violation", "idle")


@dataclass(frozen=True)
class Job:
    task_index: int
    job_index: int
    arrival: int
    absolute_deadline: int
    state: str = WAITING


@dataclass(frozen=True)
class TraceEvent:
    time: int
    kind: str
    task_index: Optional[int] = None
    job_index: Optional[int] = None
    sequence: Optional[KSequence] = None
    distance: Optional[int] = None

    def shifted(self, delta: int) -> "TraceEvent":
        return replace(self, time=self.time + delta)


@dataclass(frozen=True)
class SimulatorState:
    """Everything the scheduler's future depends on at one instant.

    Per-task elapsed time since the last request is implied by ``time`` since
    releases are synchronous.  ``jobs`` holds the unfinished jobs (at most one
    per task because deadlines never exceed periods).
    """

    time: int
    sequences: tuple[KSequence, ...]
    jobs: tuple[Job, ...] = ()
    running_finish: Optional[int] = None
    # False when the run stopped between decision instants
    dispatch_pending: bool = True

    def elapsed(self, ts: TaskSet, i: int) -> int:
        return self.time % ts.tasks[i].period

    def to_dict(self) -> dict:
        return {
            "time": self.time,
            "sequences": [str(s) for s in self.sequences],
            "jobs": [
                [j.task_index, j.job_index, j.arrival, j.absolute_deadline, j.state]
                for j in self.jobs
            ],
            "running_finish": self.running_finish,
            "dispatch_pending": self.dispatch_pending,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SimulatorState":
        return cls(
            time=d["time"],
            sequences=tuple(KSequence.from_string(s) for s in d["sequences"]),
            jobs=tuple(Job(*j) for j in d["jobs"]),
            running_finish=d["running_finish"],
            dispatch_pending=d.get("dispatch_pending", True),
        )


@dataclass
class Trace:
    events: list[TraceEvent]
    end_state: SimulatorState
    violated: bool = False

    @property
    def violations(self) -> list[TraceEvent]:
        return [e for e in self.events if e.kind == "violation"]

    def execution_intervals(self, ts: TaskSet) -> list[tuple[int, int, int]]:
        """(task_index, start, end) for every started job, in start order."""
        return [
            (e.task_index, e.time, e.time + ts.tasks[e.task_index].wcet)
            for e in self.events
            if e.kind == "start"
        ]


def _priority_key(job: Job, sequences: Sequence[KSequence], tasks: Sequence[Task], tiebreak: str):
    task = tasks[job.task_index]
    d = dbp_distance(sequences[job.task_index], task.m)
    if tiebreak == "edf":
        return (d, job.absolute_deadline, job.task_index)
    if tiebreak == "rm":
        return (d, task.period, job.task_index)
    return (d, job.task_index)


def choose_next(
    eligible: Iterable[Job],
    sequences: Sequence[KSequence],
    tasks: Sequence[Task],
    tiebreak: str,
) -> Optional[Job]:
    """Pick the job whose task is closest to an error state.

    Ties go to the tie-break policy and finally to the task index.
    """
    best = None
    best_key = None
    for job in eligible:
        key = _priority_key(job, sequences, tasks, tiebreak)
        if best_key is None or key < best_key:
            best, best_key = job, key
    return best


class Simulator:
    """Stepwise DBP simulator.

    Call :meth:`run_until` repeatedly to advance; each call returns the events
    produced since the previous stop.  Once a violation has been recorded the
    simulator refuses to advance.
    """

    def __init__(self, ts: TaskSet, state: Optional[SimulatorState] = None, record: bool = True):
        self.ts = ts
        self.record = record
        if state is None:
            state = SimulatorState(0, ts.initial_sequences)
        _check_state(ts, state)
        self.time = state.time
        self.sequences = list(state.sequences)
        # one slot per task; None when the task has no unfinished job
        self.jobs: list[Optional[Job]] = [None] * len(ts.tasks)
        for j in state.jobs:
            self.jobs[j.task_index] = j
        self.running_finish = state.running_finish
        self._pending_dispatch = state.dispatch_pending
        self.violated = False
        self.violation: Optional[TraceEvent] = None
        self._events: list[TraceEvent] = []

    def snapshot(self) -> SimulatorState:
        return SimulatorState(
            self.time,
            tuple(self.sequences),
            tuple(j for j in self.jobs if j is not None),
            self.running_finish,
            self._pending_dispatch,
        )

    def system_state(self) -> tuple[KSequence, ...]:
        return tuple(self.sequences)

    def _emit(self, kind, task_index=None, job_index=None, with_seq=True):
        if not self.record and kind != "violation":
            return
        seq = dist = None
        if task_index is not None and with_seq:
            seq = self.sequences[task_index]
            dist = dbp_distance(seq, self.ts.tasks[task_index].m)
        ev = TraceEvent(self.time, kind, task_index, job_index, seq, dist)
        if kind == "violation" and self.violation is None:
            self.violation = ev
        if self.record:
            self._events.append(ev)

    def _running_index(self) -> Optional[int]:
        for j in self.jobs:
            if j is not None and j.state == RUNNING:
                return j.task_index
        return None

    def _dispatch(self) -> None:
        """Steps 4-6 at the current instant."""
        t = self.time
        tasks = self.ts.tasks
        for i, task in enumerate(tasks):
            if t % task.period == 0:
                job = Job(i, t // task.period, t, t + task.deadline)
                self.jobs[i] = job
                self._emit("arrival", i, job.job_index)
        if self.running_finish is not None:
            return
        eligible = []
        for i, job in enumerate(self.jobs):
            if job is None or job.state != WAITING:
                continue
            if t + tasks[i].wcet > job.absolute_deadline:
                self.jobs[i] = replace(job, state=DISCARDED)
            else:
                eligible.append(job)
        pick = choose_next(eligible, self.sequences, tasks, self.ts.tiebreak)
        if pick is None:
            self._emit("idle")
            return
        self.jobs[pick.task_index] = replace(pick, state=RUNNING)
        self.running_finish = t + tasks[pick.task_index].wcet
        self._emit("start", pick.task_index, pick.job_index)

    def _next_instant(self) -> int:
        t = self.time
        cands = []
        if self.running_finish is not None:
            cands.append(self.running_finish)
        for job in self.jobs:
            if job is not None:
                cands.append(job.absolute_deadline)
        for task in self.ts.tasks:
            cands.append((t // task.period + 1) * task.period)
        return min(c for c in cands if c > t)

    def _record_outcomes(self) -> None:
        """Steps 1-3 at the current instant."""
        t = self.time
        tasks = self.ts.tasks
        shifted = []
        if self.running_finish == t:
            i = self._running_index()
            job = self.jobs[i]
            self.sequences[i] = self.sequences[i].shift(1)
            self.jobs[i] = None
            self.running_finish = None
            shifted.append((i, job.job_index))
            self._emit("completion", i, job.job_index)
        for i, job in enumerate(self.jobs):
            if job is not None and job.absolute_deadline == t:
                self.sequences[i] = self.sequences[i].shift(0)
                self.jobs[i] = None
                shifted.append((i, job.job_index))
                self._emit("miss", i, job.job_index)
        for i, j in sorted(shifted):
            if self.sequences[i].count < tasks[i].m:
                self.violated = True
                self._emit("violation", i, j)

    def run_until(self, end: int) -> list[TraceEvent]:
        """Advance to `end` (absolute), processing its outcome steps only.

        Stops early at a violation.  Returns the new events.
        """
        self._events = []
        if self.violated:
            return []
        while self.time < end:
            if self._pending_dispatch:
                self._dispatch()
                self._pending_dispatch = False
            nxt = self._next_instant()
            if nxt > end:
                self.time = end
                break
            self.time = nxt
            self._record_outcomes()
            self._pending_dispatch = True
            if self.violated:
                break
        return self._events


def _check_state(ts: TaskSet, state: SimulatorState) -> None:
    if state.time < 0:
        raise InvalidTaskError("time", "snapshot time must be non-negative")
    if len(state.sequences) != len(ts.tasks):
        raise InvalidTaskError("sequences", "snapshot has %d sequences for %d tasks"
                               % (len(state.sequences), len(ts.tasks)))
    for task, seq in zip(ts.tasks, state.sequences):
        if len(seq) != task.k:
            raise InvalidTaskError("sequences", "snapshot sequence length differs from k of %s"
                                   % task.name)
    seen = set()
    running = 0
    for j in state.jobs:
        if not 0 <= j.task_index < len(ts.tasks) or j.task_index in seen:
            raise InvalidTaskError("jobs", "snapshot job has bad or duplicate task index")
        seen.add(j.task_index)
        task = ts.tasks[j.task_index]
        if (j.arrival != j.job_index * task.period
                or j.absolute_deadline != j.arrival + task.deadline
                or not j.arrival <= state.time < j.absolute_deadline):
            raise InvalidTaskError("jobs", "snapshot job of %s inconsistent with its task"
                                   % task.name)
        if j.state not in (WAITING, RUNNING, DISCARDED):
            raise InvalidTaskError("jobs", "unknown job state %r" % j.state)
        if j.state == RUNNING:
            running += 1
            if state.running_finish is None or state.running_finish > j.absolute_deadline:
                raise InvalidTaskError("jobs", "running job finish time inconsistent")
    if running > 1 or (running == 0) != (state.running_finish is None):
        raise InvalidTaskError("jobs", "snapshot running job inconsistent")


def simulate(ts: TaskSet, horizon: int) -> Trace:
    """Unique DBP schedule over ``[0, horizon)``.

    Outcomes of jobs whose deadline equals `horizon` are included; the run
    halts at the first violation.
    """
    if horizon < 0:
        raise ValueError("horizon must be non-negative")
    sim = Simulator(ts)
    if horizon == 0:
        return Trace([], sim.snapshot())
    events = sim.run_until(horizon)
    return Trace(events, sim.snapshot(), sim.violated)


def resume(state: SimulatorState, ts: TaskSet, duration: int) -> Trace:
    """Continue a run from `state` for `duration` time units.

    Event times stay absolute, so the result can be compared directly with
    the matching segment of the run the snapshot came from.
    """
    if duration < 0:
        raise ValueError("duration must be non-negative")
    sim = Simulator(ts, state)
    events = sim.run_until(state.time + duration)
    return Trace(events, sim.snapshot(), sim.violated)
