"""Text, JSON and ASCII Gantt renderings of simulation traces."""

from __future__ import annotations

import json

from .core import TaskSet
from .sim import Trace, TraceEvent

GANTT_MAX_HORIZON = 200


def event_dict(ev: TraceEvent, ts: TaskSet) -> dict:
    return {
        "time": ev.time,
        "kind": ev.kind,
        "task": ts.tasks[ev.task_index].name if ev.task_index is not None else None,
        "job": ev.job_index,
        "seq": str(ev.sequence) if ev.sequence is not None else None,
        "distance": ev.distance,
    }


def event_line(ev: TraceEvent, ts: TaskSet) -> str:
    d = event_dict(ev, ts)

    def show(v):
        return "-" if v is None else str(v)

    return "t=%d %s %s job=%s seq=%s d=%s" % (
        d["time"], d["kind"], show(d["task"]), show(d["job"]), show(d["seq"]), show(d["distance"])
    )


def trace_text(trace: Trace, ts: TaskSet) -> str:
    return "".join(event_line(e, ts) + "\n" for e in trace.events)


def trace_json(trace: Trace, ts: TaskSet) -> str:
    return json.dumps([event_dict(e, ts) for e in trace.events], indent=1) + "\n"


def trace_gantt(trace: Trace, ts: TaskSet, horizon: int) -> str:
    """One row per task, one column per time unit in ``[0, horizon)``.

    '#' executing, '.' not executing, '!' deadline miss at that instant,
    'X' constraint violation.  Execution hides a miss of the previous job in
    the same column; a violation always shows.  Markers at ``t == horizon`` fall outside the
    chart and are dropped.
    """
    if horizon > GANTT_MAX_HORIZON:
        raise ValueError(
            "gantt output is limited to %d time units; use text or json" % GANTT_MAX_HORIZON
        )
    rows = [["."] * horizon for _ in ts.tasks]
    # a run halted by a violation stops mid-job
    stop = min(horizon, trace.end_state.time)
    for i, start, end in trace.execution_intervals(ts):
        for t in range(start, min(end, stop)):
            rows[i][t] = "#"
    for e in trace.events:
        if e.time >= horizon:
            continue
        if e.kind == "miss":
            if rows[e.task_index][e.time] != "#":
                rows[e.task_index][e.time] = "!"
        elif e.kind == "violation":
            rows[e.task_index][e.time] = "X"
    width = max(len(t.name) for t in ts.tasks)
    axis = "".join(str(t // 10 % 10) if t % 10 == 0 else " " for t in range(horizon))
    lines = [" " * width + " |" + axis]
    for t, row in zip(ts.tasks, rows):
        lines.append(t.name.ljust(width) + " |" + "".join(row))
    return "\n".join(lines) + "\n"
