"""JSON task-set documents.

Example::

    {
      "tiebreak": "edf",
      "tasks": [
        {"name": "tau1", "period": 4, "wcet": 1, "m": 2, "k": 4, "init": "0101"},
        {"name": "tau2", "period": 10, "wcet": 8, "m": 3, "k": 4}
      ]
    }

``deadline`` defaults to ``period``, ``init`` to all ones, ``tiebreak`` to edf.
"""

from __future__ import annotations

import json

from .core import InvalidTaskError, KSequence, Task, TaskSet

TASK_FIELDS = ("name", "period", "wcet", "deadline", "m", "k", "init")
REQUIRED = ("name", "period", "wcet", "m", "k")


class TaskSetParseError(ValueError):
    """Carries one diagnostic string per problem found."""

    def __init__(self, diagnostics: list[str]) -> None:
        super().__init__("; ".join(diagnostics))
        self.diagnostics = diagnostics


def _where(i: int, raw) -> str:
    name = raw.get("name") if isinstance(raw, dict) else None
    return "tasks[%d]%s" % (i, " (%s)" % name if isinstance(name, str) else "")


def _parse_task(i: int, raw) -> tuple[Task, KSequence]:
    where = _where(i, raw)
    if not isinstance(raw, dict):
        raise TaskSetParseError(["%s: task must be an object" % where])
    diags = []
    for key in raw:
        if key not in TASK_FIELDS:
            diags.append("%s: unknown field %r" % (where, key))
    for key in REQUIRED:
        if key not in raw:
            diags.append("%s: missing field %r" % (where, key))
    if diags:
        raise TaskSetParseError(diags)
    try:
        task = Task(
            name=raw["name"],
            period=raw["period"],
            wcet=raw["wcet"],
            deadline=raw.get("deadline", raw["period"]),
            m=raw["m"],
            k=raw["k"],
        )
        init = raw.get("init")
        if init is None:
            seq = KSequence.ones(task.k)
        elif not isinstance(init, str):
            raise InvalidTaskError("init", "init must be a string of '0'/'1'")
        else:
            if any(c not in "01" for c in init):
                raise InvalidTaskError("init", "invalid bit in init %r" % init)
            if len(init) != task.k:
                raise InvalidTaskError(
                    "init", "init length %d differs from k=%d" % (len(init), task.k)
                )
            seq = KSequence.from_string(init)
    except InvalidTaskError as e:
        raise TaskSetParseError(["%s: field %r: %s" % (where, e.field, e.message)]) from None
    return task, seq


def parse_taskset(text: str) -> TaskSet:
    """Parse and validate a task-set document; raise TaskSetParseError with diagnostics."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise TaskSetParseError(["line %d column %d: %s" % (e.lineno, e.colno, e.msg)]) from None
    if not isinstance(doc, dict):
        raise TaskSetParseError(["document must be an object with a 'tasks' array"])
    diags = []
    for key in doc:
        if key not in ("tasks", "tiebreak"):
            diags.append("unknown top-level field %r" % key)
    raw_tasks = doc.get("tasks")
    if not isinstance(raw_tasks, list) or not raw_tasks:
        diags.append("'tasks' must be a non-empty array")
        raise TaskSetParseError(diags)
    tasks, seqs = [], []
    for i, raw in enumerate(raw_tasks):
        try:
            t, s = _parse_task(i, raw)
        except TaskSetParseError as e:
            diags.extend(e.diagnostics)
            continue
        tasks.append(t)
        seqs.append(s)
    tiebreak = doc.get("tiebreak", "edf")
    if diags:
        raise TaskSetParseError(diags)
    try:
        return TaskSet(tuple(tasks), tuple(seqs), tiebreak)
    except InvalidTaskError as e:
        raise TaskSetParseError(["field %r: %s" % (e.field, e.message)]) from None


def render_taskset(ts: TaskSet) -> str:
    """Canonical document text; every field is written out explicitly."""
    doc = {
        "tiebreak": ts.tiebreak,
        "tasks": [
            {
                "name": t.name,
                "period": t.period,
                "wcet": t.wcet,
                "deadline": t.deadline,
                "m": t.m,
                "k": t.k,
                "init": str(s),
            }
            for t, s in zip(ts.tasks, ts.initial_sequences)
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


def load_taskset(path: str) -> TaskSet:
    with open(path, encoding="utf-8") as f:
        return parse_taskset(f.read())
