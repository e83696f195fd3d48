"""Domain types for (m,k)-firm periodic tasks and the DBP distance function.

A k-sequence is the sliding window of a task's last k job outcomes, oldest
outcome on the left: '1' for a met deadline, '0' for a miss.  The textual
form used everywhere (figures, task files, traces) is the plain bit string,
e.g. ``"0101"``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

INT64_MAX = 2**63 - 1

TIEBREAKS = ("edf", "rm", "index")


class BoundOverflowError(ArithmeticError):
    """A time value or state count does not fit in a signed 64-bit integer."""


class InvalidTaskError(ValueError):
    """A task or task set violates a model invariant.

    ``field`` names the offending attribute so that callers can build
    diagnostics pointing at the right place.
    """

    def __init__(self, field: str, message: str) -> None:
        super().__init__(message)
        self.field = field
        self.message = message


def checked_mul(a: int, b: int) -> int:
    r = a * b
    if r > INT64_MAX:
        raise BoundOverflowError("bound too large: %d * %d exceeds 64 bits" % (a, b))
    return r


def checked_add(a: int, b: int) -> int:
    r = a + b
    if r > INT64_MAX:
        raise BoundOverflowError("bound too large: %d + %d exceeds 64 bits" % (a, b))
    return r


@dataclass(frozen=True)
class KSequence:
    """Fixed-length binary history of job outcomes, leftmost bit oldest."""

    bits: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.bits:
            raise InvalidTaskError("init", "k-sequence must not be empty")
        for b in self.bits:
            if b not in (0, 1):
                raise InvalidTaskError("init", "invalid bit %r" % (b,))

    @classmethod
    def from_string(cls, text: str) -> "KSequence":
        bad = [c for c in text if c not in "01"]
        if bad:
            raise InvalidTaskError("init", "invalid bit %r in %r" % (bad[0], text))
        return cls(tuple(int(c) for c in text))

    @classmethod
    def ones(cls, k: int) -> "KSequence":
        return cls((1,) * k)

    def __str__(self) -> str:
        return "".join(map(str, self.bits))

    def __len__(self) -> int:
        return len(self.bits)

    @property
    def count(self) -> int:
        return sum(self.bits)

    def shift(self, outcome: int) -> "KSequence":
        return shift(self, outcome)


def dbp_distance(seq: KSequence, m: int) -> int:
    """Number of consecutive future misses that would leave fewer than `m` ones.

    Zero for a sequence that is already in an error state.  Otherwise the
    m-th '1' counted from the right sits at position ``pos`` (rightmost bit
    is position 1) and falls out of the window after ``k - pos + 1`` shifts.

    >>> dbp_distance(KSequence.from_string("101"), 2)
    1
    >>> dbp_distance(KSequence.from_string("011"), 2)
    2
    """
    bits = seq.bits
    k = len(bits)
    if m > k:
        raise ValueError("m=%d exceeds sequence length %d" % (m, k))
    seen = 0
    for pos in range(1, k + 1):
        if bits[k - pos]:
            seen += 1
            if seen == m:
                return k - pos + 1
    return 0


def is_error_state(seq: KSequence, m: int) -> bool:
    if m > len(seq):
        raise ValueError("m=%d exceeds sequence length %d" % (m, len(seq)))
    return seq.count < m


def shift(seq: KSequence, outcome: int) -> KSequence:
    """Drop the oldest outcome and append `outcome` on the right."""
    return KSequence(seq.bits[1:] + (1 if outcome else 0,))


def count_valid_sequences(m: int, k: int) -> int:
    """Number of length-k bit strings holding at least m ones."""
    if not 1 <= m <= k:
        raise ValueError("need 1 <= m <= k, got m=%d k=%d" % (m, k))
    total = 0
    for j in range(m, k + 1):
        total = checked_add(total, math.comb(k, j))
    return total


def _positive_int(name: str, value) -> None:
    if isinstance(value, bool) or not isinstance(value, int):
        raise InvalidTaskError(name, "%s must be an integer, got %r" % (name, value))
    if value < 1:
        raise InvalidTaskError(name, "%s must be positive, got %d" % (name, value))
    if value > INT64_MAX:
        raise InvalidTaskError(name, "%s exceeds 64 bits" % name)


@dataclass(frozen=True)
class Task:
    """A synchronous periodic task (or message stream) with an (m,k)-firm constraint.

    Job j arrives at ``j * period`` and must finish by ``j * period + deadline``.
    """

    name: str
    period: int
    wcet: int
    deadline: int
    m: int
    k: int

    def __post_init__(self) -> None:
        if not isinstance(self.name, str) or not self.name:
            raise InvalidTaskError("name", "name must be a non-empty string")
        for f in ("period", "wcet", "deadline", "m", "k"):
            _positive_int(f, getattr(self, f))
        if self.deadline > self.period:
            raise InvalidTaskError("deadline", "deadline exceeds period")
        if self.wcet > self.deadline:
            raise InvalidTaskError("wcet", "wcet exceeds deadline")
        if self.m > self.k:
            raise InvalidTaskError("m", "m exceeds k")


@dataclass(frozen=True)
class TaskSet:
    """Ordered tasks plus one initial k-sequence each and a tie-break policy.

    Task order matters: it is the last-resort tie-breaker.
    """

    tasks: tuple[Task, ...]
    initial_sequences: tuple[KSequence, ...] = field(default=())
    tiebreak: str = "edf"

    def __post_init__(self) -> None:
        object.__setattr__(self, "tasks", tuple(self.tasks))
        if not self.tasks:
            raise InvalidTaskError("tasks", "task set must contain at least one task")
        if not self.initial_sequences:
            object.__setattr__(
                self, "initial_sequences", tuple(KSequence.ones(t.k) for t in self.tasks)
            )
        else:
            object.__setattr__(self, "initial_sequences", tuple(self.initial_sequences))
        names = [t.name for t in self.tasks]
        if len(set(names)) != len(names):
            raise InvalidTaskError("name", "task names must be unique")
        if len(self.initial_sequences) != len(self.tasks):
            raise InvalidTaskError("init", "one initial sequence per task is required")
        for t, s in zip(self.tasks, self.initial_sequences):
            if len(s) != t.k:
                raise InvalidTaskError(
                    "init", "init length %d differs from k=%d for %s" % (len(s), t.k, t.name)
                )
        if self.tiebreak not in TIEBREAKS:
            raise InvalidTaskError(
                "tiebreak", "unknown tiebreak %r (expected one of %s)"
                % (self.tiebreak, ", ".join(TIEBREAKS))
            )

    @classmethod
    def build(
        cls,
        tasks: Iterable[Task],
        initial: Optional[Sequence[KSequence | str]] = None,
        tiebreak: str = "edf",
    ) -> "TaskSet":
        seqs: tuple[KSequence, ...] = ()
        if initial is not None:
            seqs = tuple(
                KSequence.from_string(s) if isinstance(s, str) else s for s in initial
            )
        return cls(tuple(tasks), seqs, tiebreak)

    def with_initial(self, initial: Sequence[KSequence | str]) -> "TaskSet":
        return TaskSet.build(self.tasks, initial, self.tiebreak)

    def with_tiebreak(self, tiebreak: str) -> "TaskSet":
        return TaskSet(self.tasks, self.initial_sequences, tiebreak)

    def __len__(self) -> int:
        return len(self.tasks)


def state_bound(ts: TaskSet) -> int:
    """Product over tasks of the number of valid k-sequences.

    This is the maximum number of distinct hyper-period boundary states.
    """
    r = 1
    for t in ts.tasks:
        r = checked_mul(r, count_valid_sequences(t.m, t.k))
    return r


def hyperperiod(ts: TaskSet) -> int:
    p = 1
    for t in ts.tasks:
        p = math.lcm(p, t.period)
        if p > INT64_MAX:
            raise BoundOverflowError("bound too large: hyper-period exceeds 64 bits")
    return p
