"""Exact schedulability analysis and simulation of DBP-scheduled (m,k)-firm task sets."""

from .core import (
    BoundOverflowError,
    InvalidTaskError,
    KSequence,
    Task,
    TaskSet,
    count_valid_sequences,
    dbp_distance,
    hyperperiod,
    is_error_state,
    shift,
    state_bound,
)
from .schedulability import (
    InitSearchReport,
    Verdict,
    exact_test,
    feasibility_interval,
    oracle_test,
    period_statistics,
    search_initial_sequences,
)
from .sim import Simulator, SimulatorState, Trace, TraceEvent, choose_next, resume, simulate
from .taskfile import TaskSetParseError, parse_taskset, render_taskset

__version__ = "0.1.0"
