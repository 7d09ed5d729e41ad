"""Executable big-step semantics, trace synchronization and assertion checking."""

from .cosim import CoSimulation, parallel_schedule
from .interpreter import (
    ParallelSchedule,
    drive,
    execute,
    execute_parallel,
    execute_parallel_all,
    run,
)
from .sampling import random_responder, random_schedule
from .satisfaction import Failure, Verdict, check_run, satisfies
from .schedule import Branch, Comm, Iterate, Schedule
from .sync import sync_traces
from .trace import DEADLOCK, CommEvent, ContEvent, Deadlock, Trace

__all__ = [
    "DEADLOCK",
    "CoSimulation",
    "Branch",
    "Comm",
    "CommEvent",
    "ContEvent",
    "Deadlock",
    "Failure",
    "Iterate",
    "ParallelSchedule",
    "Schedule",
    "Trace",
    "Verdict",
    "check_run",
    "drive",
    "execute",
    "execute_parallel",
    "execute_parallel_all",
    "random_responder",
    "parallel_schedule",
    "random_schedule",
    "run",
    "satisfies",
    "sync_traces",
]
