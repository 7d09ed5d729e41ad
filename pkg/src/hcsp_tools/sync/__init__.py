"""Synchronizing assertions of parallel components."""

from .decide import DecisionStats, GuardDecider, linear_conflict
from .engine import (
    Block,
    Context,
    SyncEngine,
    SyncResult,
    as_block,
    comm,
    compat,
    synchronize,
)
from .naming import (
    NamedAssertion,
    check_disjoint,
    lift,
    merge_named,
    prefix_process,
    rename_assertion,
)

__all__ = [
    "Block",
    "Context",
    "DecisionStats",
    "GuardDecider",
    "NamedAssertion",
    "SyncEngine",
    "SyncResult",
    "as_block",
    "check_disjoint",
    "comm",
    "compat",
    "synchronize",
    "lift",
    "linear_conflict",
    "merge_named",
    "prefix_process",
    "rename_assertion",
]
