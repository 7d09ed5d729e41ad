"""Ready sets and the compatibility predicate.

Both the trace semantics and the assertion synchronizer use ``compat`` from
here, so waiting blocks are merged under exactly one definition.
"""

from __future__ import annotations

from collections.abc import Iterable
from typing import Literal, Protocol

Direction = Literal["?", "!"]
ReadySet = frozenset[tuple[str, Direction]]


class HasHead(Protocol):
    @property
    def ch(self) -> str: ...

    @property
    def direction(self) -> Direction: ...


def rdy(specs: Iterable[HasHead]) -> ReadySet:
    """The (channel, direction) heads a process is waiting on."""
    return frozenset((spec.ch, spec.direction) for spec in specs)


def compat(r1: ReadySet, r2: ReadySet, chs: Iterable[str]) -> bool:
    """True when no shared channel has an output on one side and an input on the other."""
    for ch in chs:
        if (ch, "!") in r1 and (ch, "?") in r2:
            return False
        if (ch, "?") in r1 and (ch, "!") in r2:
            return False
    return True


def hide(r: ReadySet, chs: Iterable[str]) -> ReadySet:
    """Drop the heads on ``chs``; the ready set of a merged block."""
    hidden = frozenset(chs)
    return frozenset(head for head in r if head[0] not in hidden)
