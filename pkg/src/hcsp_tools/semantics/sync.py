"""Trace synchronization ``tr1 ||cs tr2``.

``sync_traces`` enumerates every trace the synchronization relation derives.
The rules are applied from both sides, so the result does not depend on
which component is written first.
"""

from __future__ import annotations

from functools import cache

from ..ready import compat, hide
from .trace import DEADLOCK, CommEvent, ContEvent, Deadlock, Trace, merge_path_exprs


def _shared(event, cs: frozenset[str]) -> bool:
    return isinstance(event, CommEvent) and event.direction is not None and event.ch in cs


def sync_traces(tr1: Trace, cs, tr2: Trace) -> set[Trace]:
    """All ``tr`` with ``tr1 ||cs tr2 ⇓ tr``; empty when no rule applies."""
    chans = frozenset(cs)

    @cache
    def derive(left: Trace, right: Trace) -> frozenset[Trace]:
        if not left and not right:
            return frozenset({()})
        results: set[Trace] = set()
        results |= one_sided(left, right, swap=False)
        results |= one_sided(right, left, swap=True)
        if left and right:
            results |= both_heads(left, right)
        return frozenset(results)

    def one_sided(mine: Trace, other: Trace, swap: bool) -> set[Trace]:
        """Rules that look at one head only: local communication and the empty partner."""
        if not mine:
            return set()
        head, rest = mine[0], mine[1:]
        out: set[Trace] = set()
        # A deadlocked component deadlocks the composition.
        if isinstance(head, Deadlock):
            out.add((DEADLOCK,))
        elif isinstance(head, CommEvent) and not _shared(head, chans):
            tails = derive(other, rest) if swap else derive(rest, other)
            out.update((head, *tail) for tail in tails)
        elif not other:
            if isinstance(head, CommEvent):
                out.add((DEADLOCK,))
            elif isinstance(head, ContEvent) and (derive((), rest) if swap else derive(rest, ())):
                out.add((DEADLOCK,))
        return out

    def both_heads(left: Trace, right: Trace) -> set[Trace]:
        a, b = left[0], right[0]
        out: set[Trace] = set()
        if _shared(a, chans) and _shared(b, chans):
            if a.ch == b.ch and a.value == b.value and {a.direction, b.direction} == {"?", "!"}:
                out.update(
                    (CommEvent(a.ch, None, a.value), *tail)
                    for tail in derive(left[1:], right[1:])
                )
        elif isinstance(a, ContEvent) and isinstance(b, ContEvent):
            if not compat(a.rdy, b.rdy, chans):
                return out
            ready = hide(a.rdy | b.rdy, chans)
            if a.duration == b.duration:
                merged = ContEvent(a.duration, merge_path_exprs(a.path, b.path), ready)
                out.update((merged, *tail) for tail in derive(left[1:], right[1:]))
            elif a.duration > b.duration:
                merged = ContEvent(b.duration, merge_path_exprs(a.path, b.path), ready)
                remainder = (a.shifted(b.duration), *left[1:])
                out.update((merged, *tail) for tail in derive(remainder, right[1:]))
            else:
                merged = ContEvent(a.duration, merge_path_exprs(a.path, b.path), ready)
                remainder = (b.shifted(a.duration), *right[1:])
                out.update((merged, *tail) for tail in derive(left[1:], remainder))
        return out

    return set(derive(tuple(tr1), tuple(tr2)))
