"""Arithmetic side conditions left for an external solver."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Literal

from .symbolic.expr import TRUE, BExpr
from .symbolic.printer import pretty_bexpr
from .symbolic.simplify import simplify
from .symbolic.smtlib import SmtScript, build_script

logger = logging.getLogger(__name__)

ObligationOrigin = Literal[
    "division",
    "least-crossing",
    "undecided-guard",
    "goal",
    "rec-entry",
    "rec-inductive",
]


@dataclass(frozen=True)
class Obligation:
    """``hyp → goal`` must be valid over the reals."""

    goal: BExpr
    origin: ObligationOrigin
    hyp: BExpr = TRUE
    note: str = ""

    def __str__(self) -> str:
        if self.hyp == TRUE:
            return pretty_bexpr(self.goal)
        return f"{pretty_bexpr(self.hyp)} → {pretty_bexpr(self.goal)}"

    def script(self) -> SmtScript:
        comment = f"origin: {self.origin}"
        if self.note:
            comment += f"\n{self.note}"
        return build_script(self.goal, self.hyp, comment)


@dataclass
class ObligationLog:
    """Collects obligations in emission order, dropping duplicates and trivial ones."""

    items: list[Obligation] = field(default_factory=list)
    _seen: set[tuple[BExpr, BExpr, str]] = field(default_factory=set)

    def add(
        self, goal: BExpr, origin: ObligationOrigin, hyp: BExpr = TRUE, note: str = ""
    ) -> Obligation | None:
        goal = simplify(goal)
        if goal == TRUE:
            return None
        key = (hyp, goal, origin)
        if key in self._seen:
            return None
        self._seen.add(key)
        obligation = Obligation(goal, origin, hyp, note)
        self.items.append(obligation)
        logger.debug(f"Obligation ({origin}): {obligation}")
        return obligation

    def extend(self, obligations: list[Obligation]) -> None:
        for ob in obligations:
            self.add(ob.goal, ob.origin, ob.hyp, ob.note)

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self):
        return iter(self.items)
