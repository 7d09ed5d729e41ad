"""Resolution requests raised by the interpreter and the choices answering them.

A schedule is a flat list of tagged choices consumed in evaluation order.
It serializes to JSON so that a failing oracle case can be replayed.
"""

from __future__ import annotations

import json
from collections import deque
from collections.abc import Callable, Iterable
from dataclasses import dataclass, field
from fractions import Fraction

from ..exceptions import ScheduleExhaustedError, ScheduleMismatchError
from ..ready import Direction, ReadySet


# ============================================================================
# Requests
# ============================================================================


@dataclass(frozen=True)
class ChooseBranch:
    """Pick a side of ``c1 $ c2``."""


@dataclass(frozen=True)
class ChooseIterate:
    """Run the loop body once more, or leave the loop."""


@dataclass(frozen=True)
class Offer:
    ch: str
    direction: Direction
    # Output value after waiting the given delay; ``None`` for inputs.
    value_at: Callable[[Fraction], Fraction] | None = field(default=None, compare=False)


@dataclass(frozen=True)
class OfferComm:
    """Wait for one of ``offers``, at most ``limit`` time units (``None`` is unbounded)."""

    offers: tuple[Offer, ...]
    limit: Fraction | None
    ready: ReadySet


Request = ChooseBranch | ChooseIterate | OfferComm


# ============================================================================
# Choices
# ============================================================================


@dataclass(frozen=True)
class Branch:
    index: int


@dataclass(frozen=True)
class Iterate:
    again: bool


@dataclass(frozen=True)
class Comm:
    """Communicate on ``offers[index]`` after ``delay``; ``index=None`` waits out the limit."""

    delay: Fraction
    index: int | None = None
    value: Fraction | None = None

    def __post_init__(self):
        object.__setattr__(self, "delay", Fraction(self.delay))
        if self.value is not None:
            object.__setattr__(self, "value", Fraction(self.value))


Choice = Branch | Iterate | Comm
_EXPECTED = {ChooseBranch: Branch, ChooseIterate: Iterate, OfferComm: Comm}


def validate(request: Request, choice: Choice) -> Choice:
    """Check that ``choice`` is a legal answer to ``request``."""
    expected = _EXPECTED[type(request)]
    if not isinstance(choice, expected):
        raise ScheduleMismatchError(
            f"Expected a {expected.__name__.lower()} choice, got {choice!r}"
        )
    match choice:
        case Branch(index) if index not in (0, 1):
            raise ScheduleMismatchError(f"Branch index must be 0 or 1, got {index}")
        case Comm(delay, index, value):
            assert isinstance(request, OfferComm)
            if delay < 0:
                raise ScheduleMismatchError(f"Negative delay {delay}")
            if request.limit is not None and delay > request.limit:
                raise ScheduleMismatchError(f"Delay {delay} exceeds the limit {request.limit}")
            if index is None:
                if request.limit is None:
                    raise ScheduleMismatchError("Cannot wait out an unbounded communication")
            elif not 0 <= index < len(request.offers):
                raise ScheduleMismatchError(f"No communication offer #{index}")
            elif request.offers[index].direction == "?" and value is None:
                raise ScheduleMismatchError(f"Input on {request.offers[index].ch} needs a value")
    return choice


class Schedule:
    """A queue of choices answering interpreter requests in order."""

    def __init__(self, choices: Iterable[Choice] = ()):
        self._choices = deque(choices)
        self.used: list[Choice] = []

    def __len__(self) -> int:
        return len(self._choices)

    def answer(self, request: Request) -> Choice:
        if not self._choices:
            raise ScheduleExhaustedError(_EXPECTED[type(request)].__name__.lower())
        choice = validate(request, self._choices.popleft())
        self.used.append(choice)
        return choice

    def to_json(self) -> str:
        return json.dumps([_encode(c) for c in [*self.used, *self._choices]])

    @classmethod
    def from_json(cls, text: str) -> Schedule:
        return cls(_decode(item) for item in json.loads(text))


def _encode(choice: Choice) -> dict:
    match choice:
        case Branch(index):
            return {"branch": index}
        case Iterate(again):
            return {"iterate": again}
        case Comm(delay, index, value):
            return {
                "comm": {
                    "delay": str(delay),
                    "index": index,
                    "value": None if value is None else str(value),
                }
            }
    raise TypeError(f"not a choice: {choice!r}")


def _decode(item: dict) -> Choice:
    if "branch" in item:
        return Branch(int(item["branch"]))
    if "iterate" in item:
        return Iterate(bool(item["iterate"]))
    if "comm" in item:
        comm = item["comm"]
        value = comm.get("value")
        return Comm(
            Fraction(comm["delay"]),
            comm.get("index"),
            None if value is None else Fraction(value),
        )
    raise ScheduleMismatchError(f"Unknown schedule entry: {item!r}")


Responder = Callable[[Request], Choice]


def recording(responder: Responder, log: list[Choice]) -> Responder:
    """Wrap ``responder`` so that every validated answer is appended to ``log``."""

    def answer(request: Request) -> Choice:
        choice = validate(request, responder(request))
        log.append(choice)
        return choice

    return answer
