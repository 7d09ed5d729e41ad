"""Seeded random answers to interpreter requests."""

from __future__ import annotations

from fractions import Fraction

from faker import Faker

from ..lang.ast import Process
from ..symbolic.evaluate import State
from .interpreter import drive
from .schedule import (
    Branch,
    ChooseBranch,
    ChooseIterate,
    Choice,
    Comm,
    Iterate,
    OfferComm,
    Request,
    Responder,
    Schedule,
    recording,
)
from .trace import Trace


def random_delay(fake: Faker, limit: Fraction | None) -> Fraction:
    """A delay on the quarter grid in ``[0, 2]``, clipped to ``limit``."""
    delay = Fraction(fake.random_int(0, 8), 4)
    if limit is not None:
        if fake.boolean(chance_of_getting_true=20):
            return limit
        return min(delay, limit)
    return delay


def random_value(fake: Faker) -> Fraction:
    return Fraction(fake.random_int(-10, 10))


def random_responder(fake: Faker, unroll: int = 1) -> Responder:
    """Answer every request at random; loops run at most ``unroll`` extra iterations in total."""
    iterations = 0

    def answer(request: Request) -> Choice:
        nonlocal iterations
        match request:
            case ChooseBranch():
                return Branch(fake.random_int(0, 1))
            case ChooseIterate():
                again = iterations < unroll and fake.boolean(chance_of_getting_true=75)
                iterations += again
                return Iterate(again)
            case OfferComm(offers, limit, _):
                if limit is not None and fake.boolean(chance_of_getting_true=30):
                    return Comm(limit)
                index = fake.random_int(0, len(offers) - 1)
                value = random_value(fake) if offers[index].direction == "?" else None
                return Comm(random_delay(fake, limit), index, value)
        raise TypeError(f"not a request: {request!r}")

    return answer


def random_schedule(
    p: Process, s: State, seed: int = 0, unroll: int = 1
) -> tuple[Schedule, State, Trace]:
    """Run ``p`` from ``s`` under random choices; returns the replayable schedule and the run."""
    fake = Faker()
    fake.seed_instance(seed)
    log: list[Choice] = []
    final, trace = drive(p, s, recording(random_responder(fake, unroll), log))
    return Schedule(log), final, trace
