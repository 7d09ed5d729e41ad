"""Discrete-event co-simulation of the components of a parallel composition.

Each sequential component runs its interpreter inside a simpy process. A
communication request is posted as a pending offer; it is answered by a
matching offer of another component on a shared channel, by a random
external communication, or by the interrupt's time limit, whichever comes
first on the simulation clock. The answers form one schedule per component,
and replaying them with ``execute_parallel_all`` gives runs whose
communications line up.
"""

from __future__ import annotations

import logging
from collections.abc import Mapping
from dataclasses import dataclass
from fractions import Fraction

import simpy
from faker import Faker

from ..lang.analysis import free_vars
from ..lang.ast import Parallel, Process
from ..symbolic.evaluate import State
from .interpreter import ParallelSchedule, run
from .sampling import random_delay, random_value
from .schedule import (
    Branch,
    ChooseBranch,
    ChooseIterate,
    Choice,
    Comm,
    Iterate,
    OfferComm,
    Request,
    Schedule,
    validate,
)
from .trace import Event, total_duration

logger = logging.getLogger(__name__)


def leaves(pc: Process) -> dict[str, Process]:
    """Sequential components of ``pc`` keyed by their position, left to right."""
    found: dict[str, Process] = {}

    def walk(p: Process, key: str) -> None:
        if isinstance(p, Parallel):
            walk(p.left, key + "L")
            walk(p.right, key + "R")
        else:
            found[key] = p

    walk(pc, "")
    return found


def shared_channels(pc: Process) -> frozenset[str]:
    if not isinstance(pc, Parallel):
        return frozenset()
    return pc.chans | shared_channels(pc.left) | shared_channels(pc.right)


def parallel_schedule(pc: Process, schedules: Mapping[str, Schedule], key: str = ""):
    """Arrange per-component schedules in the shape of ``pc``."""
    if isinstance(pc, Parallel):
        return ParallelSchedule(
            parallel_schedule(pc.left, schedules, key + "L"),
            parallel_schedule(pc.right, schedules, key + "R"),
        )
    return schedules[key]


@dataclass(eq=False)
class _Pending:
    leaf: str
    request: OfferComm
    posted: Fraction
    resolved: simpy.Event


class CoSimulation:
    """One random coordinated run of every component of ``pc`` from ``s0``."""

    def __init__(self, pc: Process, s0: State, seed: int = 0, unroll: int = 1):
        self.pc = pc
        self.s0 = s0
        self.fake = Faker()
        self.fake.seed_instance(seed)
        self.iterations = self.fake.random_int(0, unroll)
        self.shared = shared_channels(pc)
        self.env = simpy.Environment(initial_time=Fraction(0))
        self.pending: list[_Pending] = []
        self.logs: dict[str, list[Choice]] = {}
        self.finished: set[str] = set()
        self._loops: dict[str, int] = {}

    def run(self) -> ParallelSchedule | Schedule | None:
        """The schedules of a run in which every component terminates, else ``None``."""
        components = leaves(self.pc)
        for key, p in components.items():
            self.logs[key] = []
            self._loops[key] = 0
            self.env.process(self._component(key, p, self.s0.restrict(free_vars(p))))
        self.env.run()
        stuck = sorted(set(components) - self.finished)
        if stuck:
            logger.debug(f"Co-simulation blocked at {self.env.now} in components {stuck}")
            return None
        schedules = {key: Schedule(log) for key, log in self.logs.items()}
        return parallel_schedule(self.pc, schedules)

    def _component(self, key: str, p: Process, s: State):
        trace: list[Event] = []
        gen = run(p, s, trace)
        try:
            request = next(gen)
            while True:
                lag = total_duration(trace) - self.env.now
                if lag > 0:
                    yield self.env.timeout(lag)
                if isinstance(request, OfferComm):
                    choice = yield self._offer(key, request)
                else:
                    choice = self._choose(key, request)
                self.logs[key].append(validate(request, choice))
                request = gen.send(choice)
        except StopIteration:
            self.finished.add(key)

    def _choose(self, key: str, request: Request) -> Choice:
        if isinstance(request, ChooseBranch):
            return Branch(self.fake.random_int(0, 1))
        assert isinstance(request, ChooseIterate)
        again = self._loops[key] < self.iterations
        self._loops[key] += again
        return Iterate(again)

    # ------------------------------------------------------------------------
    # Communication
    # ------------------------------------------------------------------------

    def _offer(self, key: str, request: OfferComm) -> simpy.Event:
        me = _Pending(key, request, self.env.now, self.env.event())
        partners = [
            (i, other, j)
            for i, offer in enumerate(request.offers)
            if offer.ch in self.shared
            for other in self.pending
            if other.leaf != key
            for j, theirs in enumerate(other.request.offers)
            if theirs.ch == offer.ch and theirs.direction != offer.direction
        ]
        if partners:
            i, other, j = partners[self.fake.random_int(0, len(partners) - 1)]
            self.pending.remove(other)
            self._handshake(me, i, other, j)
            return me.resolved

        self.pending.append(me)
        external = [
            i for i, offer in enumerate(request.offers) if offer.ch not in self.shared
        ]
        limit = request.limit
        if external and (limit is None or self.fake.boolean(chance_of_getting_true=50)):
            index = external[self.fake.random_int(0, len(external) - 1)]
            delay = random_delay(self.fake, limit)
            value = random_value(self.fake) if request.offers[index].direction == "?" else None
            self.env.process(self._expire(me, delay, Comm(delay, index, value)))
        elif limit is not None:
            self.env.process(self._expire(me, limit, Comm(limit)))
        return me.resolved

    def _expire(self, me: _Pending, delay: Fraction, choice: Comm):
        yield self.env.timeout(delay)
        if me in self.pending:
            self.pending.remove(me)
            me.resolved.succeed(choice)

    def _handshake(self, me: _Pending, i: int, other: _Pending, j: int) -> None:
        now = self.env.now
        mine, theirs = me.request.offers[i], other.request.offers[j]
        my_delay, their_delay = now - me.posted, now - other.posted
        if mine.direction == "!":
            assert mine.value_at is not None
            value = mine.value_at(my_delay)
            me.resolved.succeed(Comm(my_delay, i))
            other.resolved.succeed(Comm(their_delay, j, value))
        else:
            assert theirs.value_at is not None
            value = theirs.value_at(their_delay)
            me.resolved.succeed(Comm(my_delay, i, value))
            other.resolved.succeed(Comm(their_delay, j))
        logger.debug(f"Handshake on {mine.ch} at {now} carrying {value}")
