"""Synchronizing the assertions of two parallel components.

``SyncEngine.sync(P, Q, ctx)`` eliminates the residual ``sync(chs, P, Q)`` by
structural recursion. Falsity, disjunctions, boolean lifts and substitutions
are pulled out first; then recursion meets recursion, termination meets
termination, and waiting blocks are merged. Every waiting assertion is read
as an interrupt (``wait_in``, ``wait_outv`` and ``wait`` are special cases).

``Context`` carries what is known about the start state of the pair: the
accumulated facts, the loop holes of enclosing recursions and, while a
recursion premise is being checked, its number.
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Iterable, Iterator, Mapping
from dataclasses import dataclass, field, replace

from ..assertions.assn import (
    FALSE_A,
    INIT,
    Assertion,
    Binder,
    BoolLift,
    CommSpec,
    Disj,
    FalseAssn,
    Init,
    InSpec,
    Interrupt,
    InterruptInf,
    IOSync,
    OutSpec,
    Rec,
    RecVar,
    Subst,
    SyncResidual,
    Wait,
    WaitIn,
    WaitOutv,
    bind,
    bind_expr,
    disj_a,
    free_vars,
    leaf_count,
    walk,
)
from ..assertions.path import PathAssertion, merge_paths
from ..assertions.rewrite import delay_assertion, make_subst, normalize
from ..exceptions import RecRulePremiseError, UnsupportedResidualError
from ..models import BranchStats
from ..obligations import Obligation, ObligationLog
from ..ready import ReadySet, compat, rdy
from ..symbolic.expr import (
    TRUE,
    ZERO,
    And,
    BExpr,
    Expr,
    Or,
    Var,
    conj,
    conjuncts,
    eq,
    free_atoms,
    fresh_bound,
    ge,
    gt,
    le,
    lt,
    negate,
    substitute_many,
)
from ..symbolic.simplify import simplify
from .decide import GuardDecider
from .naming import NamedAssertion, check_disjoint, lift, merge_named

logger = logging.getLogger(__name__)

# Rule variants that are wrong on purpose; oracle tests must catch each one.
MUTATIONS = frozenset(
    {"receive-zero", "drop-substitution", "swap-race", "no-escape", "drop-external"}
)

__all__ = [
    "MUTATIONS",
    "Block",
    "Context",
    "SyncEngine",
    "SyncResult",
    "as_block",
    "comm",
    "compat",
    "synchronize",
]


# ============================================================================
# Context
# ============================================================================


@dataclass(frozen=True)
class Context:
    """Facts about the current start state, as a conjunction."""

    facts: tuple[BExpr, ...] = ()
    holes: tuple[tuple[tuple[str, str], str], ...] = ()
    premise: int | None = None

    @property
    def cond(self) -> BExpr:
        return conj(*self.facts)

    def hole(self, left: str, right: str) -> str | None:
        return dict(self.holes).get((left, right))

    def assume(self, *facts: BExpr) -> Context:
        known = list(self.facts)
        for fact in facts:
            for part in conjuncts(simplify(fact)):
                if part not in known:
                    known.append(part)
        return replace(self, facts=tuple(known))

    def after_subst(self, pairs: Mapping[str, Expr]) -> Context:
        """Facts about ``s0[x := e]`` given facts about ``s0``.

        Old values of overwritten variables become fresh witnesses:
        ``∃v. cond[v/x] ∧ x = e[v/x]`` with the quantifier left implicit.
        """
        mentioned: set = set()
        for node in (*self.facts, *pairs.values()):
            mentioned |= free_atoms(node)
        witnesses = {Var(x): fresh_bound(x) for x in sorted(pairs) if Var(x) in mentioned}
        facts = tuple(substitute_many(f, witnesses) for f in self.facts)
        definitions = [eq(Var(x), substitute_many(e, witnesses)) for x, e in sorted(pairs.items())]
        return replace(self, facts=facts).assume(*definitions)

    def inside_loop(self, rec_cond: BExpr) -> Context:
        return replace(self, facts=(), premise=None).assume(rec_cond)

    def with_hole(self, left: str, right: str, name: str) -> Context:
        return replace(self, holes=(*self.holes, ((left, right), name)))


def _comm_window(d: Expr, limit: Expr | None) -> list[BExpr]:
    """Range of the delay ``d`` before a communication of a block bounded by ``limit``."""
    if limit is None:
        return [ge(d, 0)]
    if limit == ZERO:
        return [eq(d, 0)]
    return [ge(d, 0), Or(le(d, limit), eq(d, 0))]


def _tail_time(d: Expr, delay: Expr) -> list[BExpr]:
    """The tail of a block with waiting time ``delay`` starts at ``max(delay, 0)``."""
    return [ge(d, 0), ge(d, delay), Or(eq(d, delay), eq(d, 0))]


# ============================================================================
# Waiting blocks
# ============================================================================


@dataclass(frozen=True)
class Block:
    """A waiting assertion in interrupt form; ``delay`` ``None`` waits forever."""

    source: Assertion
    path: PathAssertion
    delay: Expr | None
    tail: Binder | None
    comms: tuple[CommSpec, ...]

    @property
    def ready(self) -> ReadySet:
        return rdy(self.comms)

    def external(self, chs: frozenset[str]) -> tuple[CommSpec, ...]:
        return tuple(c for c in self.comms if c.ch not in chs)

    def delayed(self, d: Expr) -> Assertion:
        return delay_assertion(d, self.source)


def as_block(a: Assertion) -> Block | None:
    match a:
        case WaitIn(path, ch, body):
            return Block(a, path, None, None, (InSpec(ch, body),))
        case WaitOutv(path, ch, value, body):
            spec = OutSpec(ch, bind_expr(("d",), lambda _d: value), body)
            return Block(a, path, None, None, (spec,))
        case Wait(path, delay, body):
            return Block(a, path, delay, body, ())
        case Interrupt(path, delay, tail, comms):
            return Block(a, path, delay, tail, comms)
        case InterruptInf(path, comms):
            return Block(a, path, None, None, comms)
    return None


def handshakes(
    cm1: Iterable[CommSpec],
    cm2: Iterable[CommSpec],
    chs: frozenset[str],
    *,
    mutation: str | None = None,
) -> Iterator[tuple[str, Expr, Assertion, Assertion]]:
    """Matching shared pairs at delay 0 as ``(ch, value, left body, right body)``."""
    cm2 = tuple(cm2)
    for c1 in cm1:
        if c1.ch not in chs:
            continue
        for c2 in cm2:
            if c2.ch != c1.ch or c2.direction == c1.direction:
                continue
            if isinstance(c1, OutSpec):
                assert isinstance(c2, InSpec)
                value = simplify(c1.value.instantiate(ZERO))
                got = ZERO if mutation == "receive-zero" else value
                yield c1.ch, value, c1.body.instantiate(ZERO), c2.body.instantiate(ZERO, got)
            else:
                assert isinstance(c2, OutSpec)
                value = simplify(c2.value.instantiate(ZERO))
                got = ZERO if mutation == "receive-zero" else value
                yield c1.ch, value, c1.body.instantiate(ZERO, got), c2.body.instantiate(ZERO)


def comm(cm1: Iterable[CommSpec], cm2: Iterable[CommSpec], chs: Iterable[str]) -> Assertion:
    """The handshake disjunction, with each continuation left as a sync residual."""
    shared = frozenset(chs)
    return disj_a(
        *(
            IOSync(ch, value, SyncResidual(shared, left, right))
            for ch, value, left, right in handshakes(cm1, cm2, shared)
        )
    )


# ============================================================================
# Engine
# ============================================================================


class SyncEngine:
    """Applies the synchronization rules; collects obligations and loop statistics."""

    def __init__(
        self,
        chs: Iterable[str],
        decider: GuardDecider | None = None,
        *,
        rec_cond: BExpr = TRUE,
        goal: BExpr | None = None,
        sides: tuple[NamedAssertion, NamedAssertion] | None = None,
        mutation: str | None = None,
    ):
        if mutation is not None and mutation not in MUTATIONS:
            raise ValueError(f"unknown rule mutation {mutation!r}")
        self.chs = frozenset(chs)
        self.decider = decider or GuardDecider()
        self.rec_cond = simplify(rec_cond)
        self.goal = goal
        self.sides = sides
        self.mutation = mutation
        self.obligations = ObligationLog()
        self.branch_stats: list[BranchStats] = []
        self.pruned = 0

    def sync(self, left: Assertion, right: Assertion, ctx: Context) -> Assertion:
        if isinstance(left, FalseAssn) or isinstance(right, FalseAssn):
            return FALSE_A
        if isinstance(left, Subst) and isinstance(right, Subst):
            return self._both_substs(left, right, ctx)
        for swapped, mine, other in ((False, left, right), (True, right, left)):
            match mine:
                case Disj(a, b):
                    return disj_a(
                        self._pair(a, other, swapped, ctx), self._pair(b, other, swapped, ctx)
                    )
                case BoolLift(cond, body):
                    return self._bool(cond, body, other, swapped, ctx)
                case Subst(body, pairs) if not set(dict(pairs)) & free_vars(other):
                    return self._subst(body, dict(pairs), other, swapped, ctx)
        for side in (left, right):
            if isinstance(side, Subst):
                other = right if side is left else left
                read = set(side.mapping()) & free_vars(other)
                raise UnsupportedResidualError(
                    f"Substitution on {', '.join(sorted(read))} cannot move past {other}, "
                    "which reads those variables"
                )

        match left, right:
            case Rec(), Rec():
                return self._rec(left, right, ctx)
            case RecVar(n1), RecVar(n2) if ctx.hole(n1, n2) is not None:
                return self._iteration_end(ctx.hole(n1, n2), ctx)
            case (RecVar(), _) | (_, RecVar()):
                raise RecRulePremiseError(
                    ctx.premise or 4,
                    f"loop iterations do not line up: {left} meets {right}",
                )
            case Init(), Init():
                self._goal(ctx, "termination")
                return INIT

        b1, b2 = as_block(left), as_block(right)
        if b1 is not None and b2 is not None:
            return self._blocks(b1, b2, ctx)
        instant1 = isinstance(left, Init | IOSync)
        instant2 = isinstance(right, Init | IOSync)
        if (b1 is not None or instant1) and (b2 is not None or instant2):
            return self._instantaneous(left, right, b1, b2, ctx)
        raise UnsupportedResidualError(f"No synchronization rule for {left}  against  {right}")

    def _pair(self, mine: Assertion, other: Assertion, swapped: bool, ctx: Context) -> Assertion:
        return self.sync(other, mine, ctx) if swapped else self.sync(mine, other, ctx)

    def _side(self, swapped: bool) -> NamedAssertion | None:
        if self.sides is None:
            return None
        return self.sides[1 if swapped else 0]

    # ------------------------------------------------------------------------
    # Boolean lifts and substitutions
    # ------------------------------------------------------------------------

    def _feasible(self, guard: BExpr, ctx: Context) -> bool:
        """Whether a branch guarded by ``guard`` survives; only a conflict prunes it."""
        verdict = self.decider.decide(ctx.facts, guard)
        if verdict == "conflict":
            self.pruned += 1
            logger.debug(f"Pruned branch guarded by {guard}")
            return False
        if verdict == "unknown":
            self.obligations.add(
                negate(guard), "undecided-guard", ctx.cond, note="branch kept; a proof prunes it"
            )
        return True

    def _bool(
        self, cond: BExpr, body: Assertion, other: Assertion, swapped: bool, ctx: Context
    ) -> Assertion:
        side = self._side(swapped)
        guard = lift(cond, side) if side is not None else cond
        if not self._feasible(guard, ctx):
            return FALSE_A
        return BoolLift(guard, self._pair(body, other, swapped, ctx.assume(guard)))

    def _subst(
        self,
        body: Assertion,
        pairs: dict[str, Expr],
        other: Assertion,
        swapped: bool,
        ctx: Context,
    ) -> Assertion:
        inner = self._pair(body, other, swapped, ctx.after_subst(pairs))
        if self.mutation == "drop-substitution":
            return inner
        return make_subst(inner, pairs)

    def _both_substs(self, left: Subst, right: Subst, ctx: Context) -> Assertion:
        """Both substitutions at once; each reads the current start state.

        After a handshake the receiver's substitution reads the sender's
        variables, so pulling the sender's substitution alone would be wrong.
        """
        pairs = {**left.mapping(), **right.mapping()}
        clash = (set(left.mapping()) & free_vars(right.body)) | (
            set(right.mapping()) & free_vars(left.body)
        )
        if clash:
            raise UnsupportedResidualError(
                f"Substitutions on {', '.join(sorted(clash))} are read by the other side"
            )
        inner = self.sync(left.body, right.body, ctx.after_subst(pairs))
        if self.mutation == "drop-substitution":
            return inner
        return make_subst(inner, pairs)

    # ------------------------------------------------------------------------
    # Recursion
    # ------------------------------------------------------------------------

    def _rec(self, r1: Rec, r2: Rec, ctx: Context) -> Assertion:
        name = f"{r1.name}{r2.name}"
        self.obligations.add(self.rec_cond, "rec-entry", ctx.cond, note=f"entry of loop {name}")
        inside = ctx.inside_loop(self.rec_cond)
        self._premise(1, r1.base, r2.step, inside)
        self._premise(2, r1.step, r2.base, inside)
        base = self.sync(r1.base, r2.base, inside)
        step = normalize(self.sync(r1.step, r2.step, inside.with_hole(r1.name, r2.name, name)))

        generated = leaf_count(r1.step) * leaf_count(r2.step)
        kept = leaf_count(step)
        stats = BranchStats(
            rec=name, generated=generated, pruned=max(generated - kept, 0), kept=kept
        )
        self.branch_stats.append(stats)
        logger.info(f"Loop {name}: {generated} branches generated, {kept} kept")
        return Rec(name, base, step)

    def _premise(self, number: int, left: Assertion, right: Assertion, ctx: Context) -> None:
        """Exiting on one side while the other iterates must be impossible."""
        scratch = SyncEngine(
            self.chs,
            self.decider,
            rec_cond=self.rec_cond,
            sides=self.sides,
            mutation=self.mutation,
        )
        result = normalize(scratch.sync(left, right, replace(ctx, premise=number)))
        if result != FALSE_A:
            raise RecRulePremiseError(number, f"expected false, synchronization gives {result}")

    def _iteration_end(self, name: str, ctx: Context) -> Assertion:
        self.obligations.add(
            self.rec_cond, "rec-inductive", ctx.cond, note=f"end of an iteration of {name}"
        )
        self._goal(ctx, f"end of an iteration of {name}")
        return RecVar(name)

    def _goal(self, ctx: Context, where: str) -> None:
        if self.goal is not None:
            self.obligations.add(self.goal, "goal", ctx.cond, note=where)

    # ------------------------------------------------------------------------
    # Waiting blocks
    # ------------------------------------------------------------------------

    def _blocks(self, b1: Block, b2: Block, ctx: Context) -> Assertion:
        path = merge_paths(b1.path, b2.path)
        if compat(b1.ready, b2.ready, self.chs):
            return self._race(b1, b2, path, ctx)
        return self._merged(
            b1,
            b2,
            path,
            ZERO,
            TRUE,
            ctx,
            lambda _d, c: disj_a(
                self._handshake(b1, b2, c),
                self._escape(b1, b2.source, False, c),
                self._escape(b2, b1.source, True, c),
            ),
        )

    def _race(self, b1: Block, b2: Block, path: PathAssertion, ctx: Context) -> Assertion:
        """No handshake is possible now: the block that ends first decides."""
        e1, e2 = b1.delay, b2.delay
        if e1 is None and e2 is None:
            comms = self._rel(b1.external(self.chs), b2.delayed, False, ctx, None) + self._rel(
                b2.external(self.chs), b1.delayed, True, ctx, None
            )
            return InterruptInf(path, comms) if comms else FALSE_A

        if self.mutation == "swap-race" and e1 is not None and e2 is not None:
            e1, e2 = e2, e1
        branches: list[Assertion] = []
        if e1 is not None:
            assert b1.tail is not None
            tail1 = b1.tail
            guard = TRUE if e2 is None else And(lt(e1, e2), gt(e2, 0))
            branches.append(
                self._merged(
                    b1, b2, path, e1, guard, ctx,
                    lambda d, c: self.sync(tail1.instantiate(d), b2.delayed(d), c),
                )
            )
        if e2 is not None:
            assert b2.tail is not None
            tail2 = b2.tail
            guard = TRUE if e1 is None else And(lt(e2, e1), gt(e1, 0))
            branches.append(
                self._merged(
                    b1, b2, path, e2, guard, ctx,
                    lambda d, c: self.sync(b1.delayed(d), tail2.instantiate(d), c),
                )
            )
        if e1 is not None and e2 is not None:
            assert b1.tail is not None and b2.tail is not None
            tail1, tail2 = b1.tail, b2.tail
            guard = Or(eq(e1, e2), And(le(e1, 0), le(e2, 0)))
            branches.append(
                self._merged(
                    b1, b2, path, e1, guard, ctx,
                    lambda d, c: disj_a(
                        self.sync(tail1.instantiate(d), b2.delayed(d), c),
                        self.sync(b1.delayed(d), tail2.instantiate(d), c),
                    ),
                )
            )
        return disj_a(*branches)

    def _merged(
        self,
        b1: Block,
        b2: Block,
        path: PathAssertion,
        delay: Expr,
        guard: BExpr,
        ctx: Context,
        tail: Callable[[Expr, Context], Assertion],
    ) -> Assertion:
        """One merged interrupt: waiting time ``delay``, both sides' external comms."""
        guard = simplify(guard)
        if guard != TRUE and not self._feasible(guard, ctx):
            return FALSE_A
        inner = ctx.assume(guard)
        node = Interrupt(
            path,
            delay,
            bind(("d",), lambda d: tail(d, inner.assume(*_tail_time(d, delay)))),
            self._rel(b1.external(self.chs), b2.delayed, False, inner, delay)
            + self._rel(b2.external(self.chs), b1.delayed, True, inner, delay),
        )
        return node if guard == TRUE else BoolLift(guard, node)

    def _rel(
        self,
        comms: tuple[CommSpec, ...],
        other_at: Callable[[Expr], Assertion],
        swapped: bool,
        ctx: Context,
        limit: Expr | None,
    ) -> tuple[CommSpec, ...]:
        """External communications of one side; the other side is seen at the same delay."""
        if self.mutation == "drop-external":
            return ()
        side = self._side(swapped)
        result: list[CommSpec] = []
        for c in comms:
            if isinstance(c, InSpec):
                body = c.body
                result.append(
                    InSpec(
                        c.ch,
                        bind(
                            ("d", "v"),
                            lambda d, v, body=body: self._pair(
                                body.instantiate(d, v),
                                other_at(d),
                                swapped,
                                ctx.assume(*_comm_window(d, limit)),
                            ),
                        ),
                    )
                )
            else:
                if side is not None:
                    lift(c.value.expr, side)
                out_body = c.body
                result.append(
                    OutSpec(
                        c.ch,
                        c.value,
                        bind(
                            ("d",),
                            lambda d, out_body=out_body: self._pair(
                                out_body.instantiate(d),
                                other_at(d),
                                swapped,
                                ctx.assume(*_comm_window(d, limit)),
                            ),
                        ),
                    )
                )
        return tuple(result)

    def _handshake(self, b1: Block, b2: Block, ctx: Context) -> Assertion:
        return disj_a(
            *(
                IOSync(ch, value, self.sync(left, right, ctx))
                for ch, value, left, right in handshakes(
                    b1.comms, b2.comms, self.chs, mutation=self.mutation
                )
            )
        )

    def _escape(self, block: Block, other: Assertion, swapped: bool, ctx: Context) -> Assertion:
        """The block's tail taken at once, when its waiting time is not positive."""
        if block.delay is None or self.mutation == "no-escape":
            return FALSE_A
        assert block.tail is not None
        at_once = le(block.delay, 0)
        if not self._feasible(at_once, ctx):
            return FALSE_A
        rest = self._pair(block.tail.instantiate(ZERO), other, swapped, ctx.assume(at_once))
        return BoolLift(at_once, rest)

    # ------------------------------------------------------------------------
    # Sides that cannot wait
    # ------------------------------------------------------------------------

    def _instantaneous(
        self,
        left: Assertion,
        right: Assertion,
        b1: Block | None,
        b2: Block | None,
        ctx: Context,
    ) -> Assertion:
        """At least one side is terminated or emits an internal event now."""
        parts: list[Assertion] = []
        if isinstance(left, IOSync):
            parts.append(IOSync(left.ch, left.value, self.sync(left.body, right, ctx)))
        if isinstance(right, IOSync):
            parts.append(IOSync(right.ch, right.value, self.sync(left, right.body, ctx)))
        if b1 is not None:
            parts.append(self._against_instant(b1, right, False, ctx))
        if b2 is not None:
            parts.append(self._against_instant(b2, left, True, ctx))
        return disj_a(*parts)

    def _against_instant(
        self, block: Block, other: Assertion, swapped: bool, ctx: Context
    ) -> Assertion:
        """Only zero-time moves of ``block`` are possible before ``other`` acts."""
        escape = self._escape(block, other, swapped, ctx)
        return Interrupt(
            block.path,
            ZERO,
            bind(("d",), lambda _d: escape),
            self._rel(block.external(self.chs), lambda _d: other, swapped, ctx, ZERO),
        )


# ============================================================================
# Entry point
# ============================================================================


@dataclass
class SyncResult:
    """The synchronized assertion of a composition with its side conditions."""

    named: NamedAssertion
    obligations: list[Obligation] = field(default_factory=list)
    branch_stats: list[BranchStats] = field(default_factory=list)

    @property
    def assertion(self) -> Assertion:
        return self.named.assertion


def _check_residual_free(a: Assertion, where: str) -> None:
    for node in walk(a):
        if isinstance(node, SyncResidual):
            raise UnsupportedResidualError(f"{where} still contains {node}")


def synchronize(
    chs: Iterable[str],
    left: NamedAssertion,
    right: NamedAssertion,
    cond0: BExpr = TRUE,
    rec_cond: BExpr = TRUE,
    *,
    goal: BExpr | None = None,
    decider: GuardDecider | None = None,
    mutation: str | None = None,
) -> SyncResult:
    """The assertion of ``left ||chs right`` started in a state satisfying ``cond0``.

    ``mutation`` names one of ``MUTATIONS`` to run a broken rule instead.
    """
    check_disjoint(left, right)
    _check_residual_free(left.assertion, left.name)
    _check_residual_free(right.assertion, right.name)
    engine = SyncEngine(
        chs, decider, rec_cond=rec_cond, goal=goal, sides=(left, right), mutation=mutation
    )
    logger.info(f"Synchronizing {left.name} with {right.name} on {sorted(engine.chs)}")
    result = normalize(engine.sync(left.assertion, right.assertion, Context().assume(cond0)))
    _check_residual_free(result, "synchronized assertion")
    logger.info(
        f"Synchronized {left.name}{right.name}: {leaf_count(result)} branches, "
        f"{engine.pruned} pruned, {len(engine.obligations)} obligations"
    )
    return SyncResult(
        merge_named(left, right, result), list(engine.obligations), engine.branch_stats
    )
