"""Rewrites on parameterized assertions: substitution pushdown, delay,
normalization and monotonic replacement."""

from __future__ import annotations

import logging
from collections.abc import Mapping

from ..exceptions import AssertionPositionError
from ..symbolic.expr import (
    FALSE,
    TRUE,
    ZERO,
    Add,
    Const,
    Expr,
    Sub,
    Var,
    free_atoms,
    substitute_many,
)
from ..symbolic.simplify import simplify
from .assn import (
    FALSE_A,
    TRUE_A,
    Assertion,
    Binder,
    BoolLift,
    CommSpec,
    Conj,
    Disj,
    ExprBinder,
    FalseAssn,
    InSpec,
    Interrupt,
    InterruptInf,
    IOSync,
    OutSpec,
    Subst,
    TrueAssn,
    Wait,
    WaitIn,
    WaitOutv,
    bind,
    bind_expr,
    children,
    conj_a,
    with_children,
)
from .path import shift_path, subst_path

logger = logging.getLogger(__name__)

Pairs = Mapping[str, Expr]


# ============================================================================
# Substitution pushdown
# ============================================================================


def compose_pairs(inner: Pairs, outer: Pairs) -> dict[str, Expr]:
    """Pairs of ``P[inner][outer]`` as one simultaneous substitution."""
    mapping = {Var(x): e for x, e in outer.items()}
    result = {x: simplify(substitute_many(e, mapping)) for x, e in inner.items()}
    for x, e in outer.items():
        result.setdefault(x, e)
    return {x: e for x, e in result.items() if e != Var(x)}


def make_subst(body: Assertion, pairs: Pairs) -> Assertion:
    """``body[pairs]`` as a node, folding nested substitutions."""
    pairs = {x: e for x, e in pairs.items() if e != Var(x)}
    if not pairs:
        return body
    if isinstance(body, Subst):
        return make_subst(body.body, compose_pairs(body.mapping(), pairs))
    return Subst(body, tuple(sorted(pairs.items())))


def push_subst(a: Assertion, pairs: Pairs) -> Assertion:
    """Distribute the start-state substitution ``pairs`` through ``a``.

    The substitution stops at ``init``, recursion nodes and sync residuals,
    which keep it as an explicit ``Subst``.
    """
    pairs = {x: e for x, e in pairs.items() if e != Var(x)}
    if not pairs:
        return a
    mapping = {Var(x): e for x, e in pairs.items()}

    def ex(e: Expr) -> Expr:
        return simplify(substitute_many(e, mapping))

    def body(b: Binder) -> Binder:
        return Binder(b.params, push_subst(b.body, pairs))

    match a:
        case TrueAssn() | FalseAssn():
            return a
        case Conj(l, r):
            return Conj(push_subst(l, pairs), push_subst(r, pairs))
        case Disj(l, r):
            return Disj(push_subst(l, pairs), push_subst(r, pairs))
        case BoolLift(cond, inner):
            return BoolLift(simplify(substitute_many(cond, mapping)), push_subst(inner, pairs))
        case Subst(inner, inner_pairs):
            return push_subst(inner, compose_pairs(dict(inner_pairs), pairs))
        case IOSync(ch, value, inner):
            return IOSync(ch, ex(value), push_subst(inner, pairs))
        case WaitIn(path, ch, b):
            return WaitIn(subst_path(path, pairs), ch, body(b))
        case WaitOutv(path, ch, value, b):
            return WaitOutv(subst_path(path, pairs), ch, ex(value), body(b))
        case Wait(path, delay, b):
            return Wait(subst_path(path, pairs), ex(delay), body(b))
        case Interrupt(path, delay, tail, comms):
            return Interrupt(
                subst_path(path, pairs),
                ex(delay),
                body(tail),
                tuple(_push_comm(c, pairs) for c in comms),
            )
        case InterruptInf(path, comms):
            return InterruptInf(subst_path(path, pairs), tuple(_push_comm(c, pairs) for c in comms))
    return make_subst(a, pairs)


def _push_comm(c: CommSpec, pairs: Pairs) -> CommSpec:
    mapping = {Var(x): e for x, e in pairs.items()}
    if isinstance(c, InSpec):
        return InSpec(c.ch, Binder(c.body.params, push_subst(c.body.body, pairs)))
    return OutSpec(
        c.ch,
        ExprBinder(c.value.params, simplify(substitute_many(c.value.expr, mapping))),
        Binder(c.body.params, push_subst(c.body.body, pairs)),
    )


# ============================================================================
# Delay
# ============================================================================


def _shift_binder(b: Binder, d: Expr) -> Binder:
    """``{d' ⇒ body(d' + d, ...)}`` with fresh parameters."""
    names = tuple(p.name for p in b.params)

    def make(first, *rest):
        return b.instantiate(simplify(Add(first, d)), *rest)

    return bind(names, make)


def delay_comm(c: CommSpec, d: Expr) -> CommSpec:
    if isinstance(c, InSpec):
        return InSpec(c.ch, _shift_binder(c.body, d))
    value = bind_expr(
        tuple(p.name for p in c.value.params),
        lambda dp: simplify(c.value.instantiate(Add(dp, d))),
    )
    return OutSpec(c.ch, value, _shift_binder(c.body, d))


def delay_assertion(d: Expr, a: Assertion) -> Assertion:
    """The remainder of a waiting assertion after ``d`` time units have passed."""
    d = simplify(d)
    if d == ZERO:
        return a
    match a:
        case Interrupt(path, delay, tail, comms):
            return Interrupt(
                shift_path(path, d),
                simplify(Sub(delay, d)),
                _shift_binder(tail, d),
                tuple(delay_comm(c, d) for c in comms),
            )
        case InterruptInf(path, comms):
            return InterruptInf(shift_path(path, d), tuple(delay_comm(c, d) for c in comms))
        case Wait(path, delay, b):
            return Wait(shift_path(path, d), simplify(Sub(delay, d)), _shift_binder(b, d))
        case WaitIn(path, ch, b):
            return WaitIn(shift_path(path, d), ch, _shift_binder(b, d))
        case WaitOutv(path, ch, value, b):
            return WaitOutv(shift_path(path, d), ch, value, _shift_binder(b, d))
    raise TypeError(f"delay applies to waiting assertions only, got {type(a).__name__}")


# ============================================================================
# Normalization
# ============================================================================


def _is_false(a: Assertion) -> bool:
    return isinstance(a, FalseAssn)


def normalize(a: Assertion) -> Assertion:
    """Most specific constructor, unit laws, and ``false`` propagation."""
    a = with_children(a, tuple(normalize(c) for c in children(a)))
    match a:
        case Conj(l, r):
            return conj_a(l, r)
        case Disj(l, r):
            if isinstance(l, TrueAssn) or isinstance(r, TrueAssn):
                return TRUE_A
            if _is_false(l):
                return r
            if _is_false(r):
                return l
        case BoolLift(cond, body):
            cond = simplify(cond)
            if cond == FALSE or _is_false(body):
                return FALSE_A
            if cond == TRUE:
                return body
            return BoolLift(cond, body)
        case Subst(body, pairs):
            if _is_false(body) or isinstance(body, TrueAssn):
                return body
            return make_subst(body, dict(pairs))
        case IOSync(_, _, body) if _is_false(body):
            return FALSE_A
        case InterruptInf(path, (InSpec(ch, b),)):
            return normalize(WaitIn(path, ch, b))
        case InterruptInf(path, (OutSpec(ch, f, b),)) if not (
            free_atoms(f.expr) & set(f.params)
        ):
            return normalize(WaitOutv(path, ch, f.expr, b))
        case InterruptInf(_, comms) if all(_is_false(c.body.body) for c in comms):
            return FALSE_A
        case Interrupt(path, delay, tail, ()):
            return normalize(Wait(path, delay, tail))
        case Interrupt(_, _, tail, comms) if _is_false(tail.body) and all(
            _is_false(c.body.body) for c in comms
        ):
            return FALSE_A
        case Wait(_, delay, b):
            if _is_false(b.body):
                return FALSE_A
            delay = simplify(delay)
            if isinstance(delay, Const) and delay.value <= 0:
                return normalize(b.instantiate(ZERO))
        case WaitIn(_, _, b) | WaitOutv(_, _, _, b) if _is_false(b.body):
            return FALSE_A
    return a


# ============================================================================
# Monotonic replacement
# ============================================================================


def unit_laws(a: Assertion) -> Assertion:
    """Disjunction/conjunction units and empty substitutions, bottom-up."""
    a = with_children(a, tuple(unit_laws(c) for c in children(a)))
    match a:
        case Disj(l, r):
            if _is_false(l):
                return r
            if _is_false(r):
                return l
        case Conj(l, r):
            if isinstance(l, TrueAssn):
                return r
            if isinstance(r, TrueAssn):
                return l
        case Subst(body, ()):
            return body
    return a


def subterm(a: Assertion, position: tuple[int, ...]) -> Assertion:
    current = a
    for depth, index in enumerate(position):
        kids = children(current)
        if not 0 <= index < len(kids):
            raise AssertionPositionError(
                f"Position {position} is invalid at depth {depth}: "
                f"{type(current).__name__} has {len(kids)} children"
            )
        current = kids[index]
    return current


def mono_rewrite(
    a: Assertion, replacements: Mapping[tuple[int, ...], Assertion]
) -> Assertion:
    """Replace sub-assertions at ``replacements`` positions.

    Each replacement must be entailed by the sub-assertion it replaces; the
    monotonicity of every constructor then makes the result entailed by ``a``.
    """
    for position in replacements:
        subterm(a, position)

    def rebuild(node: Assertion, position: tuple[int, ...]) -> Assertion:
        if position in replacements:
            return replacements[position]
        kids = children(node)
        if not kids:
            return node
        return with_children(
            node, tuple(rebuild(kid, (*position, i)) for i, kid in enumerate(kids))
        )

    result = unit_laws(rebuild(a, ()))
    logger.debug(f"Applied {len(replacements)} monotonic replacements")
    return result
