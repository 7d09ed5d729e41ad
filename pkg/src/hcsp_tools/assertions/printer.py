"""Assertion pretty-printer.

Binder parameters print under their base name, primed when an enclosing
binder already uses it, so ``{d ⇒ wait(..., {d' ⇒ ...})}`` stays readable.
"""

from __future__ import annotations

from ..symbolic.expr import BExpr, Bound, Expr
from ..symbolic.printer import pretty_bexpr, pretty_expr
from .assn import (
    Assertion,
    Binder,
    BoolLift,
    CommSpec,
    Conj,
    Disj,
    ExprBinder,
    FalseAssn,
    Init,
    InSpec,
    Interrupt,
    InterruptInf,
    IOSync,
    Rec,
    RecVar,
    Subst,
    SyncResidual,
    TrueAssn,
    Wait,
    WaitIn,
    WaitOutv,
)
from .path import PathAssertion, path_map

Names = dict[Bound, str]


def _e(e: Expr, names: Names) -> str:
    return pretty_expr(e, "math", names)


def _b(b: BExpr, names: Names) -> str:
    return pretty_bexpr(b, "math", names)


def _scoped(params: tuple[Bound, ...], names: Names) -> tuple[Names, str]:
    scope = dict(names)
    taken = set(names.values())
    labels = []
    for p in params:
        label = p.name
        while label in taken:
            label += "'"
        taken.add(label)
        scope[p] = label
        labels.append(label)
    head = labels[0] if len(labels) == 1 else f"({', '.join(labels)})"
    return scope, head


def _binder(b: Binder, names: Names) -> str:
    scope, head = _scoped(b.params, names)
    return f"{{{head} ⇒ {_pretty(b.body, scope)}}}"


def _expr_binder(b: ExprBinder, names: Names) -> str:
    scope, head = _scoped(b.params, names)
    return f"{{{head} ⇒ {_e(b.expr, scope)}}}"


def pretty_path(path: PathAssertion, names: Names | None = None) -> str:
    mapping = path_map(path)
    if not mapping:
        return "id_inv"
    entries = ", ".join(f"{x} ↦ {_e(e, names or {})}" for x, e in sorted(mapping.items()))
    return f"s = s0[{entries}]"


def _comm(c: CommSpec, names: Names) -> str:
    if isinstance(c, InSpec):
        return f"⟨{c.ch}?, {_binder(c.body, names)}⟩"
    return f"⟨{c.ch}!, {_expr_binder(c.value, names)}, {_binder(c.body, names)}⟩"


def _comms(comms: tuple[CommSpec, ...], names: Names) -> str:
    return "[" + ", ".join(_comm(c, names) for c in comms) + "]"


def _precedence(a: Assertion) -> int:
    match a:
        case Rec():
            return 0
        case Disj():
            return 1
        case Conj() | BoolLift():
            return 2
    return 3


def _wrap(a: Assertion, names: Names, minimum: int) -> str:
    text = _pretty(a, names)
    return f"({text})" if _precedence(a) < minimum else text


def _pretty(a: Assertion, names: Names) -> str:
    match a:
        case TrueAssn():
            return "true"
        case FalseAssn():
            return "false"
        case Init():
            return "init"
        case RecVar(name):
            return name
        case Conj(l, r):
            return f"{_wrap(l, names, 2)} ∧ {_wrap(r, names, 3)}"
        case Disj(l, r):
            return f"{_wrap(l, names, 1)} ∨ {_wrap(r, names, 2)}"
        case BoolLift(cond, body):
            return f"↑({_b(cond, names)}) ∧ {_wrap(body, names, 2)}"
        case Subst(body, pairs):
            entries = ", ".join(f"{x} := {_e(e, names)}" for x, e in pairs)
            return f"{_wrap(body, names, 3)}[{entries}]"
        case IOSync(ch, value, body):
            return f"io({ch}, {_e(value, names)}, {_pretty(body, names)})"
        case WaitIn(path, ch, b):
            return f"wait_in({pretty_path(path, names)}, {ch}, {_binder(b, names)})"
        case WaitOutv(path, ch, value, b):
            return (
                f"wait_outv({pretty_path(path, names)}, {ch}, {_e(value, names)}, "
                f"{_binder(b, names)})"
            )
        case Wait(path, delay, b):
            return f"wait({pretty_path(path, names)}, {_e(delay, names)}, {_binder(b, names)})"
        case Interrupt(path, delay, tail, comms):
            return (
                f"interrupt({pretty_path(path, names)}, {_e(delay, names)}, "
                f"{_binder(tail, names)}, {_comms(comms, names)})"
            )
        case InterruptInf(path, comms):
            return f"interrupt∞({pretty_path(path, names)}, {_comms(comms, names)})"
        case Rec(name, base, step):
            return f"Rec {name}. {_wrap(base, names, 1)} ∨ {_wrap(step, names, 2)}"
        case SyncResidual(chs, l, r):
            return f"sync({{{', '.join(sorted(chs))}}}, {_pretty(l, names)}, {_pretty(r, names)})"
    raise TypeError(f"not an assertion: {a!r}")


def pretty_assertion(a: Assertion) -> str:
    """Render ``a`` in mathematical notation."""
    return _pretty(a, {})
