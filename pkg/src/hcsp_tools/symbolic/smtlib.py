"""SMT-LIB v2 export of validity questions over the reals."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from ..exceptions import UnsupportedConstructError
from .expr import (
    TRUE,
    Add,
    And,
    BConst,
    BExpr,
    Bound,
    Cmp,
    Const,
    Crossing,
    Div,
    Exists,
    Expr,
    FreshTime,
    Implies,
    Mul,
    Neg,
    Not,
    Or,
    Pow,
    Sub,
    Var,
    fresh_bound,
    substitute,
)

LOGIC = "QF_NRA"
_SIMPLE_SYMBOL = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
_CMP = {"==": "=", "<": "<", "<=": "<=", ">": ">", ">=": ">="}


def _real(value: Fraction) -> str:
    def magnitude(v: Fraction) -> str:
        if v.denominator == 1:
            return f"{v.numerator}.0"
        return f"(/ {v.numerator}.0 {v.denominator}.0)"

    if value < 0:
        return f"(- {magnitude(-value)})"
    return magnitude(value)


@dataclass
class SmtScript:
    """Declarations and assertions of one solver query."""

    comment: str | None = None
    logic: str = LOGIC
    declarations: list[str] = field(default_factory=list)
    assertions: list[str] = field(default_factory=list)
    _names: dict = field(default_factory=dict)
    _bound_count: int = 0

    def symbol(self, atom: Var | Bound | FreshTime) -> str:
        if atom in self._names:
            return self._names[atom]
        if isinstance(atom, Var):
            name = atom.name if _SIMPLE_SYMBOL.match(atom.name) else f"|{atom.name}|"
        elif isinstance(atom, FreshTime):
            name = atom.name
        else:
            self._bound_count += 1
            name = f"{atom.name}!{self._bound_count}"
        taken = set(self._names.values())
        while name in taken:
            name = f"{name}!"
        self._names[atom] = name
        self.declarations.append(f"(declare-fun {name} () Real)")
        return name

    def local(self, atom: Bound) -> str:
        """Name for a quantified variable; it is bound in place, not declared."""
        self._bound_count += 1
        name = f"{atom.name}!{self._bound_count}"
        self._names[atom] = name
        return name

    def body(self) -> str:
        """Declarations and assertions, without logic or check-sat commands."""
        return "\n".join([*self.declarations, *self.assertions])

    def render(self) -> str:
        lines = []
        if self.comment:
            lines.extend(f"; {line}" for line in self.comment.splitlines())
        lines.append(f"(set-logic {self.logic})")
        lines.extend(self.declarations)
        lines.extend(self.assertions)
        lines.append("(check-sat)")
        lines.append("(exit)")
        return "\n".join(lines) + "\n"


def build_script(goal: BExpr, hyp: BExpr = TRUE, comment: str | None = None) -> SmtScript:
    """Script asserting ``hyp ∧ ¬goal``; unsat means ``hyp → goal`` is valid."""
    script = SmtScript(comment=comment)
    hyp_text = _bexpr(hyp, script, positive=True)
    goal_text = _bexpr(goal, script, positive=False)
    if hyp != TRUE:
        script.assertions.append(f"(assert {hyp_text})")
    script.assertions.append(f"(assert (not {goal_text}))")
    return script


def to_smtlib(goal: BExpr, hyp: BExpr = TRUE, comment: str | None = None) -> str:
    return build_script(goal, hyp, comment).render()


def _expr(e: Expr, script: SmtScript) -> str:
    match e:
        case Const(value):
            return _real(value)
        case Var() | Bound() | FreshTime():
            return script.symbol(e)
        case Neg(arg):
            return f"(- {_expr(arg, script)})"
        case Add(l, r):
            return f"(+ {_expr(l, script)} {_expr(r, script)})"
        case Sub(l, r):
            return f"(- {_expr(l, script)} {_expr(r, script)})"
        case Mul(l, r):
            return f"(* {_expr(l, script)} {_expr(r, script)})"
        case Div(l, r):
            return f"(/ {_expr(l, script)} {_expr(r, script)})"
        case Pow(base, n):
            if n == 0:
                return "1.0"
            text = _expr(base, script)
            product = text if abs(n) == 1 else f"(* {' '.join([text] * abs(n))})"
            return product if n > 0 else f"(/ 1.0 {product})"
    raise UnsupportedConstructError(e)


def _bexpr(b: BExpr, script: SmtScript, positive: bool) -> str:
    """``positive`` is the polarity of ``b`` inside the asserted formula."""
    match b:
        case BConst(value):
            return "true" if value else "false"
        case Cmp(op, l, r):
            return f"({_CMP[op]} {_expr(l, script)} {_expr(r, script)})"
        case Not(arg):
            return f"(not {_bexpr(arg, script, not positive)})"
        case And(l, r):
            return f"(and {_bexpr(l, script, positive)} {_bexpr(r, script, positive)})"
        case Or(l, r):
            return f"(or {_bexpr(l, script, positive)} {_bexpr(r, script, positive)})"
        case Implies(l, r):
            return f"(=> {_bexpr(l, script, not positive)} {_bexpr(r, script, positive)})"
        case Exists(var, body):
            if positive:
                witness = fresh_bound(var.name)
                return _bexpr(substitute(body, var, witness), script, positive)
            script.logic = "NRA"
            name = script.local(var)
            return f"(exists (({name} Real)) {_bexpr(body, script, positive)})"
        case Crossing():
            if not positive:
                raise UnsupportedConstructError(
                    b, f"Boundary crossing under negation is not expressible: {b}"
                )
            return _bexpr(b.necessary(), script, positive)
    raise UnsupportedConstructError(b)
