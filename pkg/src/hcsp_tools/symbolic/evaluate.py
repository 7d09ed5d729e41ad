"""Concrete states and exact evaluation."""

from __future__ import annotations

from collections.abc import Iterator, Mapping
from fractions import Fraction

from ..exceptions import (
    DivisionByZeroError,
    StateMergeError,
    UnboundVariableError,
    UnsupportedConstructError,
)
from .expr import (
    Add,
    And,
    Atom,
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
)

Number = Fraction | int


class State(Mapping[str, Fraction]):
    """Immutable map from program variable names to exact reals."""

    __slots__ = ("_values",)

    def __init__(self, values: Mapping[str, Number] | None = None):
        self._values: dict[str, Fraction] = {
            name: Fraction(value) for name, value in (values or {}).items()
        }

    def __getitem__(self, name: str) -> Fraction:
        try:
            return self._values[name]
        except KeyError:
            raise UnboundVariableError(name) from None

    def __iter__(self) -> Iterator[str]:
        return iter(self._values)

    def __len__(self) -> int:
        return len(self._values)

    def __hash__(self) -> int:
        return hash(frozenset(self._values.items()))

    def __eq__(self, other: object) -> bool:
        if isinstance(other, State):
            return self._values == other._values
        return NotImplemented

    def __repr__(self) -> str:
        body = ", ".join(f"{k}: {v}" for k, v in sorted(self._values.items()))
        return f"State({{{body}}})"

    def update(self, name: str, value: Number) -> State:
        """Return ``s[name ↦ value]``."""
        values = dict(self._values)
        values[name] = Fraction(value)
        return State(values)

    def update_many(self, values: Mapping[str, Number]) -> State:
        merged = dict(self._values)
        merged.update({k: Fraction(v) for k, v in values.items()})
        return State(merged)

    def merge(self, other: State) -> State:
        """Disjoint union ``s1 ⊎ s2``."""
        overlap = self._values.keys() & other._values.keys()
        if overlap:
            raise StateMergeError(
                f"Cannot merge states sharing variables: {', '.join(sorted(overlap))}"
            )
        return State({**self._values, **other._values})

    def restrict(self, names) -> State:
        return State({k: v for k, v in self._values.items() if k in names})


Env = Mapping[Atom, Fraction]


def evaluate(node, state: Mapping[str, Fraction], env: Env | None = None):
    """Evaluate an ``Expr`` to a ``Fraction`` or a ``BExpr`` to a ``bool``.

    Program variables are looked up in ``state``; bound variables and boundary
    times in ``env``. Unbound names raise ``UnboundVariableError``.
    """
    env = env or {}
    if isinstance(node, Expr):
        return _eval_expr(node, state, env)
    return _eval_bexpr(node, state, env)


def _lookup(atom: Atom, state: Mapping[str, Fraction], env: Env) -> Fraction:
    if isinstance(atom, Var):
        if isinstance(state, State):
            return state[atom.name]
        try:
            return Fraction(state[atom.name])
        except KeyError:
            raise UnboundVariableError(atom.name) from None
    try:
        return env[atom]
    except KeyError:
        raise UnboundVariableError(atom.name) from None


def _eval_expr(e: Expr, state, env: Env) -> Fraction:
    match e:
        case Const(value):
            return value
        case Var() | Bound() | FreshTime():
            return _lookup(e, state, env)
        case Neg(arg):
            return -_eval_expr(arg, state, env)
        case Add(l, r):
            return _eval_expr(l, state, env) + _eval_expr(r, state, env)
        case Sub(l, r):
            return _eval_expr(l, state, env) - _eval_expr(r, state, env)
        case Mul(l, r):
            return _eval_expr(l, state, env) * _eval_expr(r, state, env)
        case Div(l, r):
            denominator = _eval_expr(r, state, env)
            if denominator == 0:
                raise DivisionByZeroError(f"Division by zero in {e}")
            return _eval_expr(l, state, env) / denominator
        case Pow(base, n):
            value = _eval_expr(base, state, env)
            if value == 0 and n < 0:
                raise DivisionByZeroError(f"Zero raised to negative power in {e}")
            return value**n
    raise UnsupportedConstructError(e)


def _eval_bexpr(b: BExpr, state, env: Env) -> bool:
    match b:
        case BConst(value):
            return value
        case Cmp(op, l, r):
            a, c = _eval_expr(l, state, env), _eval_expr(r, state, env)
            if op == "==":
                return a == c
            if op == "<":
                return a < c
            if op == "<=":
                return a <= c
            if op == ">":
                return a > c
            return a >= c
        case Not(arg):
            return not _eval_bexpr(arg, state, env)
        case And(l, r):
            return _eval_bexpr(l, state, env) and _eval_bexpr(r, state, env)
        case Or(l, r):
            return _eval_bexpr(l, state, env) or _eval_bexpr(r, state, env)
        case Implies(l, r):
            return (not _eval_bexpr(l, state, env)) or _eval_bexpr(r, state, env)
        case Crossing():
            return _eval_bexpr(b.necessary(), state, env)
        case Exists():
            raise UnsupportedConstructError(b, f"Cannot evaluate quantified formula: {b}")
    raise UnsupportedConstructError(b)


def evaluate_float(
    e: Expr, values: Mapping[str, float], env: Mapping[Atom, float] | None = None
) -> float:
    """Floating-point twin of ``evaluate`` for numeric cross-checks."""
    env = env or {}
    match e:
        case Const(value):
            return float(value)
        case Var(name):
            try:
                return float(values[name])
            except KeyError:
                raise UnboundVariableError(name) from None
        case Bound() | FreshTime():
            try:
                return float(env[e])
            except KeyError:
                raise UnboundVariableError(e.name) from None
        case Neg(arg):
            return -evaluate_float(arg, values, env)
        case Add(l, r):
            return evaluate_float(l, values, env) + evaluate_float(r, values, env)
        case Sub(l, r):
            return evaluate_float(l, values, env) - evaluate_float(r, values, env)
        case Mul(l, r):
            return evaluate_float(l, values, env) * evaluate_float(r, values, env)
        case Div(l, r):
            denominator = evaluate_float(r, values, env)
            if denominator == 0:
                raise DivisionByZeroError(f"Division by zero in {e}")
            return evaluate_float(l, values, env) / denominator
        case Pow(base, n):
            return evaluate_float(base, values, env) ** n
    raise UnsupportedConstructError(e)
