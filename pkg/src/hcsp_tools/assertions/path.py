"""Path assertions: relations between the start state, elapsed time and the current state.

Every path assertion normalizes to a solution map ``s = s0[x ↦ e(s0, t)]``;
variables absent from the map keep their start value. The empty map is
``id_inv``.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass
from fractions import Fraction

from ..exceptions import StateMergeError
from ..symbolic.evaluate import Env, State, evaluate
from ..symbolic.expr import TIME, Add, Atom, Expr, Var, iter_atoms, substitute_many
from ..symbolic.simplify import simplify


class PathAssertion:
    """Base class of path assertions."""

    __slots__ = ()


@dataclass(frozen=True, slots=True)
class IdInv(PathAssertion):
    pass


@dataclass(frozen=True, slots=True)
class SolPath(PathAssertion):
    """``s = s0[x ↦ e]``; entries sorted by variable name."""

    entries: tuple[tuple[str, Expr], ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(sorted(self.entries, key=lambda kv: kv[0])))

    def as_dict(self) -> dict[str, Expr]:
        return dict(self.entries)


@dataclass(frozen=True, slots=True)
class Delayed(PathAssertion):
    """``I[t := t + shift]``."""

    inner: PathAssertion
    shift: Expr


@dataclass(frozen=True, slots=True)
class Merged(PathAssertion):
    """``I1 ⊎ I2`` over disjoint variable sets."""

    left: PathAssertion
    right: PathAssertion


ID_INV = IdInv()


def sol_path(mapping: Mapping[str, Expr]) -> PathAssertion:
    return SolPath(tuple(mapping.items())) if mapping else ID_INV


def path_map(path: PathAssertion) -> dict[str, Expr]:
    """The solution map of ``path`` after collapsing delays and merges."""
    match path:
        case IdInv():
            return {}
        case SolPath():
            return path.as_dict()
        case Delayed(inner, shift):
            return {
                name: simplify(substitute_many(e, {TIME: Add(TIME, shift)}))
                for name, e in path_map(inner).items()
            }
        case Merged(left, right):
            lhs, rhs = path_map(left), path_map(right)
            overlap = lhs.keys() & rhs.keys()
            if overlap:
                raise StateMergeError(
                    f"Merged paths share variables: {', '.join(sorted(overlap))}"
                )
            return {**lhs, **rhs}
    raise TypeError(f"not a path assertion: {path!r}")


def normalize_path(path: PathAssertion) -> PathAssertion:
    return sol_path(path_map(path))


def shift_path(path: PathAssertion, shift: Expr) -> PathAssertion:
    return normalize_path(Delayed(path, shift))


def merge_paths(left: PathAssertion, right: PathAssertion) -> PathAssertion:
    return normalize_path(Merged(left, right))


def subst_path(path: PathAssertion, pairs: Mapping[str, Expr]) -> PathAssertion:
    """Read the start state through the substitution ``pairs``.

    A substituted variable not moved by the path now starts at its new value,
    so it gains an entry ``y ↦ e``.
    """
    mapping = {Var(name): e for name, e in pairs.items()}
    current = path_map(path)
    result = {name: simplify(substitute_many(e, mapping)) for name, e in current.items()}
    for name, e in pairs.items():
        if name not in result:
            result[name] = e
    return sol_path({name: e for name, e in result.items() if e != Var(name)})


def map_path_atoms(path: PathAssertion, mapping: Mapping[Atom, Expr]) -> PathAssertion:
    """Substitute bound variables or boundary times inside the path."""
    current = path_map(path)
    return sol_path(
        {name: simplify(substitute_many(e, mapping)) for name, e in current.items()}
    )


def path_atoms(path: PathAssertion) -> list[Atom]:
    result: list[Atom] = []
    for _, e in sorted(path_map(path).items()):
        result.extend(iter_atoms(e))
    return result


def path_state(path: PathAssertion, s0: State, t: Fraction, env: Env | None = None) -> State:
    """The state ``path`` relates to ``s0`` after ``t`` time units."""
    scope = dict(env or {})
    scope[TIME] = Fraction(t)
    values = {name: evaluate(e, s0, scope) for name, e in path_map(path).items()}
    return s0.update_many(values)
