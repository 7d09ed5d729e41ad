"""Closed-form ODE solving and exit-time computation."""

from .rk4 import rk4
from .solver import (
    ODESolution,
    along_solution,
    boundary_condition,
    check_lipschitz,
    least_crossing,
    solve,
    solve_polynomial,
)

__all__ = [
    "ODESolution",
    "along_solution",
    "boundary_condition",
    "check_lipschitz",
    "least_crossing",
    "rk4",
    "solve",
    "solve_polynomial",
]
