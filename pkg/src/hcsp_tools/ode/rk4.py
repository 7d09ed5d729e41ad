"""Classical Runge-Kutta integration, used to cross-check closed-form solutions."""

from __future__ import annotations

from collections.abc import Mapping

import numpy as np

from ..symbolic.evaluate import evaluate_float
from .solver import Equations


def rk4(
    eqs: Equations, s0: Mapping[str, float], t: float, steps: int = 2000
) -> dict[str, float]:
    """Integrate ``eqs`` from ``s0`` for ``t`` time units.

    Variables that the system does not evolve keep their ``s0`` value.
    """
    names = [x for x, _ in eqs]
    rhs = [e for _, e in eqs]
    fixed = {k: float(v) for k, v in s0.items()}

    def derivative(y: np.ndarray) -> np.ndarray:
        values = {**fixed, **dict(zip(names, y.tolist(), strict=True))}
        return np.array([evaluate_float(e, values) for e in rhs])

    y = np.array([float(s0[x]) for x in names])
    if steps <= 0 or t == 0:
        return dict(zip(names, y.tolist(), strict=True))
    h = t / steps
    for _ in range(steps):
        k1 = derivative(y)
        k2 = derivative(y + h / 2 * k1)
        k3 = derivative(y + h / 2 * k2)
        k4 = derivative(y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return dict(zip(names, y.tolist(), strict=True))
