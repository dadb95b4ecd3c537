"""
Built-in demonstration problems.

==============  ==========================================================
``sqrt2``       ``x^2 - 2`` with ``h = |.|`` from ``x0 = 1.5``; regular point
``boundary``    ``(1 - x)^2 / 2`` from ``x0 = 0``; double root, ``2 alpha K xi = 1``
``orthant``     2-d inequality ``F(x) <= 0``; Robinson condition, ``beta0 = 1``
``minimax``     Himmelblau residuals with ``h = ||.||_inf``; Robinson, estimated ``beta0``
``inequality``  ``x^2 + y^2 <= 1, x <= y`` with ``h = max(z1, z2, 0)``
``infeasible``  ``x^2 + 1`` with ``h = |.|``; no solution, the iteration wanders
==============  ==========================================================
"""

from __future__ import annotations

import numpy as np

from .io import ProblemSpec
from .majorant import Lipschitz
from .outer import LInfDeviation, MaxAffine
from .polynomial import PolynomialMap
from .problem import CompositeProblem
from .regularity import RegularPoint, Robinson

__all__ = ["DEMOS", "get_demo"]


def _abs1():
    return MaxAffine(np.array([[1.0], [-1.0]]), np.zeros(2))


def sqrt2():
    F = PolynomialMap(1, 1, [[(1.0, (2,)), (-2.0, (0,))]])
    problem = CompositeProblem(F, _abs1(), np.array([1.5]), tol_feas=1e-12)
    return ProblemSpec(
        problem,
        RegularPoint(r=0.5, beta=0.5),
        Lipschitz(K=2.0, R=0.5),
        {"xi": 0.125, "tol_feas": 1e-12},
        "sqrt2",
        "Newton's method for x^2 = 2 as a composite problem",
    )


def boundary():
    F = PolynomialMap(1, 1, [[(0.5, (0,)), (-1.0, (1,)), (0.5, (2,))]])
    problem = CompositeProblem(F, LInfDeviation(np.zeros(1)), np.array([0.0]))
    return ProblemSpec(
        problem,
        Robinson(),
        Lipschitz(K=1.0, R=2.0),
        {},
        "boundary",
        "double root at x = 1; the Kantorovich discriminant vanishes",
    )


def orthant():
    F = PolynomialMap(
        2,
        2,
        [
            [(1.0, (1, 0)), (0.5, (2, 0)), (0.1, (0, 0))],
            [(1.0, (0, 1)), (0.5, (0, 2)), (0.1, (0, 0))],
        ],
    )
    h = MaxAffine(np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]]), np.zeros(3))
    vrep = (np.array([[-0.1, -0.1]]), np.array([[-1.0, 0.0], [0.0, -1.0]]))
    problem = CompositeProblem(F, h, np.zeros(2))
    return ProblemSpec(
        problem,
        Robinson(vrep=vrep),
        Lipschitz(K=1.0),
        {},
        "orthant",
        "F(x) in the non-positive orthant; W = C - F(x0) given by its V-representation",
    )


def minimax():
    F = PolynomialMap(
        2,
        2,
        [
            [(1.0, (2, 0)), (1.0, (0, 1)), (-11.0, (0, 0))],
            [(1.0, (1, 0)), (1.0, (0, 2)), (-7.0, (0, 0))],
        ],
    )
    problem = CompositeProblem(F, LInfDeviation(np.zeros(2)), np.array([3.1, 1.9]))
    return ProblemSpec(problem, Robinson(), Lipschitz(K=2.0), {}, "minimax", "Himmelblau residuals near the root (3, 2)")


def inequality():
    F = PolynomialMap(
        2,
        2,
        [
            [(1.0, (2, 0)), (1.0, (0, 2)), (-1.0, (0, 0))],
            [(1.0, (1, 0)), (-1.0, (0, 1))],
        ],
    )
    h = MaxAffine(np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]]), np.zeros(3))
    problem = CompositeProblem(F, h, np.array([1.0, 0.2]))
    return ProblemSpec(problem, Robinson(), Lipschitz(K=4.0), {}, "inequality", "point of the unit disc with x <= y")


def infeasible():
    F = PolynomialMap(1, 1, [[(1.0, (2,)), (1.0, (0,))]])
    problem = CompositeProblem(F, _abs1(), np.array([0.5]))
    return ProblemSpec(
        problem,
        RegularPoint(r=0.25, beta=1.0),
        Lipschitz(K=2.0, R=0.25),
        {"max_iter": 50},
        "infeasible",
        "x^2 + 1 = 0 has no real solution",
    )


DEMOS = {
    "sqrt2": sqrt2,
    "boundary": boundary,
    "orthant": orthant,
    "minimax": minimax,
    "inequality": inequality,
    "infeasible": infeasible,
}


def get_demo(name) -> ProblemSpec:
    try:
        return DEMOS[name]()
    except KeyError:
        raise KeyError(f"unknown demo {name!r}; available: {', '.join(DEMOS)}") from None
