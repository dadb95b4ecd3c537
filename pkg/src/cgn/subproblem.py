"""
Linearized subproblems and distances.

At a point ``x`` with ``z = F(x)`` and ``J = F'(x)`` the Gauss-Newton step
comes from two LPs:

1. minimise ``h(z + J d)`` over ``||d||_inf <= delta``  (the value ``v1``);
2. minimise ``||d||_inf`` subject to ``h(z + J d) <= v1`` and the same
   trust region, which gives ``d(0, D_delta(x))``.

All norms are infinity norms, on both the domain and the range, so every
quantity here is an LP value. Constants such as Lipschitz bounds and
regularity moduli supplied elsewhere must be stated in these norms.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import SubproblemError
from .lp import LPStatus, make_lp, solve_lp
from .outer import SUBLEVEL_TOL, L1Deviation, LInfDeviation, OuterFunction

__all__ = [
    "StepRule",
    "StepResult",
    "solve_linearized",
    "solve_subproblem",
    "distance_to_C",
    "distance_to_DC",
    "linearized_distance_to_C",
]

#: Relative slack on the stage-one value in the minimum-norm LP.
STAGE2_SLACK = 1e-13


class StepRule(str, enum.Enum):
    MIN_NORM = "min_norm"
    FIRST_VERTEX = "first_vertex"


@dataclass(frozen=True, eq=False)
class StepResult:
    """
    Attributes
    ----------
    d : ndarray
        Chosen step.
    dist : float
        ``d(0, D_delta(x))`` in the infinity norm.
    subproblem_value : float
        ``min h(F(x) + F'(x) d)`` over the trust region.
    in_C : bool
        Whether the linearization reaches ``C`` (value within the sublevel tolerance of ``h_min``).
    """

    d: np.ndarray
    dist: float
    subproblem_value: float
    in_C: bool


def _box(n, delta):
    if math.isinf(delta):
        return np.full(n, -np.inf), np.full(n, np.inf)
    return np.full(n, -delta), np.full(n, delta)


def _min_norm_lp(blk, n, cap, delta):
    """LP over ``(d, u, tau)``: min tau s.t. blocks, cost @ u <= cap, |d_i| <= tau, |d_i| <= delta."""
    k = blk.cost.size
    rows = blk.A_d.shape[0]
    eye = np.eye(n)
    A_ub = np.vstack(
        [
            np.hstack([blk.A_d, blk.A_u, np.zeros((rows, 1))]),
            np.hstack([np.zeros((1, n)), blk.cost[None, :], np.zeros((1, 1))]),
            np.hstack([eye, np.zeros((n, k)), -np.ones((n, 1))]),
            np.hstack([-eye, np.zeros((n, k)), -np.ones((n, 1))]),
        ]
    )
    b_ub = np.r_[blk.rhs, cap, np.zeros(2 * n)]
    lo, hi = _box(n, delta)
    c = np.zeros(n + k + 1)
    c[-1] = 1.0
    return make_lp(c, A_ub=A_ub, b_ub=b_ub, lb=np.r_[lo, blk.u_lb, 0.0], ub=np.r_[hi, np.full(k, np.inf), np.inf])


def solve_linearized(h: OuterFunction, Fx, J, delta=math.inf, eta=1.0, rule=StepRule.MIN_NORM) -> StepResult:
    """
    Gauss-Newton step for the linearization ``d -> h(Fx + J d)``.

    Parameters
    ----------
    h : OuterFunction
    Fx : array_like, shape (m,)
        Value ``F(x)``.
    J : array_like, shape (m, n)
        Jacobian ``F'(x)``.
    delta : float
        Trust-region radius (infinity norm); ``inf`` for none.
    eta : float
        Admissible step-length ratio ``||d|| <= eta * dist``.
    rule : StepRule
        ``MIN_NORM`` returns the stage-two minimiser. ``FIRST_VERTEX``
        returns the stage-one vertex when its norm is within ``eta * dist``.

    Raises
    ------
    SubproblemError
        If either LP is not solved to optimality.
    """
    Fx = np.asarray(Fx, dtype=float).ravel()
    J = np.atleast_2d(np.asarray(J, dtype=float))
    n = J.shape[1]
    rule = StepRule(rule)
    blk = h.blocks(Fx, J)
    k = blk.cost.size
    lo, hi = _box(n, delta)
    stage1 = make_lp(
        np.r_[np.zeros(n), blk.cost],
        A_ub=np.hstack([blk.A_d, blk.A_u]),
        b_ub=blk.rhs,
        lb=np.r_[lo, blk.u_lb],
        ub=np.r_[hi, np.full(k, np.inf)],
    )
    s1 = solve_lp(stage1)
    if s1.status is LPStatus.UNBOUNDED:
        raise SubproblemError("linearized objective is unbounded below on the trust region")
    if not s1.optimal:
        raise SubproblemError(f"stage-one LP failed: {s1.status.value}")
    v1 = s1.value
    cap = v1 + STAGE2_SLACK * (1.0 + abs(v1))
    s2 = solve_lp(_min_norm_lp(blk, n, cap, delta))
    if not s2.optimal:
        raise SubproblemError(f"stage-two LP failed: {s2.status.value}")
    dist = float(s2.x[-1])
    d = s2.x[:n].copy()
    if rule is StepRule.FIRST_VERTEX:
        d1 = s1.x[:n]
        if np.abs(d1).max(initial=0.0) <= eta * dist + 1e-12:
            d = d1.copy()
    return StepResult(d=d, dist=dist, subproblem_value=float(v1), in_C=bool(v1 <= h.h_min + SUBLEVEL_TOL))


def solve_subproblem(problem, x, delta=None, eta=None, rule=StepRule.MIN_NORM) -> StepResult:
    """:func:`solve_linearized` at ``x`` for a :class:`~cgn.problem.CompositeProblem`."""
    Fx, J = problem.F.evaluate(x)
    delta = problem.delta if delta is None else delta
    eta = problem.eta if eta is None else eta
    return solve_linearized(problem.h, Fx, J, delta, eta, rule)


def linearized_distance_to_C(h: OuterFunction, Fx, J, tol=None):
    """
    ``d(0, D_C(x))`` for given ``F(x)`` and ``F'(x)``.

    Returns
    -------
    dist : float
        Smallest ``||d||_inf`` with ``h(Fx + J d) <= h_min + tol``;
        ``inf`` when no such ``d`` exists. ``tol`` defaults to the
        rounding allowance ``STAGE2_SLACK (1 + |h_min|)`` of the step LP,
        so that this distance and the one behind each step agree.
    feasible : bool
        False when ``D_C(x)`` is empty.
    """
    Fx = np.asarray(Fx, dtype=float).ravel()
    J = np.atleast_2d(np.asarray(J, dtype=float))
    n = J.shape[1]
    if tol is None:
        tol = STAGE2_SLACK * (1.0 + abs(h.h_min))
    sol = solve_lp(_min_norm_lp(h.blocks(Fx, J), n, h.h_min + tol, math.inf))
    if sol.status is LPStatus.INFEASIBLE:
        return math.inf, False
    if not sol.optimal:
        raise SubproblemError(f"distance LP failed: {sol.status.value}")
    return float(sol.x[-1]), True


def distance_to_DC(problem, x):
    """``(d(0, D_C(x)), feasible)`` at ``x`` for a composite problem."""
    Fx, J = problem.F.evaluate(x)
    return linearized_distance_to_C(problem.h, Fx, J)


def distance_to_C(h: OuterFunction, z) -> float:
    """
    Infinity-norm distance from ``z`` to ``C = {w : h(w) <= h_min}``.

    Deviation functions have ``C = {c}`` and are handled exactly; max-affine
    functions go through :func:`linearized_distance_to_C` with ``J = I``.
    """
    z = np.asarray(z, dtype=float).ravel()
    if isinstance(h, (L1Deviation, LInfDeviation)):
        h._z(z)
        return float(np.abs(z - h.c).max(initial=0.0))
    dist, feasible = linearized_distance_to_C(h, z, np.eye(z.size))
    if not feasible:
        raise SubproblemError("minimiser set of h is empty")
    return dist
