"""
Regularity data at the starting point and semi-local convergence certificates.

Three kinds of regularity information are supported:

* :class:`QuasiRegular` -- a radius ``r`` and an increasing step function
  ``beta(t)`` with ``d(0, D_C(x)) <= beta(||x - x0||) d(F(x), C)`` on ``B(x0, r)``;
* :class:`RegularPoint` -- the same with a constant ``beta``;
* :class:`Robinson` -- ``C`` is a cone and ``d -> F'(x0) d - C`` is onto;
  ``beta0`` is the norm of its inverse and may be estimated by
  :func:`estimate_convex_process_inverse_norm`.

The regularity constants are inputs. They are never derived from ``F``;
only the Robinson modulus ``beta0`` can be computed, by brute force over the
vertices of the unit cube.

:func:`certify` evaluates every hypothesis of the matching convergence
theorem and returns a :class:`Certificate` listing each inequality with
both sides, so a failing certificate shows exactly what was violated.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DomainError
from .lp import LPStatus, make_lp, solve_lp
from .majorant import (
    AuxiliaryFunction,
    Lipschitz,
    MajorantModel,
    ScalarTrace,
    Smale,
    h3_condition,
    scalar_sequence,
)
from .subproblem import distance_to_C

__all__ = [
    "QuasiRegular",
    "RegularPoint",
    "Robinson",
    "Check",
    "Certificate",
    "ConvexProcessNorm",
    "alpha_lower_bound",
    "certify",
    "quasi_regular_bound_from_robinson",
    "robinson_radius",
    "estimate_convex_process_inverse_norm",
    "check_regular_point",
    "regularity_from_dict",
]

ALPHA_GRID = 1024
ALPHA_INFLATION = 1.001
XI_FLOOR = 1e-15
MAX_CUBE_DIM = 12


@dataclass(frozen=True)
class QuasiRegular:
    """
    Quasi-regular data: radius ``r`` and a right-continuous step function.

    ``beta(t) = values[i]`` for ``breakpoints[i] <= t < breakpoints[i+1]``;
    ``breakpoints[0]`` must be 0.
    """

    r: float
    breakpoints: tuple
    values: tuple

    def __post_init__(self):
        bp = tuple(float(b) for b in self.breakpoints)
        vals = tuple(float(v) for v in self.values)
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", vals)
        if not self.r > 0:
            raise ValueError("quasi-regular radius must be positive")
        if len(bp) != len(vals) or not bp or bp[0] != 0.0:
            raise ValueError("need one value per breakpoint and breakpoints[0] == 0")
        if any(b2 <= b1 for b1, b2 in zip(bp, bp[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        if any(v <= 0 for v in vals) or any(v2 < v1 for v1, v2 in zip(vals, vals[1:])):
            raise ValueError("beta values must be positive and non-decreasing")

    def beta(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < 0) or np.any(t >= self.r):
            raise DomainError(f"beta evaluated outside [0, {self.r})")
        idx = np.searchsorted(self.breakpoints, t, side="right") - 1
        out = np.asarray(self.values)[idx]
        return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class RegularPoint:
    """Regular starting point with constants ``r`` and ``beta``."""

    r: float
    beta: float

    def __post_init__(self):
        if not (self.r > 0 and self.beta > 0):
            raise ValueError("r and beta must be positive")


@dataclass(frozen=True, eq=False)
class Robinson:
    """
    Robinson condition data.

    Attributes
    ----------
    beta0 : float, optional
        Norm of the inverse convex process; estimated when absent.
    cone : ndarray, optional
        ``G`` with ``C = {z : G z <= 0}``; defaults to the outer function's cone.
    vrep : tuple of (vertices, rays), optional
        V-representation of ``C - F(x0)`` for the regular-point check.
    """

    beta0: Optional[float] = None
    cone: Optional[np.ndarray] = None
    vrep: Optional[tuple] = None

    def __post_init__(self):
        if self.beta0 is not None and not self.beta0 > 0:
            raise ValueError("beta0 must be positive")
        if self.cone is not None:
            object.__setattr__(self, "cone", np.atleast_2d(np.asarray(self.cone, dtype=float)))


@dataclass(frozen=True)
class Check:
    condition: str
    holds: bool
    lhs: float
    rhs: float

    def to_dict(self):
        return {"condition": self.condition, "lhs": _num(self.lhs), "rhs": _num(self.rhs), "holds": bool(self.holds)}


@dataclass(frozen=True)
class ConvexProcessNorm:
    """Outcome of :func:`estimate_convex_process_inverse_norm`."""

    value: float
    onto: bool
    n_vertices: int

    @property
    def status(self):
        return "ok" if self.onto else "not onto"


def _num(v):
    if v is None:
        return None
    v = float(v)
    if math.isnan(v):
        return None
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return v


@dataclass(frozen=True, eq=False)
class Certificate:
    """
    Verdict on every hypothesis of a semi-local convergence theorem.

    ``valid`` is the conjunction of all ``checks``. When h3 holds the
    scalar majorizing sequence is attached; ``predicted_error[k]`` is the
    a priori bound ``t_star - t_k`` on ``||x_* - x_k||``.
    """

    theorem: str
    xi: float
    alpha: float
    eta: float
    delta: float
    d0: float
    beta_at_zero: float
    t_star: float
    radius: float
    alpha_bound: float
    scalar: Optional[ScalarTrace]
    checks: tuple
    h4: bool
    beta0: Optional[float] = None
    cube_vertices: Optional[int] = None
    notes: tuple = field(default_factory=tuple)
    majorant: Optional[MajorantModel] = None

    @property
    def valid(self):
        return all(c.holds for c in self.checks)

    @property
    def rate(self):
        return "Q-quadratic" if self.h4 else "Q-linear only"

    @property
    def alpha_strict(self):
        """Advisory: alpha strictly above its lower bound."""
        return bool(self.alpha > self.alpha_bound)

    @property
    def predicted_error(self):
        return [] if self.scalar is None else self.scalar.errors()

    def failed(self):
        return [c for c in self.checks if not c.holds]

    def to_dict(self):
        return {
            "theorem": self.theorem,
            "valid": self.valid,
            "xi": _num(self.xi),
            "alpha": _num(self.alpha),
            "alpha_bound": _num(self.alpha_bound),
            "alpha_strict": self.alpha_strict,
            "eta": _num(self.eta),
            "delta": _num(self.delta),
            "d0": _num(self.d0),
            "beta_at_zero": _num(self.beta_at_zero),
            "beta0": _num(self.beta0),
            "cube_vertices": self.cube_vertices,
            "t_star": _num(self.t_star),
            "radius": _num(self.radius),
            "h4": bool(self.h4),
            "rate": self.rate,
            "checks": [c.to_dict() for c in self.checks],
            "scalar_trace": [] if self.scalar is None else [_num(t) for t in self.scalar.t],
            "q_quadratic_constant": None if self.scalar is None else _num(self.scalar.q_quadratic_constant),
            "predicted_error": [_num(e) for e in self.predicted_error],
            "notes": list(self.notes),
        }


def _a11_term(eta, beta, fp1):
    return eta * beta / (eta * beta * fp1 + 1.0)


def alpha_lower_bound(model, majorant: MajorantModel, xi, eta, t_star_probe=None) -> float:
    """
    Smallest admissible ``alpha`` for the given regularity data.

    * regular point: ``eta beta / (eta beta [f'(xi) + 1] + 1)``;
    * Robinson: ``eta beta0 / (1 + (eta - 1) beta0 [f'(xi) + 1])``;
    * quasi-regular: supremum over ``[xi, t_star_probe)`` of
      ``eta beta(t) / (eta beta(t) [f'(t) + 1] + 1)``, evaluated on a 1024
      point grid together with every breakpoint of ``beta`` in the interval,
      then multiplied by 1.001.

    Raises
    ------
    DomainError
        When ``xi`` is outside the majorant domain, or for quasi-regular
        data when ``t_star_probe`` is missing or not in ``(xi, r]``.
    """
    fp1 = float(majorant.fp(xi)) + 1.0
    if isinstance(model, RegularPoint):
        return _a11_term(eta, model.beta, fp1)
    if isinstance(model, Robinson):
        if model.beta0 is None:
            raise ValueError("Robinson data needs beta0 (estimate it first)")
        b0 = model.beta0
        return eta * b0 / (1.0 + (eta - 1.0) * b0 * fp1)
    if t_star_probe is None or not (xi < t_star_probe <= model.r):
        raise DomainError(f"need xi < t_star_probe <= r, got xi={xi}, probe={t_star_probe}, r={model.r}")
    grid = np.linspace(xi, t_star_probe, ALPHA_GRID, endpoint=False)
    bps = [b for b in model.breakpoints if xi <= b < t_star_probe]
    grid = np.unique(np.r_[grid, bps])
    grid = grid[grid < majorant.R]
    vals = _a11_term(eta, model.beta(grid), majorant.fp(grid) + 1.0)
    return float(np.max(vals)) * ALPHA_INFLATION


def quasi_regular_bound_from_robinson(beta0, majorant: MajorantModel, t) -> float:
    """Upper bound ``beta0 / (1 - beta0 [f'(t) + 1])`` on the quasi-regular bound function."""
    denom = 1.0 - beta0 * (float(majorant.fp(t)) + 1.0)
    if denom <= 0:
        raise DomainError(f"t={t} is at or beyond the Robinson radius")
    return beta0 / denom


def robinson_radius(beta0, majorant: MajorantModel) -> float:
    """
    ``sup {t in [0, R) : beta0 - 1 + beta0 f'(t) < 0}``.

    Closed forms are used for Lipschitz and Smale majorants; other models
    are bisected to 1e-12 and the lower (admissible) end is returned.
    """
    R = majorant.R
    if isinstance(majorant, Lipschitz):
        return min(1.0 / (beta0 * majorant.K), R)
    if isinstance(majorant, Smale):
        return min((1.0 - math.sqrt(beta0 / (1.0 + beta0))) / majorant.gamma, R)

    def g(t):
        return beta0 - 1.0 + beta0 * float(majorant.fp(t))

    if np.isfinite(R):
        top = R * (1.0 - 1e-15)
    else:
        top = 1.0
        while g(top) < 0:
            top *= 2.0
            if top > 1e300:
                return math.inf
    if g(top) < 0:
        return R
    lo, hi = 0.0, top
    while hi - lo > 1e-12:
        mid = 0.5 * (lo + hi)
        if g(mid) < 0:
            lo = mid
        else:
            hi = mid
    return lo


def _cone_member_lp(J0, G, y):
    """min ||d||_inf  s.t.  G (J0 d - y) <= 0."""
    m, n = J0.shape
    GJ = G @ J0
    eye = np.eye(n)
    A_ub = np.vstack(
        [
            np.hstack([GJ, np.zeros((G.shape[0], 1))]),
            np.hstack([eye, -np.ones((n, 1))]),
            np.hstack([-eye, -np.ones((n, 1))]),
        ]
    )
    b_ub = np.r_[G @ y, np.zeros(2 * n)]
    c = np.r_[np.zeros(n), 1.0]
    return make_lp(c, A_ub=A_ub, b_ub=b_ub, lb=np.r_[np.full(n, -np.inf), 0.0])


def estimate_convex_process_inverse_norm(J0, G) -> ConvexProcessNorm:
    """
    Norm of the inverse of ``d -> J0 d - C`` for the cone ``C = {z : G z <= 0}``.

    The map ``y -> d(0, T^{-1} y)`` is convex and positively homogeneous, so
    its maximum over the infinity-norm unit ball is attained at one of the
    ``2^m`` cube vertices; one small LP is solved per vertex.

    Returns
    -------
    ConvexProcessNorm
        ``onto`` is False (and ``value`` infinite) when some vertex is not
        reachable, i.e. the Robinson condition fails.
    """
    J0 = np.atleast_2d(np.asarray(J0, dtype=float))
    G = np.atleast_2d(np.asarray(G, dtype=float))
    m = J0.shape[0]
    if m > MAX_CUBE_DIM:
        raise ValueError(f"vertex enumeration limited to m <= {MAX_CUBE_DIM}, got m={m}")
    if G.shape[1] != m:
        raise ValueError("cone matrix G must have m columns")
    best = 0.0
    count = 0
    for signs in itertools.product((-1.0, 1.0), repeat=m):
        count += 1
        sol = solve_lp(_cone_member_lp(J0, G, np.array(signs)))
        if sol.status is LPStatus.INFEASIBLE:
            return ConvexProcessNorm(math.inf, False, 2**m)
        best = max(best, float(sol.x[-1]))
    return ConvexProcessNorm(best, True, count)


def check_regular_point(J0, vertices, rays=(), tol=1e-9) -> bool:
    """
    Decide ``Ker(J0^T) ∩ W° = {0}`` for ``W = conv(vertices) + cone(rays)``.

    For every coordinate ``i`` and sign ``s`` the LP
    ``max s y_i`` over ``{J0^T y = 0, <y, v> <= 0, <y, rho> <= 0, -1 <= y <= 1}``
    is solved; the intersection is trivial iff every optimum is zero.
    """
    J0 = np.atleast_2d(np.asarray(J0, dtype=float))
    m = J0.shape[0]
    V = np.asarray(vertices, dtype=float).reshape(-1, m)
    P = np.asarray(rays, dtype=float).reshape(-1, m)
    W = np.vstack([V, P])
    for i in range(m):
        for s in (1.0, -1.0):
            c = np.zeros(m)
            c[i] = -s
            lp = make_lp(c, A_ub=W if W.size else None, b_ub=np.zeros(W.shape[0]), A_eq=J0.T, b_eq=np.zeros(J0.shape[1]), lb=-1.0, ub=1.0)
            sol = solve_lp(lp)
            if not sol.optimal:
                raise DomainError(f"regular-point LP failed: {sol.status.value}")
            if -sol.value > tol:
                return False
    return True


def _robinson_data(problem, model, majorant, J0, notes):
    G = model.cone if model.cone is not None else problem.h.cone_G
    checks = [Check("C is a cone", G is not None, 1.0 if G is not None else 0.0, 1.0)]
    beta0, count = model.beta0, None
    if beta0 is None:
        if G is None:
            beta0 = math.nan
        else:
            est = estimate_convex_process_inverse_norm(J0, G)
            beta0, count = est.value, est.n_vertices
            notes.append(f"beta0 estimated by vertex enumeration over {est.n_vertices} cube vertices")
    onto = bool(np.isfinite(beta0))
    checks.append(Check("Robinson condition (T_x0 onto)", onto, beta0, math.inf))
    radius = robinson_radius(beta0, majorant) if onto else math.nan
    return Robinson(beta0 if onto else None, G, model.vrep), beta0, count, radius, checks


def _tighten_alpha(alpha, xi, majorant, bound_at, rounds=20):
    # alpha -> sup over [xi, t*(alpha)) only decreases alpha and t*, and each
    # iterate stays above the bound on its own (shorter) interval
    for _ in range(rounds):
        if not (np.isfinite(alpha) and alpha > 0 and xi > 0):
            break
        z = AuxiliaryFunction(xi, alpha, majorant).zero
        if not (z.h3 and z.t_star > xi):
            break
        nxt = bound_at(z.t_star)
        if not nxt < alpha:
            break
        alpha = nxt
    return alpha


def certify(problem, model, majorant: MajorantModel, eta=None, delta=None, xi=None, alpha=None) -> Certificate:
    """
    Evaluate the convergence hypotheses for ``problem`` started at ``problem.x0``.

    Parameters
    ----------
    problem : CompositeProblem
    model : QuasiRegular, RegularPoint or Robinson
    majorant : MajorantModel
    eta, delta : float, optional
        Override the problem's step slack and trust-region radius.
    xi : float, optional
        Defaults to ``max(eta beta(0) d(F(x0), C), 1e-15)``.
    alpha : float, optional
        Defaults to :func:`alpha_lower_bound`. For quasi-regular data the
        bound over ``[xi, r)`` is then tightened by re-evaluating it on
        ``[xi, t_star(alpha))`` until it stops decreasing.

    Returns
    -------
    Certificate
        Never raises for failed hypotheses; they are reported as checks
        that do not hold.
    """
    eta = problem.eta if eta is None else float(eta)
    delta = problem.delta if delta is None else float(delta)
    Fx0, J0 = problem.F.evaluate(problem.x0)
    d0 = distance_to_C(problem.h, Fx0)
    notes = ["infinity norms on domain and range"]
    pre_checks = []
    beta0 = count = None

    if isinstance(model, Robinson):
        theorem = "robinson"
        model, beta0, count, radius, pre_checks = _robinson_data(problem, model, majorant, J0, notes)
        beta_zero = beta0
    elif isinstance(model, RegularPoint):
        theorem, beta_zero, radius = "regular", model.beta, model.r
    elif isinstance(model, QuasiRegular):
        theorem, beta_zero, radius = "quasi-regular", model.beta(0.0), model.r
        notes.append(f"alpha supremum on a {ALPHA_GRID}-point grid plus breakpoints, inflated by {ALPHA_INFLATION}")
    else:
        raise TypeError(f"unsupported regularity model {type(model).__name__}")

    usable = model.beta0 is not None if isinstance(model, Robinson) else True
    probe_cap = min(radius, majorant.R) if usable else math.nan

    if xi is None:
        xi = max(eta * beta_zero * d0, XI_FLOOR) if np.isfinite(beta_zero) else math.nan
    xi = float(xi)

    def bound_at(probe):
        if not usable:
            return math.nan
        try:
            return alpha_lower_bound(model, majorant, xi, eta, probe)
        except DomainError:
            return math.nan

    if alpha is None:
        alpha = bound_at(probe_cap)
        if isinstance(model, QuasiRegular):
            alpha = _tighten_alpha(alpha, xi, majorant, bound_at)
    alpha = float(alpha)

    checks = list(pre_checks)
    checks.append(Check("d(F(x0),C)>0", d0 > 0, d0, 0.0))
    checks.append(Check("xi>0", xi > 0, xi, 0.0))
    checks.append(Check("alpha>0", alpha > 0, alpha, 0.0))
    checks.append(Check("eta>=1", eta >= 1, eta, 1.0))
    checks.append(Check("Delta>=xi", delta >= xi, delta, xi))
    rhs = eta * beta_zero * d0
    checks.append(Check("xi>=eta*beta(0)*d0", xi >= rhs, xi, rhs))

    t_star, h4, scalar = math.nan, False, None
    if xi > 0 and alpha > 0:
        aux = AuxiliaryFunction(xi, alpha, majorant)
        z = aux.zero
        lhs, rhs, _ = h3_condition(aux)
        checks.append(Check("h3", z.h3, lhs, rhs))
        if z.h3:
            t_star, h4 = z.t_star, z.h4
            scalar = scalar_sequence(aux, tol=0.0, max_iter=200)
            if z.later_sign_change and not isinstance(majorant, (Lipschitz, Smale)):
                notes.append("auxiliary function changes sign again beyond t_star")
    else:
        checks.append(Check("h3", False, math.nan, math.nan))

    if isinstance(model, QuasiRegular) and np.isfinite(t_star) and t_star > xi:
        bound = bound_at(min(t_star, model.r))
    else:
        bound = bound_at(probe_cap) if isinstance(model, QuasiRegular) else bound_at(None)
    checks.append(Check("alpha>=alpha_bound", bool(alpha >= bound), alpha, bound))
    checks.append(Check("t*<=radius", bool(t_star <= radius), t_star, radius))

    return Certificate(
        theorem=theorem,
        xi=xi,
        alpha=alpha,
        eta=eta,
        delta=delta,
        d0=d0,
        beta_at_zero=beta_zero,
        t_star=t_star,
        radius=radius,
        alpha_bound=bound,
        scalar=scalar,
        checks=tuple(checks),
        h4=h4,
        beta0=beta0,
        cube_vertices=count,
        notes=tuple(notes),
        majorant=majorant,
    )


def regularity_from_dict(doc: dict):
    kind = doc.get("kind")
    if kind == "quasi_regular":
        return QuasiRegular(float(doc["r"]), tuple(doc["breakpoints"]), tuple(doc["values"]))
    if kind == "regular":
        return RegularPoint(float(doc["r"]), float(doc["beta"]))
    if kind == "robinson":
        cone = doc.get("cone")
        vrep = doc.get("vrep")
        return Robinson(
            beta0=None if doc.get("beta0") is None else float(doc["beta0"]),
            cone=None if cone is None else np.array(cone["G"], dtype=float),
            vrep=None if vrep is None else (np.array(vrep["vertices"], dtype=float), np.array(vrep.get("rays", []), dtype=float)),
        )
    raise ValueError(f"unknown regularity kind {kind!r}")
