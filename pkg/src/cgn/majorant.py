"""
Majorant functions and the scalar Newton machinery built on them.

A majorant model houses a scalar function ``f`` on ``[0, R)`` with
``f(0) = 0``, ``f'(0) = -1`` and ``f'`` convex, strictly increasing. From a
model and two positive constants ``xi``, ``alpha`` the auxiliary function

    f_{xi,alpha}(t) = xi + (alpha - 1) t + alpha f(t)

is formed. Its smallest zero ``t_star`` and the Newton sequence started at
zero drive every convergence certificate in :mod:`cgn.regularity`.

Three model kinds exist: :class:`Lipschitz` (``f(t) = K t^2/2 - t``),
:class:`Smale` (``f(t) = t/(1 - gamma t) - 2t``) and :class:`Custom`, built
from a named entry of :data:`CUSTOM_CATALOG`. Every function here accepts
floats or numpy arrays for ``t``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional

import numpy as np

from .errors import DomainError

__all__ = [
    "MajorantModel",
    "Lipschitz",
    "Smale",
    "Custom",
    "CUSTOM_CATALOG",
    "custom_from_catalog",
    "AuxiliaryFunction",
    "ZeroInfo",
    "ScalarTrace",
    "eval_aux",
    "smallest_zero",
    "newton_map",
    "scalar_sequence",
    "rate_constants",
    "h3_condition",
    "majorant_from_dict",
    "majorant_to_dict",
]

ZERO_TOL = 1e-12
GRID_SIZE = 1000
H2_GRID = 64
NOISE_ULPS = 4


def _check_domain(t, R):
    arr = np.asarray(t)
    if np.any(arr < 0) or np.any(arr >= R) or np.any(np.isnan(arr)):
        raise DomainError(f"t={t!r} outside majorant domain [0, {R})")


class MajorantModel:
    """Base class; subclasses provide ``R`` and the raw ``_f``, ``_fp``, ``_fpp``."""

    R: float

    def f(self, t):
        _check_domain(t, self.R)
        return self._f(t)

    def fp(self, t):
        _check_domain(t, self.R)
        return self._fp(t)

    def fpp(self, t):
        _check_domain(t, self.R)
        return self._fpp(t)

    def _validate(self):
        if not self.R > 0:
            raise ValueError("majorant radius R must be positive")
        f0, fp0 = float(self._f(0.0)), float(self._fp(0.0))
        if abs(f0) > ZERO_TOL or abs(fp0 + 1.0) > ZERO_TOL:
            raise ValueError(f"not a majorant: f(0)={f0}, f'(0)={fp0} (need 0 and -1)")
        grid = np.linspace(0.0, self.R, H2_GRID, endpoint=False) if np.isfinite(self.R) else np.linspace(0.0, 1e3, H2_GRID)
        if not np.all(np.diff(self._fp(grid)) > 0):
            raise ValueError("not a majorant: f' is not strictly increasing on the sample grid")


@dataclass(frozen=True)
class Lipschitz(MajorantModel):
    """Majorant ``f(t) = K t^2 / 2 - t`` of a map whose Jacobian is ``K``-Lipschitz on ``B(x0, R)``."""

    K: float
    R: float = math.inf

    def __post_init__(self):
        if not self.K > 0:
            raise ValueError("Lipschitz constant K must be positive")
        self._validate()

    def _f(self, t):
        return 0.5 * self.K * t * t - t

    def _fp(self, t):
        return self.K * t - 1.0

    def _fpp(self, t):
        return self.K + 0.0 * t


@dataclass(frozen=True)
class Smale(MajorantModel):
    """Majorant ``f(t) = t / (1 - gamma t) - 2t`` on ``[0, 1/gamma)`` for analytic maps."""

    gamma: float

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError("gamma must be positive")
        self._validate()

    @property
    def R(self):
        return 1.0 / self.gamma

    def _f(self, t):
        return t / (1.0 - self.gamma * t) - 2.0 * t

    def _fp(self, t):
        return 1.0 / (1.0 - self.gamma * t) ** 2 - 2.0

    def _fpp(self, t):
        return 2.0 * self.gamma / (1.0 - self.gamma * t) ** 3


@dataclass(frozen=True, eq=False)
class Custom(MajorantModel):
    """User-supplied majorant given by ``f`` and its first two derivatives on ``[0, R)``."""

    f_: Callable
    fp_: Callable
    fpp_: Callable
    R: float
    name: str = "custom"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        self._validate()

    def _f(self, t):
        return self.f_(t)

    def _fp(self, t):
        return self.fp_(t)

    def _fpp(self, t):
        return self.fpp_(t)


def _quadratic(K=1.0):
    return (lambda t: 0.5 * K * t * t - t, lambda t: K * t - 1.0, lambda t: K + 0.0 * t)


def _smale(gamma=1.0):
    return (
        lambda t: t / (1.0 - gamma * t) - 2.0 * t,
        lambda t: 1.0 / (1.0 - gamma * t) ** 2 - 2.0,
        lambda t: 2.0 * gamma / (1.0 - gamma * t) ** 3,
    )


def _exponential(L=1.0):
    return (
        lambda t: np.expm1(L * t) / L - 2.0 * t,
        lambda t: np.exp(L * t) - 2.0,
        lambda t: L * np.exp(L * t),
    )


def _cubic(K=1.0):
    return (lambda t: K * t**3 / 6.0 - t, lambda t: 0.5 * K * t * t - 1.0, lambda t: K * t)


#: Named majorant families available to :class:`Custom` (no expression parser).
CUSTOM_CATALOG = {
    "quadratic": _quadratic,
    "smale": _smale,
    "exponential": _exponential,
    "cubic": _cubic,
}


def custom_from_catalog(name, R, **params) -> Custom:
    try:
        factory = CUSTOM_CATALOG[name]
    except KeyError:
        raise ValueError(f"unknown custom majorant {name!r}; known: {sorted(CUSTOM_CATALOG)}") from None
    f, fp, fpp = factory(**params)
    return Custom(f, fp, fpp, float(R), name=name, params=dict(params))


@dataclass(frozen=True)
class ZeroInfo:
    """Smallest zero of an auxiliary function and the h3/h4 verdicts."""

    t_star: float
    h3: bool
    h4: bool
    later_sign_change: bool = False


@dataclass(frozen=True, eq=False)
class AuxiliaryFunction:
    """``f_{xi,alpha}(t) = xi + (alpha - 1) t + alpha f(t)`` for a majorant model ``f``."""

    xi: float
    alpha: float
    model: MajorantModel

    def __post_init__(self):
        if not (self.xi > 0 and self.alpha > 0):
            raise ValueError("xi and alpha must be positive")

    @property
    def R(self):
        return self.model.R

    def value(self, t):
        return self.xi + (self.alpha - 1.0) * t + self.alpha * self.model.f(t)

    def deriv(self, t):
        return (self.alpha - 1.0) + self.alpha * self.model.fp(t)

    def deriv2(self, t):
        return self.alpha * self.model.fpp(t)

    @cached_property
    def zero(self) -> ZeroInfo:
        return _find_zero(self)


def eval_aux(a: AuxiliaryFunction, t):
    """Return ``(f_{xi,alpha}(t), f'_{xi,alpha}(t))``; raises :class:`DomainError` off ``[0, R)``."""
    return a.value(t), a.deriv(t)


def h3_condition(a: AuxiliaryFunction):
    """
    The inequality that decides h3, as ``(lhs, rhs, holds)``.

    Closed-form models report their discriminant condition
    (``2 alpha K xi <= 1`` or ``xi gamma <= 1 + 2 alpha - 2 sqrt(alpha (1+alpha))``);
    custom models report ``t_star < R``. The verdict is that of
    :func:`smallest_zero`, so a Lipschitz model with finite ``R`` also
    needs its root below ``R``.
    """
    m = a.model
    if isinstance(m, Lipschitz):
        lhs, rhs = 2.0 * a.alpha * m.K * a.xi, 1.0
    elif isinstance(m, Smale):
        lhs = a.xi * m.gamma
        rhs = 1.0 + 2.0 * a.alpha - 2.0 * math.sqrt(a.alpha * (1.0 + a.alpha))
    else:
        z = a.zero
        return (z.t_star, m.R, z.h3)
    return (lhs, rhs, a.zero.h3)


def smallest_zero(a: AuxiliaryFunction) -> ZeroInfo:
    """
    Smallest zero of ``a`` in ``(0, R)`` with the h3 and h4 flags.

    Lipschitz and Smale models use closed forms and decide h4 by strict
    inequality in the discriminant condition. Custom models are bracketed by
    step doubling from ``xi`` and refined by bisection then Newton. When no
    zero exists, ``h3`` is False and ``t_star`` is NaN.
    """
    return a.zero


def _find_zero(a: AuxiliaryFunction) -> ZeroInfo:
    m = a.model
    xi, al = a.xi, a.alpha
    if isinstance(m, Lipschitz):
        disc = 1.0 - 2.0 * al * m.K * xi
        if disc < 0:
            return ZeroInfo(math.nan, False, False)
        # 2 xi / (1 + sqrt(disc)) equals (1 - sqrt(disc)) / (alpha K) without the cancellation
        t = 2.0 * xi / (1.0 + math.sqrt(disc))
        if not t < m.R:
            return ZeroInfo(t, False, False)
        return ZeroInfo(t, True, disc > 0, later_sign_change=disc > 0 and (1.0 + math.sqrt(disc)) / (al * m.K) < m.R)
    if isinstance(m, Smale):
        g = m.gamma
        bound = 1.0 + 2.0 * al - 2.0 * math.sqrt(al * (1.0 + al))
        if xi * g > bound:
            return ZeroInfo(math.nan, False, False)
        disc = max((1.0 + g * xi) ** 2 - 4.0 * (1.0 + al) * g * xi, 0.0)
        t = 2.0 * xi / (1.0 + g * xi + math.sqrt(disc))
        return ZeroInfo(t, True, xi * g < bound, later_sign_change=xi * g < bound)
    return _bracket_zero(a)


def _bracket_zero(a: AuxiliaryFunction) -> ZeroInfo:
    R = a.R
    tol = ZERO_TOL * max(1.0, a.xi)
    top = R * (1.0 - 1e-15) if np.isfinite(R) else math.inf
    lo, step = 0.0, a.xi
    bracket = None
    for _ in range(2048):
        hi = min(lo + step, top)
        fh, dh = float(a.value(hi)), float(a.deriv(hi))
        if fh <= 0:
            bracket = (lo, hi)
            break
        if dh >= 0:
            # the minimiser lies in [lo, hi]; f stays positive beyond it
            tm = _argmin_in(a, lo, hi)
            fm = float(a.value(tm))
            if fm <= tol:
                if fm <= 0:
                    bracket = (lo, tm)
                    break
                return ZeroInfo(tm, True, False)
            return ZeroInfo(math.nan, False, False)
        if hi >= top:
            return ZeroInfo(math.nan, False, False)
        lo, step = hi, 2.0 * step
    else:
        return ZeroInfo(math.nan, False, False)

    lo, hi = bracket
    while hi - lo > 1e-13:
        mid = 0.5 * (lo + hi)
        if float(a.value(mid)) > 0:
            lo = mid
        else:
            hi = mid
    t = hi
    for _ in range(3):
        d = float(a.deriv(t))
        if d >= 0:
            break
        nxt = t - float(a.value(t)) / d
        if not (lo <= nxt <= hi) or nxt == t:
            break
        t = nxt
    # f is convex, so f'(t*) < 0 exactly when its minimum value is negative;
    # deciding h4 from the minimum avoids misreading a tangent double root
    if np.isfinite(top):
        right = top if float(a.deriv(top)) > 0 else None
    else:
        right = _right_of_min(a, t)
    if right is not None:
        tm = _argmin_in(a, t, right)
        if float(a.value(tm)) > -tol:
            return ZeroInfo(tm, True, False)
    return ZeroInfo(t, True, True, later_sign_change=_positive_later(a, t, top))


def _right_of_min(a, t):
    step = max(t, 1.0)
    while float(a.deriv(t + step)) < 0:
        step *= 2.0
    return t + step


def _argmin_in(a, lo, hi):
    # bisection on the sign of the (increasing) derivative
    for _ in range(200):
        if hi - lo <= 1e-15 * max(1.0, hi):
            break
        mid = 0.5 * (lo + hi)
        if float(a.deriv(mid)) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _positive_later(a, t_star, top):
    if not np.isfinite(top):
        top = t_star + 1e6 * max(1.0, t_star)
    grid = np.linspace(t_star, top, 257)[1:]
    return bool(np.any(np.asarray(a.value(grid)) > 0))


def newton_map(a: AuxiliaryFunction, t):
    """
    Newton step ``t - f_{xi,alpha}(t) / f'_{xi,alpha}(t)`` on ``[0, t_star)``.

    Raises
    ------
    DomainError
        If h3 fails or ``t`` is not in ``[0, t_star)``.
    """
    z = a.zero
    if not z.h3:
        raise DomainError("auxiliary function has no zero (h3 fails)")
    arr = np.asarray(t)
    if np.any(arr < 0) or np.any(arr >= z.t_star):
        raise DomainError(f"newton_map needs 0 <= t < t_star={z.t_star}")
    return t - a.value(t) / a.deriv(t)


@dataclass(frozen=True)
class ScalarTrace:
    """Newton sequence ``t_0 = 0, t_{k+1} = n(t_k)`` together with its limit."""

    t: tuple
    t_star: float
    h3_holds: bool
    h4_holds: bool
    q_quadratic_constant: Optional[float]

    def errors(self):
        """``t_star - t_k`` for every recorded ``k``."""
        return [self.t_star - tk for tk in self.t]

    def ratios(self):
        err = self.errors()
        return [err[k + 1] / err[k] if err[k] > 0 else math.nan for k in range(len(err) - 1)]


def scalar_sequence(a: AuxiliaryFunction, tol=1e-12, max_iter=100) -> ScalarTrace:
    """
    Newton iterates for ``f_{xi,alpha}`` from ``t_0 = 0``.

    Iteration stops when ``t_star - t_k <= tol``, after ``max_iter`` steps,
    once ``t_star - t_k`` is down to a few rounding units of ``t_star``,
    or when the next iterate would not stay strictly between ``t_k`` and
    ``t_star`` in floating point.
    """
    z = a.zero
    if not z.h3:
        raise DomainError("scalar sequence needs h3 (a smallest zero of the auxiliary function)")
    ts = [0.0]
    t = 0.0
    for _ in range(max_iter):
        if z.t_star - t <= max(tol, NOISE_ULPS * np.finfo(float).eps * z.t_star):
            break
        nxt = float(newton_map(a, t))
        if not (t < nxt < z.t_star):
            break
        ts.append(nxt)
        t = nxt
    return ScalarTrace(tuple(ts), z.t_star, True, z.h4, rate_constants(a, z.t_star))


def rate_constants(a: AuxiliaryFunction, t_star) -> Optional[float]:
    """Q-quadratic constant ``f''(t*) / (-2 f'(t*))`` of the auxiliary function, or None without h4."""
    z = a.zero
    if not z.h4:
        return None
    return float(a.deriv2(t_star) / (-2.0 * a.deriv(t_star)))


def majorant_from_dict(doc: dict) -> MajorantModel:
    """Build a model from ``{"kind": "lipschitz" | "smale" | "custom", ...}``."""
    kind = doc.get("kind")
    if kind == "lipschitz":
        return Lipschitz(float(doc["K"]), float(doc.get("R", math.inf)))
    if kind == "smale":
        return Smale(float(doc["gamma"]))
    if kind == "custom":
        return custom_from_catalog(doc["name"], doc["R"], **doc.get("params", {}))
    raise ValueError(f"unknown majorant kind {kind!r}")


def majorant_to_dict(model: MajorantModel) -> dict:
    if isinstance(model, Lipschitz):
        return {"kind": "lipschitz", "K": model.K, "R": model.R if np.isfinite(model.R) else "inf"}
    if isinstance(model, Smale):
        return {"kind": "smale", "gamma": model.gamma}
    return {"kind": "custom", "name": model.name, "params": dict(model.params), "R": model.R}
