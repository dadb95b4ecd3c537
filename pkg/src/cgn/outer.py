"""
Polyhedral outer functions ``h : R^m -> R``.

Each outer function can write ``h(z0 + J d)`` as a small LP in the step
``d`` and a block of auxiliary variables ``u``::

    h(z0 + J d) = min { cost @ u : A_d d + A_u u <= rhs, u >= u_lb }

which is all the subproblem and distance routines need. The minimiser set
``C = {z : h(z) <= h_min}`` is never stored explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lp import make_lp, solve_lp

__all__ = ["OuterFunction", "MaxAffine", "L1Deviation", "LInfDeviation", "eval_h", "outer_from_dict"]

#: Sublevel tolerance defining membership in C.
SUBLEVEL_TOL = 1e-9


@dataclass(frozen=True)
class LinearBlocks:
    A_d: np.ndarray
    A_u: np.ndarray
    rhs: np.ndarray
    cost: np.ndarray
    u_lb: np.ndarray


class OuterFunction:
    """Common interface of the polyhedral outer functions."""

    m: int
    h_min: float

    def __call__(self, z):
        raise NotImplementedError

    def blocks(self, z0, J) -> LinearBlocks:
        raise NotImplementedError

    @property
    def cone_G(self):
        """H-representation ``G`` with ``C = {z : G z <= 0}`` when ``C`` is a cone, else None."""
        return None

    @property
    def is_cone_C(self):
        return self.cone_G is not None

    def in_C(self, z, tol=SUBLEVEL_TOL):
        return self(z) <= self.h_min + tol

    def _z(self, z):
        z = np.asarray(z, dtype=float).ravel()
        if z.size != self.m:
            raise ValueError(f"argument has {z.size} entries, outer function expects m={self.m}")
        return z


@dataclass(frozen=True, eq=False)
class MaxAffine(OuterFunction):
    """``h(z) = max_i (A[i] @ z + b[i])``; construction fails if ``h`` is unbounded below."""

    A: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        b = np.asarray(self.b, dtype=float).ravel()
        if A.shape[0] != b.size:
            raise ValueError("A and b must have the same number of rows")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        p, m = A.shape
        # min s  s.t.  A z + b <= s, z and s free
        lp = make_lp(
            np.r_[np.zeros(m), 1.0],
            A_ub=np.hstack([A, -np.ones((p, 1))]),
            b_ub=-b,
            lb=np.full(m + 1, -np.inf),
        )
        sol = solve_lp(lp)
        if not sol.optimal:
            raise ValueError(f"max-affine function has no finite minimum ({sol.status.value})")
        object.__setattr__(self, "h_min", float(sol.value))

    @property
    def m(self):
        return self.A.shape[1]

    def __call__(self, z):
        z = self._z(z)
        return float(np.max(self.A @ z + self.b))

    def blocks(self, z0, J):
        z0 = self._z(z0)
        p = self.A.shape[0]
        return LinearBlocks(self.A @ J, -np.ones((p, 1)), -(self.A @ z0 + self.b), np.ones(1), np.array([-np.inf]))

    @property
    def cone_G(self):
        if np.all(np.abs(self.b - self.h_min) <= 1e-12 * (1.0 + abs(self.h_min))):
            return self.A.copy()
        return None

    def scaled(self, lam):
        return MaxAffine(lam * self.A, lam * self.b)


@dataclass(frozen=True, eq=False)
class L1Deviation(OuterFunction):
    """``h(z) = ||z - c||_1``; ``C = {c}`` and ``h_min = 0``."""

    c: np.ndarray
    h_min: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "c", np.asarray(self.c, dtype=float).ravel())

    @property
    def m(self):
        return self.c.size

    def __call__(self, z):
        return float(np.abs(self._z(z) - self.c).sum())

    def blocks(self, z0, J):
        z0 = self._z(z0)
        m = self.m
        eye = np.eye(m)
        return LinearBlocks(
            np.vstack([J, -J]),
            np.vstack([-eye, -eye]),
            np.r_[self.c - z0, z0 - self.c],
            np.ones(m),
            np.zeros(m),
        )

    @property
    def cone_G(self):
        return _point_cone(self.c)


@dataclass(frozen=True, eq=False)
class LInfDeviation(OuterFunction):
    """``h(z) = ||z - c||_inf``; ``C = {c}`` and ``h_min = 0``."""

    c: np.ndarray
    h_min: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "c", np.asarray(self.c, dtype=float).ravel())

    @property
    def m(self):
        return self.c.size

    def __call__(self, z):
        return float(np.abs(self._z(z) - self.c).max(initial=0.0))

    def blocks(self, z0, J):
        z0 = self._z(z0)
        ones = np.ones((self.m, 1))
        return LinearBlocks(
            np.vstack([J, -J]),
            np.vstack([-ones, -ones]),
            np.r_[self.c - z0, z0 - self.c],
            np.ones(1),
            np.zeros(1),
        )

    @property
    def cone_G(self):
        return _point_cone(self.c)


def _point_cone(c):
    if np.any(c != 0):
        return None
    eye = np.eye(c.size)
    return np.vstack([eye, -eye])


def eval_h(h: OuterFunction, z) -> float:
    return h(z)


def outer_from_dict(doc: dict) -> OuterFunction:
    kind = doc.get("kind")
    if kind == "max_affine":
        return MaxAffine(np.array(doc["A"], dtype=float), np.array(doc["b"], dtype=float))
    if kind == "l1":
        return L1Deviation(np.array(doc["c"], dtype=float))
    if kind == "linf":
        return LInfDeviation(np.array(doc["c"], dtype=float))
    raise ValueError(f"unknown outer function kind {kind!r}")


def outer_to_dict(h: OuterFunction) -> dict:
    if isinstance(h, MaxAffine):
        return {"kind": "max_affine", "A": h.A.tolist(), "b": h.b.tolist()}
    if isinstance(h, L1Deviation):
        return {"kind": "l1", "c": h.c.tolist()}
    return {"kind": "linf", "c": h.c.tolist()}
