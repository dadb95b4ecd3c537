"""The composite problem ``min h(F(x))`` and its algorithm parameters."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .outer import OuterFunction
from .polynomial import PolynomialMap

__all__ = ["CompositeProblem"]


@dataclass(frozen=True, eq=False)
class CompositeProblem:
    """
    Problem data for the Gauss-Newton iteration.

    Attributes
    ----------
    F : PolynomialMap
        Inner smooth map ``R^n -> R^m``.
    h : OuterFunction
        Polyhedral outer function on ``R^m``.
    x0 : ndarray
        Starting point.
    delta : float
        Trust-region radius in the infinity norm (``inf`` allowed).
    eta : float
        Step-selection slack, ``eta >= 1``.
    tol_step, tol_feas : float
        Stop when the minimal step norm drops below ``tol_step`` or when
        ``h(F(x)) <= h_min + tol_feas``.
    """

    F: PolynomialMap
    h: OuterFunction
    x0: np.ndarray
    delta: float = math.inf
    eta: float = 1.0
    tol_step: float = 1e-12
    tol_feas: float = 1e-9

    def __post_init__(self):
        x0 = np.asarray(self.x0, dtype=float).ravel()
        object.__setattr__(self, "x0", x0)
        if x0.size != self.F.n:
            raise ValueError(f"x0 has {x0.size} entries, F expects n={self.F.n}")
        if self.h.m != self.F.m:
            raise ValueError(f"outer function acts on R^{self.h.m}, F maps into R^{self.F.m}")
        if not self.delta > 0:
            raise ValueError("delta must be positive")
        if not self.eta >= 1:
            raise ValueError("eta must be at least 1")
        if not (self.tol_step > 0 and self.tol_feas > 0):
            raise ValueError("tolerances must be positive")

    @property
    def n(self):
        return self.F.n

    @property
    def m(self):
        return self.F.m
