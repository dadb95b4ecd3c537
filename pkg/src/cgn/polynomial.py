"""Polynomial maps ``F : R^n -> R^m`` with exact Jacobians."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["PolynomialMap", "eval_F"]


@dataclass(frozen=True, eq=False)
class PolynomialMap:
    """
    Sum-of-monomials map.

    Parameters
    ----------
    n, m : int
        Input and output dimensions.
    components : sequence of sequences of (coef, exponents)
        ``components[i]`` lists the terms of ``F_i``; each term is a
        coefficient and an ``n``-tuple of non-negative integer exponents.

    Examples
    --------
    >>> F = PolynomialMap(1, 1, [[(1.0, (2,)), (-2.0, (0,))]])   # x**2 - 2
    >>> F(np.array([1.5]))
    array([0.25])
    """

    n: int
    m: int
    components: tuple

    def __post_init__(self):
        if len(self.components) != self.m:
            raise ValueError(f"expected {self.m} components, got {len(self.components)}")
        coefs, exps, rows = [], [], []
        comps = []
        for i, terms in enumerate(self.components):
            clean = []
            for coef, e in terms:
                e = tuple(int(v) for v in e)
                if len(e) != self.n:
                    raise ValueError(f"exponent {e} does not have length n={self.n}")
                if any(v < 0 for v in e):
                    raise ValueError(f"negative exponent in {e}")
                clean.append((float(coef), e))
                coefs.append(float(coef))
                exps.append(e)
                rows.append(i)
            comps.append(tuple(clean))
        object.__setattr__(self, "components", tuple(comps))
        object.__setattr__(self, "_coef", np.array(coefs, dtype=float))
        object.__setattr__(self, "_exp", np.array(exps, dtype=int).reshape(-1, self.n))
        object.__setattr__(self, "_row", np.array(rows, dtype=int))

    def _check(self, x):
        x = np.asarray(x, dtype=float).ravel()
        if x.size != self.n:
            raise ValueError(f"point has {x.size} entries, map expects n={self.n}")
        return x

    def __call__(self, x):
        x = self._check(x)
        mono = np.prod(x ** self._exp, axis=1)
        return np.bincount(self._row, weights=self._coef * mono, minlength=self.m)[: self.m]

    def jacobian(self, x):
        x = self._check(x)
        J = np.zeros((self.m, self.n))
        for j in range(self.n):
            ej = self._exp[:, j]
            live = ej > 0
            if not live.any():
                continue
            e = self._exp[live].copy()
            e[:, j] -= 1
            dmono = ej[live] * np.prod(x ** e, axis=1)
            J[:, j] = np.bincount(self._row[live], weights=self._coef[live] * dmono, minlength=self.m)[: self.m]
        return J

    def evaluate(self, x):
        return self(x), self.jacobian(x)

    def to_dict(self):
        return {
            "n": self.n,
            "m": self.m,
            "components": [[[c, list(e)] for c, e in terms] for terms in self.components],
        }

    @classmethod
    def from_dict(cls, doc):
        return cls(int(doc["n"]), int(doc["m"]), [[(c, e) for c, e in terms] for terms in doc["components"]])

    @classmethod
    def zero(cls, n, m):
        return cls(n, m, [[] for _ in range(m)])


def eval_F(F: PolynomialMap, x):
    """Return ``(F(x), F'(x))``."""
    return F.evaluate(x)
