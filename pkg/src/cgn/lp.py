"""
Dense two-phase simplex for small linear programs.

Every subproblem, distance and convex-process computation in the package is
reduced to one or more calls to :func:`solve_lp`. The engine is a textbook
tableau simplex: phase one minimises the sum of artificial variables, phase
two the user objective. Pivoting uses Dantzig's rule until ``3 * (m + n)``
degenerate pivots have been taken in a phase, after which Bland's rule is
used for the rest of that phase, which guarantees termination.

Problems are stated as::

    minimize    c @ x
    subject to  A[i] @ x  (<=, ==, >=)  b[i]
                lb <= x <= ub

Target sizes are tens to a few hundred rows and columns.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import LPError

__all__ = ["LPStatus", "LinearProgram", "LpSolution", "make_lp", "solve_lp"]

_SENSES = ("<=", "==", ">=")

PIVOT_TOL = 1e-9
OPT_TOL = 1e-10
DEGENERATE_TOL = 1e-12


class LPStatus(str, enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True, eq=False)
class LinearProgram:
    """
    Dense linear program with row senses and variable bounds.

    Attributes
    ----------
    c : ndarray, shape (n,)
        Objective coefficients (minimised).
    A : ndarray, shape (m, n)
        Constraint matrix.
    b : ndarray, shape (m,)
        Right-hand side.
    senses : tuple of str
        One of ``"<="``, ``"=="``, ``">="`` per row.
    lb, ub : ndarray, shape (n,)
        Variable bounds; ``-inf`` / ``inf`` are allowed.
    """

    c: np.ndarray
    A: np.ndarray
    b: np.ndarray
    senses: tuple
    lb: np.ndarray
    ub: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float).ravel()
        n = c.size
        A = np.asarray(self.A, dtype=float)
        if A.size == 0:
            A = A.reshape(0, n)
        b = np.asarray(self.b, dtype=float).ravel()
        lb = np.asarray(self.lb, dtype=float).ravel()
        ub = np.asarray(self.ub, dtype=float).ravel()
        senses = tuple(self.senses)
        if A.ndim != 2 or A.shape[1] != n:
            raise ValueError(f"A has shape {A.shape}, expected (m, {n})")
        if b.size != A.shape[0] or len(senses) != A.shape[0]:
            raise ValueError("b and senses must have one entry per row of A")
        if lb.size != n or ub.size != n:
            raise ValueError("lb and ub must have one entry per variable")
        if any(s not in _SENSES for s in senses):
            raise ValueError(f"row senses must be in {_SENSES}")
        if not (np.all(np.isfinite(c)) and np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
            raise ValueError("LP data must be finite")
        if np.any(np.isnan(lb)) or np.any(np.isnan(ub)) or np.any(lb == np.inf) or np.any(ub == -np.inf):
            raise ValueError("invalid variable bounds")
        for name, val in (("c", c), ("A", A), ("b", b), ("senses", senses), ("lb", lb), ("ub", ub)):
            object.__setattr__(self, name, val)

    @property
    def n(self):
        return self.c.size

    @property
    def m(self):
        return self.A.shape[0]


@dataclass(frozen=True, eq=False)
class LpSolution:
    """
    Result of :func:`solve_lp`.

    ``dual`` holds one multiplier per original row with the sign convention
    that ``c - A.T @ dual`` is the vector of reduced costs on the original
    variables. ``dual_value`` is the dual objective including bound terms;
    it equals ``value`` at an optimum.
    """

    status: LPStatus
    x: np.ndarray
    value: float
    dual: np.ndarray
    dual_value: float
    primal_residual: float
    cs_residual: float
    iterations: int

    @property
    def optimal(self):
        return self.status is LPStatus.OPTIMAL


def make_lp(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, A_ge=None, b_ge=None, lb=None, ub=None):
    """Assemble a :class:`LinearProgram` from per-sense blocks (``lb`` defaults to 0)."""
    c = np.asarray(c, dtype=float).ravel()
    n = c.size
    blocks, rhs, senses = [], [], []
    for A_blk, b_blk, sense in ((A_ub, b_ub, "<="), (A_eq, b_eq, "=="), (A_ge, b_ge, ">=")):
        if A_blk is None:
            continue
        A_blk = np.atleast_2d(np.asarray(A_blk, dtype=float))
        if A_blk.size == 0:
            continue
        blocks.append(A_blk.reshape(-1, n))
        rhs.append(np.asarray(b_blk, dtype=float).ravel())
        senses.extend([sense] * A_blk.shape[0])
    A = np.vstack(blocks) if blocks else np.zeros((0, n))
    b = np.concatenate(rhs) if rhs else np.zeros(0)
    lb = np.zeros(n) if lb is None else np.broadcast_to(np.asarray(lb, dtype=float), (n,))
    ub = np.full(n, np.inf) if ub is None else np.broadcast_to(np.asarray(ub, dtype=float), (n,))
    return LinearProgram(c, A, b, tuple(senses), lb, ub)


class _StandardForm:
    """``min c_std @ y  s.t.  A_std y = b_std, y >= 0`` with ``x = shift + M y[:n_struct]``."""

    def __init__(self, lp: LinearProgram):
        n = lp.n
        cols = []  # (original var, coefficient)
        shift = np.zeros(n)
        bound_rows = []  # (structural column, rhs)
        for j in range(n):
            lo, hi = lp.lb[j], lp.ub[j]
            if np.isfinite(lo):
                shift[j] = lo
                cols.append((j, 1.0))
                if np.isfinite(hi):
                    bound_rows.append((len(cols) - 1, hi - lo))
            elif np.isfinite(hi):
                shift[j] = hi
                cols.append((j, -1.0))
            else:
                cols.append((j, 1.0))
                cols.append((j, -1.0))
        n_struct = len(cols)
        M = np.zeros((n, n_struct))
        for k, (j, s) in enumerate(cols):
            M[j, k] = s

        m0 = lp.m
        m = m0 + len(bound_rows)
        A_rows = np.zeros((m, n_struct))
        A_rows[:m0] = lp.A @ M
        b_rows = np.empty(m)
        b_rows[:m0] = lp.b - lp.A @ shift
        senses = list(lp.senses)
        for i, (k, rhs) in enumerate(bound_rows):
            A_rows[m0 + i, k] = 1.0
            b_rows[m0 + i] = rhs
            senses.append("<=")

        slack_rows = [i for i, s in enumerate(senses) if s != "=="]
        n_slack = len(slack_rows)
        A_std = np.zeros((m, n_struct + n_slack))
        A_std[:, :n_struct] = A_rows
        slack_col = {}
        for k, i in enumerate(slack_rows):
            A_std[i, n_struct + k] = 1.0 if senses[i] == "<=" else -1.0
            slack_col[i] = n_struct + k

        flip = np.where(b_rows < 0, -1.0, 1.0)
        A_std *= flip[:, None]
        b_std = b_rows * flip

        self.n_struct = n_struct
        self.M = M
        self.shift = shift
        self.A = A_std
        self.b = b_std
        self.flip = flip
        self.m_orig = m0
        self.c = np.zeros(A_std.shape[1])
        self.c[:n_struct] = M.T @ lp.c
        self.offset = float(lp.c @ shift)
        # rows whose slack enters with +1 can start basic without an artificial
        self.start_basic = {i: col for i, col in slack_col.items() if A_std[i, col] > 0}


class _Tableau:
    def __init__(self, A, b, cost, basis, max_iter, bland_after):
        m, N = A.shape
        self.T = np.zeros((m + 1, N + 1))
        self.T[:m, :N] = A
        self.T[:m, N] = b
        self.basis = list(basis)
        self.max_iter = max_iter
        self.bland_after = bland_after
        self.iterations = 0
        self.set_cost(cost)

    @property
    def m(self):
        return self.T.shape[0] - 1

    def set_cost(self, cost):
        m = self.m
        cB = cost[self.basis]
        self.T[m, :-1] = cost - cB @ self.T[:m, :-1]
        self.T[m, -1] = -cB @ self.T[:m, -1]

    def pivot(self, r, j):
        T = self.T
        T[r] /= T[r, j]
        col = T[:, j].copy()
        col[r] = 0.0
        T -= np.outer(col, T[r])
        T[:, j] = 0.0
        T[r, j] = 1.0
        self.basis[r] = j

    def run(self, allowed):
        """Pivot to optimality over the columns flagged in ``allowed``; return False if unbounded."""
        m = self.m
        degenerate = 0
        bland = self.bland_after is not None and self.bland_after <= 0
        while True:
            rc = self.T[m, :-1]
            candidates = np.flatnonzero(allowed & (rc < -OPT_TOL))
            if candidates.size == 0:
                return True
            if self.iterations >= self.max_iter:
                raise LPError(f"simplex exceeded {self.max_iter} pivots")
            if bland:
                j = int(candidates[0])
            else:
                j = int(candidates[np.argmin(rc[candidates])])
            col = self.T[:m, j]
            rows = np.flatnonzero(col > PIVOT_TOL)
            if rows.size == 0:
                return False
            ratios = self.T[rows, -1] / col[rows]
            best = ratios.min()
            ties = rows[ratios <= best + DEGENERATE_TOL * (1.0 + abs(best))]
            if bland:
                r = int(min(ties, key=lambda i: self.basis[i]))
            else:
                r = int(ties[0])
            if best <= DEGENERATE_TOL:
                degenerate += 1
                if self.bland_after is not None and degenerate >= self.bland_after:
                    bland = True
            self.pivot(r, j)
            self.iterations += 1


def solve_lp(lp: LinearProgram, max_iter=None, bland_after="auto") -> LpSolution:
    """
    Solve a linear program with the two-phase simplex method.

    Parameters
    ----------
    lp : LinearProgram
        Problem data.
    max_iter : int, optional
        Pivot limit per call; defaults to a generous multiple of the size.
    bland_after : int, "auto" or None
        Number of degenerate pivots after which Bland's rule takes over.
        ``"auto"`` means ``3 * (m + n)``; ``None`` disables the fallback
        (only useful for demonstrating cycling).

    Returns
    -------
    LpSolution
        Status, primal point, objective, duals and residuals. The solution
        is deterministic for fixed input.
    """
    sf = _StandardForm(lp)
    m, N = sf.A.shape
    if bland_after == "auto":
        bland_after = 3 * (m + N)
    if max_iter is None:
        max_iter = 50 * (m + N) + 1000

    art_rows = [i for i in range(m) if i not in sf.start_basic]
    n_art = len(art_rows)
    A1 = np.zeros((m, N + n_art))
    A1[:, :N] = sf.A
    basis = [0] * m
    for i, col in sf.start_basic.items():
        basis[i] = col
    for k, i in enumerate(art_rows):
        A1[i, N + k] = 1.0
        basis[i] = N + k
    cost1 = np.zeros(N + n_art)
    cost1[N:] = 1.0

    tab = _Tableau(A1, sf.b, cost1, basis, max_iter, bland_after)
    feas_tol = 1e-9 * (1.0 + (np.abs(sf.b).max() if m else 0.0))
    if n_art:
        tab.run(np.ones(N + n_art, dtype=bool))
        if -tab.T[m, -1] > feas_tol:
            return _failure(lp, LPStatus.INFEASIBLE, tab.iterations)
        # drive remaining artificials out of the basis, dropping redundant rows
        keep = []
        for r in range(m):
            if tab.basis[r] < N:
                keep.append(r)
                continue
            row = np.abs(tab.T[r, :N])
            j = int(np.argmax(row)) if N else -1
            if N and row[j] > PIVOT_TOL:
                tab.pivot(r, j)
                keep.append(r)
        if len(keep) < m:
            tab.T = tab.T[keep + [m]]
            tab.basis = [tab.basis[r] for r in keep]
        rows_kept = keep
        tab.T = np.delete(tab.T, np.s_[N:N + n_art], axis=1)
    else:
        rows_kept = list(range(m))

    tab.set_cost(sf.c)
    if not tab.run(np.ones(N, dtype=bool)):
        return _failure(lp, LPStatus.UNBOUNDED, tab.iterations)

    basis = tab.basis
    A_k = sf.A[rows_kept]
    b_k = sf.b[rows_kept]
    y_std = np.zeros(N)
    if basis:
        B = A_k[:, basis]
        try:
            xB = np.linalg.solve(B, b_k)
            w = np.linalg.solve(B.T, sf.c[basis])
        except np.linalg.LinAlgError:
            xB = tab.T[:-1, -1]
            w = np.linalg.lstsq(B.T, sf.c[basis], rcond=None)[0]
        y_std[basis] = np.maximum(xB, 0.0)
    else:
        w = np.zeros(0)
    rc = sf.c - A_k.T @ w
    x = sf.shift + sf.M @ y_std[: sf.n_struct]
    value = float(lp.c @ x)

    w_full = np.zeros(m)
    w_full[rows_kept] = w
    w_full *= sf.flip
    dual = w_full[: sf.m_orig]
    dual_value = float(sf.offset + (w_full * (sf.b * sf.flip)).sum())

    return LpSolution(
        status=LPStatus.OPTIMAL,
        x=x,
        value=value,
        dual=dual,
        dual_value=dual_value,
        primal_residual=primal_residual(lp, x),
        cs_residual=float(np.abs(y_std * rc).max()) if N else 0.0,
        iterations=tab.iterations,
    )


def primal_residual(lp: LinearProgram, x) -> float:
    """Largest violation of any row or bound of ``lp`` at ``x``."""
    x = np.asarray(x, dtype=float)
    viol = [0.0]
    if lp.m:
        r = lp.A @ x - lp.b
        s = np.array(lp.senses)
        viol.append(np.max(np.where(s == "<=", r, np.where(s == ">=", -r, np.abs(r)))))
    viol.append(np.max(lp.lb - x, initial=0.0))
    viol.append(np.max(x - lp.ub, initial=0.0))
    return float(max(viol))


def _failure(lp, status, iterations):
    nan = np.full(lp.n, np.nan)
    value = np.inf if status is LPStatus.INFEASIBLE else -np.inf
    return LpSolution(status, nan, value, np.full(lp.m, np.nan), np.nan, np.inf, np.inf, iterations)
