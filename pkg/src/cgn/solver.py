"""
Gauss-Newton iteration for ``min h(F(x))`` and a posteriori checks.

The driver takes ``x_{k+1} = x_k + d_k`` with ``d_k`` from
:func:`~cgn.subproblem.solve_subproblem` until the current point is
feasible (``h(F(x_k)) <= h_min + tol_feas``), the minimal step is below
``tol_step``, the subproblem fails, or ``max_iter`` steps were taken.

:func:`verify_majorization` compares a finished run with the scalar
majorizing sequence of a :class:`~cgn.regularity.Certificate`.
"""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DomainError, SubproblemError
from .majorant import AuxiliaryFunction, newton_map
from .polynomial import PolynomialMap, eval_F
from .problem import CompositeProblem
from .subproblem import StepRule, solve_subproblem

__all__ = [
    "CompositeProblem",
    "PolynomialMap",
    "eval_F",
    "Termination",
    "RunReport",
    "MajorizationCheck",
    "run",
    "verify_majorization",
    "majorizing_sequence",
    "sample_lipschitz_constant",
    "trace_csv",
]

BD_SLACK = 1e-9


class Termination(str, enum.Enum):
    STEP_ZERO = "StepZero"
    FEASIBLE = "Feasible"
    MAX_ITER = "MaxIter"
    SUBPROBLEM_ERROR = "SubproblemError"


@dataclass(frozen=True, eq=False)
class RunReport:
    """
    Record of one run.

    ``x`` holds every iterate including ``x0``; ``d[k]`` is the step with
    ``x[k+1] = x[k] + d[k]``. ``dist``, ``subproblem_value`` and ``in_C``
    have one entry per solved subproblem, which is one more than
    ``len(d)`` when the run ended with StepZero. ``hF[k]`` is
    ``h(F(x[k]))``.
    """

    problem: CompositeProblem
    x: tuple
    d: tuple
    dist: tuple
    subproblem_value: tuple
    in_C: tuple
    hF: tuple
    termination: Termination
    message: str = ""
    rule: StepRule = StepRule.MIN_NORM

    @property
    def iterations(self):
        return len(self.d)

    @property
    def x_final(self):
        return self.x[-1]

    @property
    def converged(self):
        return self.termination in (Termination.FEASIBLE, Termination.STEP_ZERO)

    def step_norms(self):
        return np.array([np.abs(dk).max(initial=0.0) for dk in self.d])

    def step_ratios(self):
        """``||d_{k+1}|| / ||d_k||`` for consecutive steps (nan after a zero step)."""
        s = self.step_norms()
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(s[:-1] > 0, s[1:] / np.where(s[:-1] > 0, s[:-1], 1.0), np.nan)

    def summary(self):
        lines = [
            f"termination: {self.termination.value}",
            f"iterations: {self.iterations}",
            "x_final: " + " ".join(f"{v:.16g}" for v in self.x_final),
            f"h(F(x_final)) - h_min: {self.hF[-1] - self.problem.h.h_min:.3e}",
        ]
        if self.message:
            lines.append(self.message)
        return "\n".join(lines)


def _plateau_message(hF, dist):
    tail_h = np.asarray(hF[-5:])
    tail_d = np.asarray(dist[-5:])
    return (
        "plateau: last h(F(x_k)) in [{:.6g}, {:.6g}], last dist in [{:.6g}, {:.6g}]".format(
            tail_h.min(), tail_h.max(), tail_d.min(), tail_d.max()
        )
    )


def run(problem: CompositeProblem, max_iter=100, rule=StepRule.MIN_NORM) -> RunReport:
    """
    Run the Gauss-Newton iteration from ``problem.x0``.

    At each iterate the feasibility stop is tested first, then the
    subproblem is solved and the step-zero stop is tested against
    ``tol_step``. The run is deterministic.

    Parameters
    ----------
    problem : CompositeProblem
    max_iter : int
        Maximum number of steps.
    rule : StepRule or str
        Step selection within ``D_delta``.

    Returns
    -------
    RunReport
    """
    rule = StepRule(rule)
    h = problem.h
    x = problem.x0.copy()
    xs, ds, dists, vals, inC, hFs = [x], [], [], [], [], []
    termination, message = Termination.MAX_ITER, ""
    for k in range(max_iter + 1):
        hx = h(problem.F(x))
        hFs.append(hx)
        if hx <= h.h_min + problem.tol_feas:
            termination = Termination.FEASIBLE
            break
        if k == max_iter:
            message = _plateau_message(hFs, dists)
            break
        try:
            step = solve_subproblem(problem, x, rule=rule)
        except SubproblemError as exc:
            termination, message = Termination.SUBPROBLEM_ERROR, str(exc)
            break
        dists.append(step.dist)
        vals.append(step.subproblem_value)
        inC.append(step.in_C)
        if step.dist <= problem.tol_step:
            termination = Termination.STEP_ZERO
            break
        x = x + step.d
        ds.append(step.d)
        xs.append(x)
    return RunReport(
        problem=problem,
        x=tuple(xs),
        d=tuple(ds),
        dist=tuple(dists),
        subproblem_value=tuple(vals),
        in_C=tuple(inC),
        hF=tuple(hFs),
        termination=termination,
        message=message,
        rule=rule,
    )


def majorizing_sequence(cert, length):
    """
    First ``length`` terms of the certificate's scalar Newton sequence.

    Unlike the stored trace this does not stop once ``t_k`` meets
    ``t_star`` in floating point; such terms are continued at ``t_star``.
    """
    if cert.scalar is None:
        raise ValueError("certificate has no scalar sequence (h3 fails)")
    stored = list(cert.scalar.t)
    if length <= len(stored):
        return np.array(stored[:length])
    ts = stored
    t_star = cert.t_star
    aux = cert_aux(cert)
    while len(ts) < length:
        t = ts[-1]
        try:
            nxt = float(newton_map(aux, t)) if t < t_star else t_star
        except DomainError:
            nxt = t_star
        ts.append(min(max(nxt, t), t_star))
    return np.array(ts)


def cert_aux(cert):
    """Auxiliary function behind ``cert`` (needs the majorant the certificate was built with)."""
    if cert.majorant is None:
        raise ValueError("certificate does not carry its majorant")
    return AuxiliaryFunction(cert.xi, cert.alpha, cert.majorant)


@dataclass(frozen=True, eq=False)
class MajorizationCheck:
    """
    Per-step comparison of a run with a majorizing sequence.

    ``bd1[k]``: ``||d_k|| <= t_{k+1} - t_k``; ``bd2[k]`` (``k >= 1``):
    ``||d_k|| <= (t_{k+1} - t_k) / (t_k - t_{k-1})^2 ||d_{k-1}||^2``; both
    with slack ``1e-9 (1 + t_{k+1} - t_k)``. ``eq002[k]`` is a proxy check
    that uses the final iterate in place of the limit point:
    ``||x_last - x_k|| <= t_star - t_k + tol_feas``. ``ball[k]`` is
    ``||x_k - x0|| < t_star`` (with the same slack).
    """

    t: np.ndarray
    step_norms: np.ndarray
    bd1: tuple
    bd1_slack: tuple
    bd2: tuple
    bd2_slack: tuple
    eq002: tuple
    ball: tuple
    guaranteed: bool
    notes: tuple = field(default_factory=tuple)

    @property
    def all_pass(self):
        bd2 = [b for b in self.bd2 if b is not None]
        return all(self.bd1) and all(bd2) and all(self.eq002) and all(self.ball)

    def failures(self):
        out = []
        for name, seq in (("bd1", self.bd1), ("bd2", self.bd2), ("eq002 proxy", self.eq002), ("ball", self.ball)):
            out.extend(f"{name} k={k}" for k, ok in enumerate(seq) if ok is False)
        return out

    def summary(self):
        tag = "" if self.guaranteed else " (no guarantee: certificate not valid)"
        if self.all_pass:
            return "majorization: all k pass" + tag
        return "majorization: failed " + ", ".join(self.failures()) + tag


def verify_majorization(report: RunReport, cert) -> MajorizationCheck:
    """
    Check the a priori bounds of a certificate along a finished run.

    Also runs on certificates that are not valid; the result is then marked
    as carrying no guarantee.

    Raises
    ------
    ValueError
        If the certificate has no scalar sequence or the report's dimension
        does not match.
    """
    N = report.iterations
    t = majorizing_sequence(cert, N + 1)
    x0 = report.x[0]
    s = report.step_norms()
    bd1, bd1s, bd2, bd2s = [], [], [], []
    notes = []
    for k in range(N):
        dt = t[k + 1] - t[k]
        slack = BD_SLACK * (1.0 + dt)
        bd1s.append(dt - s[k])
        bd1.append(bool(s[k] <= dt + slack))
        if k == 0:
            bd2.append(None)
            bd2s.append(math.nan)
            continue
        prev = t[k] - t[k - 1]
        if prev > 0:
            rhs = dt / prev**2 * s[k - 1] ** 2
        else:
            rhs = math.inf
            notes.append(f"bd2 at k={k} vacuous: scalar sequence stalled at t_star")
        bd2s.append(rhs - s[k])
        bd2.append(bool(s[k] <= rhs + slack))
    x_last = report.x_final
    tol = report.problem.tol_feas
    eq002, ball = [], []
    for k, xk in enumerate(report.x):
        if len(x0) != len(xk):
            raise ValueError("iterate dimension mismatch")
        eq002.append(bool(np.abs(x_last - xk).max() <= cert.t_star - t[k] + tol))
        ball.append(bool(np.abs(xk - x0).max() < cert.t_star + BD_SLACK * (1.0 + cert.t_star)))
    notes.append("eq002 is a proxy check: final iterate stands in for the limit point")
    return MajorizationCheck(
        t=t,
        step_norms=s,
        bd1=tuple(bd1),
        bd1_slack=tuple(bd1s),
        bd2=tuple(bd2),
        bd2_slack=tuple(bd2s),
        eq002=tuple(eq002),
        ball=tuple(ball),
        guaranteed=cert.valid,
        notes=tuple(notes),
    )


def sample_lipschitz_constant(F: PolynomialMap, x0, R, samples=1000, seed=0) -> float:
    """
    Largest sampled ``||J(y) - J(x)||_inf / ||y - x||_inf`` over ``B_inf(x0, R)``.

    This is a lower bound on the true Lipschitz constant of the Jacobian,
    meant only for sanity-checking a user-supplied ``K``.
    """
    if not R > 0:
        raise ValueError("R must be positive")
    x0 = np.asarray(x0, dtype=float).ravel()
    rng = np.random.default_rng(seed)
    pts = x0 + R * rng.uniform(-1.0, 1.0, size=(2, samples, x0.size))
    best = 0.0
    for x, y in zip(pts[0], pts[1]):
        gap = np.abs(y - x).max()
        if gap == 0:
            continue
        dJ = F.jacobian(y) - F.jacobian(x)
        best = max(best, float(np.abs(dJ).sum(axis=1).max(initial=0.0)) / gap)
    return best


def trace_csv(report: RunReport, check: Optional[MajorizationCheck] = None, path=None) -> str:
    """
    Iteration trace as CSV text; also written to ``path`` when given.

    Columns: ``k, x_1..x_n, step_norm, dist, hF, t_k, dt, bd1_ok, bd2_ok``.
    Fields that do not apply to a row are left empty.
    """
    n = report.problem.n
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k"] + [f"x_{i + 1}" for i in range(n)] + ["step_norm", "dist", "hF", "t_k", "dt", "bd1_ok", "bd2_ok"])
    s = report.step_norms()
    for k, xk in enumerate(report.x):
        row = [k] + [repr(float(v)) for v in xk]
        row.append(repr(float(s[k])) if k < len(s) else "")
        row.append(repr(float(report.dist[k])) if k < len(report.dist) else "")
        row.append(repr(float(report.hF[k])))
        if check is not None:
            row.append(repr(float(check.t[k])) if k < len(check.t) else "")
            row.append(repr(float(check.t[k + 1] - check.t[k])) if k + 1 < len(check.t) else "")
            row.append(str(check.bd1[k]) if k < len(check.bd1) else "")
            row.append("" if k >= len(check.bd2) or check.bd2[k] is None else str(check.bd2[k]))
        else:
            row.extend(["", "", "", ""])
        w.writerow(row)
    text = buf.getvalue()
    if path is not None:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    return text
