import csv
import io
import math

import numpy as np
import pytest

from cgn import catalog
from cgn.outer import MaxAffine
from cgn.polynomial import PolynomialMap
from cgn.problem import CompositeProblem
from cgn.regularity import certify
from cgn.solver import (
    Termination,
    majorizing_sequence,
    run,
    sample_lipschitz_constant,
    trace_csv,
    verify_majorization,
)
from cgn.subproblem import StepRule


def newton_iterates(x, k):
    out = [x]
    for _ in range(k):
        x = (x + 2 / x) / 2
        out.append(x)
    return out


class TestProblem:
    def test_validation(self, sqrt2):
        p = sqrt2.problem
        with pytest.raises(ValueError):
            CompositeProblem(p.F, p.h, np.zeros(2))
        with pytest.raises(ValueError):
            CompositeProblem(p.F, p.h, p.x0, eta=0.5)
        with pytest.raises(ValueError):
            CompositeProblem(p.F, p.h, p.x0, delta=0.0)


class TestRun:
    def test_sqrt2_iterates(self, sqrt2):
        rep = run(sqrt2.problem)
        assert rep.termination is Termination.FEASIBLE
        assert rep.iterations <= 5
        xs = [float(x[0]) for x in rep.x]
        np.testing.assert_allclose(xs[:4], newton_iterates(1.5, 3), rtol=1e-12)
        assert abs(xs[-1] - math.sqrt(2)) <= 1e-12

    def test_recurrence_is_exact(self, sqrt2):
        rep = run(sqrt2.problem)
        for k, d in enumerate(rep.d):
            # stored exactly as x_k + d_k; the difference form is not exact in floating point
            assert np.array_equal(rep.x[k] + d, rep.x[k + 1])
        assert all(v >= 0 for v in rep.dist)

    def test_start_in_C(self, sqrt2):
        p = sqrt2.problem
        rep = run(CompositeProblem(p.F, p.h, np.array([math.sqrt(2)]), tol_feas=1e-12))
        assert rep.iterations == 0
        assert rep.termination in (Termination.FEASIBLE, Termination.STEP_ZERO)

    def test_step_zero(self):
        # linearisation cannot improve: F(x) = x^2 + 1 at x = 0 has J = 0
        F = PolynomialMap(1, 1, [[(1.0, (2,)), (1.0, (0,))]])
        h = MaxAffine(np.array([[1.0], [-1.0]]), np.zeros(2))
        rep = run(CompositeProblem(F, h, np.array([0.0])))
        assert rep.termination is Termination.STEP_ZERO
        assert rep.iterations == 0 and len(rep.dist) == 1

    def test_inequality_system(self):
        spec = catalog.get_demo("inequality")
        rep = run(spec.problem)
        assert rep.converged
        x, y = rep.x_final
        tol = spec.problem.tol_feas
        assert x * x + y * y - 1 <= tol and x - y <= tol

    def test_infeasible_hits_max_iter(self):
        spec = catalog.get_demo("infeasible")
        rep = run(spec.problem, max_iter=30)
        assert rep.termination is Termination.MAX_ITER
        assert rep.iterations == 30
        assert "plateau" in rep.message
        assert min(rep.hF) >= 1.0

    def test_first_vertex_rule(self):
        spec = catalog.get_demo("minimax")
        rep = run(spec.problem, rule=StepRule.FIRST_VERTEX)
        assert rep.converged
        np.testing.assert_allclose(rep.x_final, [3.0, 2.0], atol=1e-9)

    def test_deterministic(self, orthant):
        a, b = run(orthant.problem), run(orthant.problem)
        assert all(np.array_equal(x, y) for x, y in zip(a.x, b.x))


class TestMajorization:
    @pytest.mark.parametrize("name", ["sqrt2", "boundary", "orthant", "minimax"])
    def test_certified_instances_pass(self, name):
        spec = catalog.get_demo(name)
        cert = certify(spec.problem, spec.regularity, spec.majorant, xi=spec.xi, alpha=spec.alpha)
        assert cert.valid
        chk = verify_majorization(run(spec.problem), cert)
        assert chk.all_pass, chk.failures()
        assert chk.summary() == "majorization: all k pass"

    def test_first_step_against_xi(self, sqrt2):
        cert = certify(sqrt2.problem, sqrt2.regularity, sqrt2.majorant, xi=0.125)
        rep = run(sqrt2.problem)
        chk = verify_majorization(rep, cert)
        assert chk.t[1] - chk.t[0] == cert.xi
        assert rep.step_norms()[0] <= cert.xi

    def test_uncertified_run_still_checked(self, sqrt2):
        cert = certify(sqrt2.problem, sqrt2.regularity, sqrt2.majorant, xi=0.125, alpha=0.3)
        assert not cert.valid
        chk = verify_majorization(run(sqrt2.problem), cert)
        assert not chk.guaranteed
        assert "no guarantee" in chk.summary()

    def test_too_small_xi_reports_failures(self, sqrt2):
        # xi below the first step: bd1 must fail at k = 0
        cert = certify(sqrt2.problem, sqrt2.regularity, sqrt2.majorant, xi=0.05)
        chk = verify_majorization(run(sqrt2.problem), cert)
        assert chk.bd1[0] is False
        assert "bd1 k=0" in chk.failures()

    def test_sequence_extension(self, boundary):
        cert = certify(boundary.problem, boundary.regularity, boundary.majorant)
        t = majorizing_sequence(cert, 80)
        assert len(t) == 80
        assert np.all(np.diff(t) >= 0) and t[-1] <= cert.t_star

    def test_needs_scalar_sequence(self, sqrt2):
        cert = certify(sqrt2.problem, sqrt2.regularity, sqrt2.majorant, xi=2.0)
        with pytest.raises(ValueError):
            verify_majorization(run(sqrt2.problem), cert)


class TestTraceCSV:
    def test_columns_and_rows(self, sqrt2, tmp_path):
        cert = certify(sqrt2.problem, sqrt2.regularity, sqrt2.majorant, xi=0.125)
        rep = run(sqrt2.problem)
        chk = verify_majorization(rep, cert)
        path = tmp_path / "trace.csv"
        text = trace_csv(rep, chk, path=path)
        assert path.read_text() == text
        rows = list(csv.DictReader(io.StringIO(text)))
        assert list(rows[0]) == ["k", "x_1", "step_norm", "dist", "hF", "t_k", "dt", "bd1_ok", "bd2_ok"]
        assert len(rows) == rep.iterations + 1
        assert float(rows[0]["x_1"]) == 1.5 and rows[0]["bd1_ok"] == "True" and rows[0]["bd2_ok"] == ""
        assert rows[-1]["step_norm"] == ""

    def test_without_check(self, orthant):
        text = trace_csv(run(orthant.problem))
        header = text.splitlines()[0].split(",")
        assert header[:3] == ["k", "x_1", "x_2"]


class TestLipschitzSampler:
    def test_quadratic(self):
        F = PolynomialMap(1, 1, [[(1.0, (2,)), (-2.0, (0,))]])
        assert sample_lipschitz_constant(F, [1.5], 0.5, samples=200) == pytest.approx(2.0)

    def test_linear(self):
        F = PolynomialMap(2, 1, [[(3.0, (1, 0)), (-1.0, (0, 1))]])
        assert sample_lipschitz_constant(F, [0.0, 0.0], 1.0) == 0.0

    def test_cubic_from_below(self):
        F = PolynomialMap(1, 1, [[(1.0, (3,))]])
        few = sample_lipschitz_constant(F, [0.0], 1.0, samples=50, seed=1)
        many = sample_lipschitz_constant(F, [0.0], 1.0, samples=20000, seed=1)
        assert few <= many <= 6.0
        assert many > 5.8

    def test_bad_radius(self):
        with pytest.raises(ValueError):
            sample_lipschitz_constant(PolynomialMap.zero(1, 1), [0.0], 0.0)
