import json
import math

import numpy as np
import pytest

from cgn import catalog
from cgn.errors import DomainError
from cgn.io import validate_certificate
from cgn.majorant import Lipschitz, Smale, custom_from_catalog
from cgn.outer import LInfDeviation, MaxAffine
from cgn.polynomial import PolynomialMap
from cgn.problem import CompositeProblem
from cgn.regularity import (
    QuasiRegular,
    RegularPoint,
    Robinson,
    alpha_lower_bound,
    certify,
    check_regular_point,
    estimate_convex_process_inverse_norm,
    quasi_regular_bound_from_robinson,
    robinson_radius,
)

from oracles import bisect, lipschitz_root

POINT_CONE = np.array([[1.0], [-1.0]])
ORTHANT_G = np.array([[1.0, 0.0], [0.0, 1.0]])


class TestAlphaBound:
    def test_regular_point_example(self):
        a = alpha_lower_bound(RegularPoint(0.5, 0.5), Lipschitz(2.0, 0.5), 0.125, 1.0)
        assert a == pytest.approx(0.5 / 1.125, abs=1e-15)

    @pytest.mark.parametrize("beta0", [0.3, 1.0, 2.5])
    def test_robinson_eta_one_is_beta0(self, beta0):
        assert alpha_lower_bound(Robinson(beta0), Lipschitz(1.0), 0.1, 1.0) == beta0

    @pytest.mark.parametrize("eta, beta, gamma, xi", [(1.0, 0.5, 1.0, 0.1), (2.0, 0.3, 2.0, 0.05), (1.5, 1.2, 0.5, 0.3)])
    def test_smale_regular_formula(self, eta, beta, gamma, xi):
        s = (1 - gamma * xi) ** 2
        expected = eta * beta * s / (eta * beta + (1 - eta * beta) * s)
        got = alpha_lower_bound(RegularPoint(1.0, beta), Smale(gamma), xi, eta)
        assert got == pytest.approx(expected, rel=1e-13)

    @pytest.mark.parametrize("eta, beta0, gamma, xi", [(1.0, 0.5, 1.0, 0.1), (3.0, 0.4, 2.0, 0.05)])
    def test_smale_robinson_formula(self, eta, beta0, gamma, xi):
        s = (1 - gamma * xi) ** 2
        expected = eta * beta0 * s / ((eta - 1) * beta0 + (1 - beta0 * (eta - 1)) * s)
        got = alpha_lower_bound(Robinson(beta0), Smale(gamma), xi, eta)
        assert got == pytest.approx(expected, rel=1e-13)

    def test_lipschitz_robinson_formula(self):
        eta, beta0, K, xi = 2.0, 0.7, 3.0, 0.05
        got = alpha_lower_bound(Robinson(beta0), Lipschitz(K), xi, eta)
        assert got == pytest.approx(eta * beta0 / (1 + (eta - 1) * K * beta0 * xi))

    def test_quasi_regular_constant_matches_regular(self):
        q = QuasiRegular(0.5, (0.0,), (0.5,))
        got = alpha_lower_bound(q, Lipschitz(2.0, 0.5), 0.125, 1.0, t_star_probe=0.2)
        assert got == pytest.approx(1.001 * 0.5 / 1.125)

    def test_quasi_regular_jump_is_seen(self):
        # beta jumps to 2 at t = 0.15; the expression peaks right at the jump
        q = QuasiRegular(0.5, (0.0, 0.15), (0.5, 2.0))
        got = alpha_lower_bound(q, Lipschitz(2.0, 0.5), 0.125, 1.0, t_star_probe=0.2)
        assert got == pytest.approx(1.001 * 2.0 / (2.0 * 2.0 * 0.15 + 1.0))

    def test_quasi_regular_needs_probe(self):
        q = QuasiRegular(0.5, (0.0,), (0.5,))
        with pytest.raises(DomainError):
            alpha_lower_bound(q, Lipschitz(2.0), 0.125, 1.0)
        with pytest.raises(DomainError):
            alpha_lower_bound(q, Lipschitz(2.0), 0.125, 1.0, t_star_probe=0.6)

    def test_xi_outside_domain(self):
        with pytest.raises(DomainError):
            alpha_lower_bound(RegularPoint(1.0, 1.0), Smale(1.0), 1.0, 1.0)


class TestRobinsonQuantities:
    def test_bound_from_robinson(self):
        m = Lipschitz(2.0)
        assert quasi_regular_bound_from_robinson(0.5, m, 0.0) == 0.5
        assert quasi_regular_bound_from_robinson(0.5, m, 0.25) == pytest.approx(2 / 3)
        r = robinson_radius(0.5, m)
        assert quasi_regular_bound_from_robinson(0.5, m, r * (1 - 1e-9)) > 1e7
        with pytest.raises(DomainError):
            quasi_regular_bound_from_robinson(0.5, m, r)

    def test_radius_closed_forms(self):
        assert robinson_radius(0.5, Lipschitz(2.0)) == 1.0
        assert robinson_radius(0.5, Lipschitz(2.0, R=0.4)) == 0.4
        b0, g = 0.7, 2.0
        ref = bisect(lambda t: b0 - 1 + b0 * (1 / (1 - g * t) ** 2 - 2), 0.0, 0.5 - 1e-12)
        assert robinson_radius(b0, Smale(g)) == pytest.approx(ref, abs=1e-12)

    def test_radius_by_bisection(self):
        r = robinson_radius(0.5, custom_from_catalog("quadratic", 10.0, K=2.0))
        assert r == pytest.approx(1.0, abs=1e-12)
        assert r <= 1.0

    def test_inverse_norm_scalar(self):
        est = estimate_convex_process_inverse_norm([[3.0]], POINT_CONE)
        assert est.onto and est.value == pytest.approx(1 / 3)
        assert est.n_vertices == 2

    def test_inverse_norm_orthant(self):
        est = estimate_convex_process_inverse_norm(np.eye(2), ORTHANT_G)
        assert est.value == pytest.approx(1.0, abs=1e-12)
        assert est.n_vertices == 4

    def test_inverse_norm_matches_matrix_inverse(self, rng):
        for _ in range(5):
            J = rng.normal(size=(3, 3)) + 3 * np.eye(3)
            G = np.vstack([np.eye(3), -np.eye(3)])
            est = estimate_convex_process_inverse_norm(J, G)
            assert est.value == pytest.approx(np.abs(np.linalg.inv(J)).sum(axis=1).max(), rel=1e-9)

    def test_not_onto(self):
        est = estimate_convex_process_inverse_norm([[1.0], [0.0]], np.vstack([np.eye(2), -np.eye(2)]))
        assert not est.onto and est.status == "not onto" and math.isinf(est.value)


class TestRegularPoint:
    def test_full_row_rank(self):
        assert check_regular_point(np.eye(2), [[-0.1, -0.1]], [[-1.0, 0.0], [0.0, -1.0]])

    def test_zero_jacobian_with_ball(self):
        box = [[s1, s2] for s1 in (-1.0, 1.0) for s2 in (-1.0, 1.0)]
        assert check_regular_point(np.zeros((2, 3)), box)

    def test_rank_deficient_witness(self):
        # W = orthant - (-0.1, 0.1); e2 is in W polar and in Ker(J0^T)
        J0 = np.array([[1.0], [0.0]])
        W_vertices = [[0.1, -0.1]]
        W_rays = [[-1.0, 0.0], [0.0, -1.0]]
        e2 = np.array([0.0, 1.0])
        assert np.allclose(J0.T @ e2, 0) and e2 @ np.array(W_vertices[0]) <= 0
        assert not check_regular_point(J0, W_vertices, W_rays)

    @pytest.mark.parametrize("name", ["orthant", "minimax", "boundary"])
    def test_robinson_implies_regular(self, name):
        spec = catalog.get_demo(name)
        p = spec.problem
        Fx0, J0 = p.F.evaluate(p.x0)
        G = p.h.cone_G
        assert estimate_convex_process_inverse_norm(J0, G).onto
        if spec.regularity.vrep is not None:
            V, R = spec.regularity.vrep
        else:
            # C = {0}: W is the single point -F(x0)
            V, R = -Fx0[None, :], np.zeros((0, p.m))
        assert check_regular_point(J0, V, R)


class TestCertify:
    def test_sqrt2(self, sqrt2):
        cert = certify(sqrt2.problem, sqrt2.regularity, sqrt2.majorant, xi=0.125)
        assert cert.valid
        assert cert.alpha == pytest.approx(4 / 9)
        assert cert.t_star == pytest.approx(lipschitz_root(2.0, 4 / 9, 0.125), abs=1e-15)
        assert cert.rate == "Q-quadratic"
        names = {c.condition for c in cert.checks}
        assert {"Delta>=xi", "xi>=eta*beta(0)*d0", "alpha>=alpha_bound", "t*<=radius", "h3"} <= names
        errs = cert.predicted_error
        assert errs[0] == cert.t_star and all(e >= 0 for e in errs)

    def test_rounded_alpha_fails_the_bound(self, sqrt2):
        cert = certify(sqrt2.problem, sqrt2.regularity, sqrt2.majorant, xi=0.125, alpha=0.4444444)
        assert [c.condition for c in cert.failed()] == ["alpha>=alpha_bound"]

    def test_xi_zero(self, sqrt2):
        cert = certify(sqrt2.problem, sqrt2.regularity, sqrt2.majorant, xi=0.0)
        assert not cert.valid
        assert any(c.condition == "xi>0" and not c.holds for c in cert.checks)

    def test_already_solved(self):
        F = PolynomialMap(1, 1, [[(1.0, (1,)), (-1.0, (0,))]])
        p = CompositeProblem(F, LInfDeviation(np.zeros(1)), np.array([1.0]))
        cert = certify(p, RegularPoint(1.0, 1.0), Lipschitz(1.0))
        assert not cert.valid
        assert [c for c in cert.checks if c.condition == "d(F(x0),C)>0"][0].holds is False

    def test_boundary_is_linear_only(self, boundary):
        cert = certify(boundary.problem, boundary.regularity, boundary.majorant)
        assert cert.valid
        assert cert.beta0 == pytest.approx(1.0, abs=1e-12)
        assert 2 * cert.alpha * 1.0 * cert.xi == pytest.approx(1.0)
        assert cert.t_star == 1.0 and not cert.h4
        assert cert.rate == "Q-linear only"
        assert cert.scalar.q_quadratic_constant is None

    def test_larger_alpha_grows_t_star(self, sqrt2):
        prev = 0.0
        for alpha in (4 / 9, 0.6, 0.8, 1.0):
            cert = certify(sqrt2.problem, sqrt2.regularity, sqrt2.majorant, xi=0.125, alpha=alpha)
            assert cert.valid
            assert cert.t_star > prev
            prev = cert.t_star
        assert cert.alpha_strict

    def test_quasi_regular(self, sqrt2):
        q = QuasiRegular(0.5, (0.0, 0.2), (0.5, 0.6))
        cert = certify(sqrt2.problem, q, sqrt2.majorant, xi=0.125)
        assert cert.valid and cert.theorem == "quasi-regular"
        assert cert.alpha == pytest.approx(1.001 * 4 / 9)

    def test_robinson_needs_a_cone(self):
        F = PolynomialMap(1, 1, [[(1.0, (1,))]])
        p = CompositeProblem(F, LInfDeviation(np.ones(1)), np.array([0.0]))
        cert = certify(p, Robinson(), Lipschitz(1.0))
        assert not cert.valid
        assert not [c for c in cert.checks if c.condition == "C is a cone"][0].holds

    def test_robinson_eta_above_one(self, orthant):
        p = CompositeProblem(orthant.problem.F, orthant.problem.h, orthant.problem.x0, eta=2.0)
        cert = certify(p, orthant.regularity, orthant.majorant)
        assert cert.valid
        assert cert.xi == pytest.approx(2 * 0.1)
        assert cert.alpha == pytest.approx(2.0 / (1 + 1.0 * 1.0 * 0.2))

    def test_json_document(self, sqrt2):
        cert = certify(sqrt2.problem, sqrt2.regularity, sqrt2.majorant, xi=0.125)
        doc = json.loads(json.dumps(cert.to_dict()))
        validate_certificate(doc)
        assert doc["delta"] == "inf" and doc["valid"] is True
        failing = certify(sqrt2.problem, sqrt2.regularity, sqrt2.majorant, xi=0.0).to_dict()
        validate_certificate(json.loads(json.dumps(failing, allow_nan=False)))
