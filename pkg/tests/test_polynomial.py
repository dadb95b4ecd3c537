import numpy as np
import pytest

from cgn.polynomial import PolynomialMap, eval_F

from oracles import eval_monomials, fd_jacobian


def random_map(rng, n, m, terms=4, degree=3):
    comps = []
    for _ in range(m):
        comps.append([(float(rng.normal()), tuple(int(e) for e in rng.integers(0, degree + 1, size=n))) for _ in range(terms)])
    return PolynomialMap(n, m, comps)


class TestEvaluation:
    def test_sqrt2_map(self):
        F = PolynomialMap(1, 1, [[(1.0, (2,)), (-2.0, (0,))]])
        val, J = eval_F(F, np.array([1.5]))
        np.testing.assert_allclose(val, [0.25])
        np.testing.assert_allclose(J, [[3.0]])

    def test_two_by_two(self):
        F = PolynomialMap(2, 2, [[(1.0, (1, 0)), (1.0, (0, 1)), (-3.0, (0, 0))], [(1.0, (2, 0)), (-1.0, (0, 1))]])
        val, J = eval_F(F, [1.0, 2.0])
        np.testing.assert_allclose(val, [0.0, -1.0])
        np.testing.assert_allclose(J, [[1.0, 1.0], [2.0, -1.0]])
        np.testing.assert_allclose(J, fd_jacobian(F, np.array([1.0, 2.0])), atol=1e-8)

    def test_zero_map(self):
        F = PolynomialMap.zero(3, 2)
        val, J = F.evaluate(np.ones(3))
        np.testing.assert_array_equal(val, np.zeros(2))
        np.testing.assert_array_equal(J, np.zeros((2, 3)))

    def test_matches_loop_evaluator(self, rng):
        for _ in range(20):
            F = random_map(rng, 3, 2)
            x = rng.normal(size=3)
            comps = [[(c, e) for c, e in terms] for terms in F.components]
            np.testing.assert_allclose(F(x), eval_monomials(comps, x), rtol=1e-13, atol=1e-13)

    def test_repeated_monomials_accumulate(self):
        F = PolynomialMap(1, 1, [[(1.0, (2,)), (2.0, (2,))]])
        assert F([2.0])[0] == 12.0


class TestValidation:
    def test_dimension(self):
        F = PolynomialMap(2, 1, [[(1.0, (1, 0))]])
        with pytest.raises(ValueError):
            F([1.0])

    def test_bad_exponents(self):
        with pytest.raises(ValueError):
            PolynomialMap(2, 1, [[(1.0, (1,))]])
        with pytest.raises(ValueError):
            PolynomialMap(1, 1, [[(1.0, (-1,))]])
        with pytest.raises(ValueError):
            PolynomialMap(1, 2, [[(1.0, (1,))]])

    def test_dict_round_trip(self, rng):
        F = random_map(rng, 2, 3)
        G = PolynomialMap.from_dict(F.to_dict())
        x = rng.normal(size=2)
        np.testing.assert_array_equal(F(x), G(x))
        np.testing.assert_array_equal(F.jacobian(x), G.jacobian(x))
