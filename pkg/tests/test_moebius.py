import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lipdist.analytic import PolynomialMap, numerical_differential, random_polynomial_map
from lipdist.exceptions import InvalidInputError, PreconditionError
from lipdist.moebius import (
    MoebiusTransform,
    ball_sup_norm,
    moebius_apply,
    moebius_differential_at_zero,
    operator_norm,
    operator_norms,
    schwarz_pick_check,
)


def random_ball_point(rng, m, max_norm=0.999):
    v = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    return v / np.linalg.norm(v) * max_norm * rng.random() ** (1 / (2 * m))


@given(st.integers(0, 2**32 - 1), st.sampled_from([1, 2, 5]))
def test_involution(seed, m):
    rng = np.random.default_rng(seed)
    T = MoebiusTransform(random_ball_point(rng, m))
    z = random_ball_point(rng, m)
    assert np.linalg.norm(T(T(z)) - z) <= 1e-10


def test_involution_batch_of_a_thousand(rng):
    for m in (1, 2, 5):
        for _ in range(50):
            T = MoebiusTransform(random_ball_point(rng, m))
            Z = np.stack([random_ball_point(rng, m) for _ in range(20)])
            W = T(Z)
            assert np.all(np.linalg.norm(W, axis=1) < 1)
            assert np.max(np.linalg.norm(T(W) - Z, axis=1)) <= 1e-10


def test_centre_goes_to_zero_and_zero_to_centre(rng):
    a = random_ball_point(rng, 3)
    T = MoebiusTransform(a)
    assert np.linalg.norm(moebius_apply(T, np.zeros(3)) - a) <= 1e-12
    assert np.linalg.norm(T(a)) <= 1e-12


def test_zero_centre_is_minus_identity(rng):
    T = MoebiusTransform(np.zeros(2))
    z = random_ball_point(rng, 2)
    np.testing.assert_allclose(T(z), -z)
    np.testing.assert_allclose(moebius_differential_at_zero(T), -np.eye(2))
    assert T.s == 1.0 and not np.any(T.P)


def test_projector_algebra(rng):
    for m in (1, 2, 4):
        T = MoebiusTransform(random_ball_point(rng, m))
        np.testing.assert_allclose(T.P @ T.P, T.P, atol=1e-12)
        np.testing.assert_allclose(T.Q @ T.Q, T.Q, atol=1e-12)
        np.testing.assert_allclose(T.P @ T.Q, 0, atol=1e-12)
        assert 0 < T.s <= 1


def test_one_dimensional_projector_is_identity():
    T = MoebiusTransform([0.3 + 0.1j])
    np.testing.assert_allclose(T.P, [[1.0]])
    np.testing.assert_allclose(T.Q, [[0.0]], atol=1e-15)


def test_centre_outside_ball_and_points_outside_are_rejected():
    with pytest.raises(InvalidInputError):
        MoebiusTransform([1.0, 0.0])
    T = MoebiusTransform([0.5])
    with pytest.raises(InvalidInputError):
        T(np.array([1.0 + 0j]))


def test_differential_norm_examples():
    assert operator_norm(MoebiusTransform([0.6]).differential_at_zero()) == pytest.approx(0.64, abs=1e-12)
    a = 0.6 * np.array([1, 1j, -1]) / np.sqrt(3)
    assert operator_norm(MoebiusTransform(a).differential_at_zero()) == pytest.approx(0.8, abs=1e-12)


@pytest.mark.parametrize("m", [1, 2, 3, 5])
def test_differential_norm_split(m, rng):
    for r in np.append(np.arange(0, 0.95, 0.1), 0.95):
        u = random_ball_point(rng, m)
        a = r * u / np.linalg.norm(u)
        T = MoebiusTransform(a)
        expected = 1 - r**2 if m == 1 else np.sqrt(1 - r**2)
        assert abs(operator_norm(T.differential_at_zero()) - expected) <= 1e-8
        assert T.expected_differential_norm() == pytest.approx(expected, abs=1e-15)


def test_differential_matches_finite_differences(rng):
    T = MoebiusTransform(random_ball_point(rng, 3, 0.7))
    z = random_ball_point(rng, 3, 0.5)
    np.testing.assert_allclose(T.differential(z), numerical_differential(T, z, h=1e-3), atol=1e-8)
    np.testing.assert_allclose(T.differential(np.zeros(3)), T.differential_at_zero(), atol=1e-15)


def test_operator_norm_examples():
    assert operator_norm(np.eye(4)) == pytest.approx(1.0, abs=1e-12)
    assert operator_norm(np.diag([3.0, 1.0])) == pytest.approx(3.0, abs=1e-12)
    assert operator_norm(np.zeros((2, 3))) == 0.0


@given(st.integers(0, 2**32 - 1), st.integers(1, 5), st.integers(1, 5))
def test_operator_norm_matches_largest_singular_value(seed, m, n):
    rng = np.random.default_rng(seed)
    L = rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))
    assert operator_norm(L) == pytest.approx(np.linalg.norm(L, 2), rel=1e-8)


def test_batched_operator_norms_match_svd(rng):
    S = rng.standard_normal((50, 3, 2)) + 1j * rng.standard_normal((50, 3, 2))
    np.testing.assert_allclose(operator_norms(S), np.linalg.norm(S, 2, axis=(1, 2)), rtol=1e-8)


def test_ball_sup_norm_of_simple_maps():
    assert ball_sup_norm(lambda Z: Z, 2) == pytest.approx(1.0, abs=1e-12)
    # |z1 z2| peaks at 1/2 on the sphere of C^2
    sup = ball_sup_norm(lambda Z: (Z[:, 0] * Z[:, 1])[:, None], 2)
    assert sup == pytest.approx(0.5, abs=1e-6) and sup <= 0.5 + 1e-12


# Schwarz-Pick -----------------------------------------------------------------------


def test_identity_is_the_equality_case():
    rep = schwarz_pick_check(PolynomialMap.identity(2), 2, 2)
    assert rep.differential_norm == pytest.approx(1.0, abs=1e-12)
    assert rep.bound == 1.0 and rep.passed


def test_constant_map_has_zero_differential():
    rep = schwarz_pick_check(PolynomialMap.constant([0.3, 0.2j], n=1), 1, 2)
    assert rep.differential_norm == 0.0 and rep.passed
    assert rep.bound == pytest.approx(np.sqrt(1 - 0.13))


def test_unbounded_map_violates_the_precondition():
    with pytest.raises(PreconditionError):
        schwarz_pick_check(PolynomialMap.monomial(1, 2.0), 1, 1)


def test_random_normalized_quadratics_in_two_variables(rng):
    worst = np.inf
    for _ in range(200):
        f = random_polynomial_map(2, 2, 2, random_state=rng)
        rep = schwarz_pick_check(f, 2, 2, random_state=rng)
        assert rep.sup_norm <= 1.0
        assert rep.chain_passed
        worst = min(worst, rep.slack)
    assert worst >= -1e-9


def test_chain_rule_at_the_composition_point(rng):
    g = random_polynomial_map(2, 3, 2, random_state=rng)
    a = g.evaluate(np.zeros(2, dtype=complex))
    T = MoebiusTransform(a)

    def composed(Z):
        return T(np.atleast_2d(g.evaluate(np.atleast_2d(Z))))

    exact = T.differential(a) @ g.differential(np.zeros(2))
    numeric = numerical_differential(composed, np.zeros(2), h=1e-3)
    np.testing.assert_allclose(numeric, exact, atol=1e-9)
    lhs = operator_norm(g.differential(np.zeros(2)))
    rhs = operator_norm(T.differential_at_zero()) * operator_norm(exact)
    assert lhs <= rhs + 1e-9
