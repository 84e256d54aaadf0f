import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lipdist.analytic import (
    MAX_DEGREE,
    MAX_DIM,
    ClosedFormMap,
    PolynomialMap,
    bounded_regularity_check,
    differential_norm_dilatation_bridge,
    evaluate,
    frechet_differential,
    load_corpus,
    multi_indices,
    normalize_on_ball,
    numerical_differential,
    random_polynomial_map,
)
from lipdist.domains import DiscretizedDomain
from lipdist.exceptions import InvalidInputError
from lipdist.moebius import ball_sup_norm

DISK = DiscretizedDomain.unit_disk()


def test_evaluation_examples():
    assert evaluate(PolynomialMap.monomial(2), np.array([0.5])) == pytest.approx(0.25)
    np.testing.assert_allclose(evaluate(PolynomialMap.constant([1 + 2j, 3], n=2), np.zeros(2)), [1 + 2j, 3])
    assert evaluate(ClosedFormMap.power_branch(0.5), np.array([0.0])) == pytest.approx(1.0)


def test_value_at_zero_is_the_constant_coefficient(rng):
    f = random_polynomial_map(3, 2, 3, random_state=rng, normalize=False)
    const = f.coefficients[:, np.flatnonzero(f.exponents.sum(axis=1) == 0)[0]]
    np.testing.assert_array_equal(f.evaluate(np.zeros(3)), const)


def test_differential_examples(rng):
    np.testing.assert_allclose(frechet_differential(PolynomialMap.monomial(2), np.array([0.5])), [[1.0]])
    L = rng.standard_normal((3, 2)) + 1j * rng.standard_normal((3, 2))
    lin = PolynomialMap.linear(L)
    for _ in range(3):
        np.testing.assert_allclose(lin.differential(rng.standard_normal(2)), L)
    f = PolynomialMap([[1, 1], [2, 0]], np.eye(2))
    np.testing.assert_allclose(f.differential(np.array([1.0, 1.0])), [[1, 1], [2, 0]])


@given(st.integers(0, 2**32 - 1), st.integers(1, 3), st.integers(1, 3), st.integers(1, 4))
def test_exact_jacobian_matches_finite_differences(seed, n, m, degree):
    rng = np.random.default_rng(seed)
    f = random_polynomial_map(n, m, degree, random_state=rng, normalize=False)
    z = 0.5 * (rng.random(n) - 0.5) + 0.5j * (rng.random(n) - 0.5)
    np.testing.assert_allclose(f.differential(z), numerical_differential(f, z), atol=1e-8)


def test_batched_jacobians_agree_with_single_ones(rng):
    f = random_polynomial_map(2, 3, 3, random_state=rng, normalize=False)
    Z = rng.standard_normal((5, 2)) * 0.3 + 0j
    stack = f.differential_batch(Z)
    for k in range(5):
        np.testing.assert_allclose(stack[k], f.differential(Z[k]), rtol=1e-14)


def test_taylor_remainder_decreases(rng):
    f = random_polynomial_map(2, 2, 4, random_state=rng, normalize=False)
    z = np.array([0.2 - 0.1j, 0.3j])
    u = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    u /= np.linalg.norm(u)
    ratios = []
    for h in (1e-2, 1e-3, 1e-4):
        rem = f.evaluate(z + h * u) - f.evaluate(z) - f.differential(z) @ (h * u)
        ratios.append(np.linalg.norm(rem) / h)
    assert ratios[0] > ratios[1] > ratios[2]


def test_power_branch_derivative_formula():
    rho = np.linspace(0, 0.999, 40)[:, None]
    t = np.linspace(0, 2 * np.pi, 40, endpoint=False)[None, :]
    Z = (rho * np.exp(1j * t)).reshape(-1, 1)
    for alpha in (0.25, 0.5, 0.75):
        f = ClosedFormMap.power_branch(alpha)
        d = np.abs(f.differential_batch(Z)[:, 0, 0])
        np.testing.assert_allclose(d, alpha * np.abs(1 - Z[:, 0]) ** (alpha - 1), rtol=1e-12)


def test_power_branch_is_analytic_inside_the_disk():
    f = ClosedFormMap.power_branch(0.5)
    z = np.array([0.3 + 0.4j])
    np.testing.assert_allclose(f.differential(z), numerical_differential(f, z), atol=1e-9)
    assert f.evaluate(np.array([-0.999j])).real > 0


def test_real_embedding_gives_the_same_values(rng):
    f = random_polynomial_map(2, 2, 3, random_state=rng, normalize=False)
    Z = 0.4 * (rng.standard_normal((6, 2)) + 1j * rng.standard_normal((6, 2)))
    R = np.stack([Z.real, Z.imag], axis=-1).reshape(6, 4)
    np.testing.assert_array_equal(f.evaluate(R), f.evaluate(Z))
    g = ClosedFormMap.power_branch(0.3)
    np.testing.assert_array_equal(g.evaluate(np.stack([Z[:, 0].real, Z[:, 0].imag], axis=1)),
                                  g.evaluate(Z[:, :1]))


def test_wrong_shapes_are_rejected():
    f = PolynomialMap.identity(2)
    with pytest.raises(InvalidInputError):
        f.evaluate(np.zeros(3, dtype=complex))
    with pytest.raises(InvalidInputError):
        ClosedFormMap.power_branch(0.5).differential(np.zeros(2, dtype=complex))


def test_caps_on_degree_and_dimension():
    with pytest.raises(InvalidInputError):
        random_polynomial_map(MAX_DIM + 1, 1, 2)
    with pytest.raises(InvalidInputError):
        random_polynomial_map(1, 1, MAX_DEGREE + 1)


def test_multi_indices_count():
    # number of monomials of degree <= d in n variables is C(n + d, d)
    assert len(multi_indices(3, 4)) == 35
    assert len(multi_indices(1, 6)) == 7


def test_normalized_maps_are_bounded_by_one(rng):
    f = random_polynomial_map(2, 3, 3, random_state=rng)
    assert ball_sup_norm(f.evaluate, 2, grid_size=8192, random_state=1) <= 1.0
    g, sup = normalize_on_ball(PolynomialMap.monomial(3, 4.0))
    assert sup == pytest.approx(4.0, rel=1e-12)


def test_json_round_trip(rng):
    f = random_polynomial_map(2, 2, 2, random_state=rng)
    g = PolynomialMap.from_json(f.to_json())
    np.testing.assert_array_equal(g.coefficients, f.coefficients)
    np.testing.assert_array_equal(g.exponents, f.exponents)
    assert json.loads(f.to_json())["n"] == 2


def test_corpus_maps_are_bounded():
    corpus = load_corpus()
    assert {"half_shift", "pair"} <= set(corpus)
    for f in corpus.values():
        assert ball_sup_norm(f.evaluate, f.n, random_state=3) <= 1.0 + 1e-12


# bridges and regularity -------------------------------------------------------------


def test_bridge_examples():
    ident = differential_norm_dilatation_bridge(PolynomialMap.identity(1), np.array([0.3]))
    assert ident.differential_norm == pytest.approx(1.0) and ident.passed
    sq = differential_norm_dilatation_bridge(PolynomialMap.monomial(2), np.array([0.0]))
    assert sq.differential_norm == 0.0 and sq.dilatation < 1e-3


def test_bridge_for_random_cubics(rng):
    f = random_polynomial_map(2, 3, 3, random_state=rng)
    B = DiscretizedDomain.complex_ball(2)
    for z in B.sample(10, rng, 0.05):
        zc = z[0::2] + 1j * z[1::2]
        assert differential_norm_dilatation_bridge(f, zc, random_state=rng).passed


def test_constant_map_regularity():
    rep = bounded_regularity_check(PolynomialMap.constant([0.5]), DISK, 1, np.array([[0.1, 0.2]]))
    assert rep.constant == 0.0 and rep.passed and rep.p == 1


def test_two_regular_case_on_the_ball(rng):
    f = random_polynomial_map(2, 3, 2, random_state=rng)
    B = DiscretizedDomain.complex_ball(2)
    rep = bounded_regularity_check(f, B, 3, B.sample(6, rng, 0.05), random_state=rng)
    assert rep.p == 2
    assert rep.passed, rep.to_dict()


def test_scalar_case_exceeds_one_for_a_truncated_automorphism():
    """Degree-6 Taylor polynomial of (z + 1/2)/(1 + z/2), normalized on the disc.

    A certified lower bound for K at x = 0, r = 0.9 uses an upper bound for
    the oscillation of |f|: the grid maximum plus the Lipschitz constant of f
    times the grid covering radius.
    """
    b, r, deg = 0.5, 0.9, 6
    coef = [b] + [(1 - b * b) * (-b) ** (k - 1) for k in range(1, deg + 1)]
    f, _ = normalize_on_ball(PolynomialMap(np.arange(deg + 1)[:, None], [coef]))
    c = f.coefficients[0]
    lip = float(np.sum(np.arange(deg + 1) * np.abs(c)))
    n_rho, n_t = 600, 2400
    rho = np.linspace(0, r, n_rho)[:, None]
    t = np.linspace(0, 2 * np.pi, n_t, endpoint=False)[None, :]
    Z = (rho * np.exp(1j * t)).reshape(-1, 1)
    f0 = abs(c[0])
    osc_grid = np.max(np.abs(np.abs(f.evaluate(Z)[:, 0]) - f0))
    cover = np.hypot(r / (n_rho - 1), r * np.pi / n_t)
    K_lower = abs(c[1]) * r / (osc_grid + lip * cover)
    assert K_lower > 1.2

    rep = bounded_regularity_check(f, DISK, 1, np.zeros((1, 2)), radius_fractions=(r,))
    assert rep.constant >= K_lower - 1e-3
    assert not rep.passed
