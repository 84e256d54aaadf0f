import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lipdist.domains import DiscretizedDomain
from lipdist.exceptions import EvaluationError, InvalidInputError
from lipdist.functions import Majorant, WeightField, majorant_validate

GRID = np.geomspace(1e-6, 2.0, 400)


@given(st.floats(0.05, 1.0))
def test_standard_majorant_best_constant_is_reciprocal_exponent(alpha):
    diag = majorant_validate(Majorant.standard(alpha), GRID)
    assert diag.valid
    assert diag.best_A == pytest.approx(1.0 / alpha, rel=1e-12)


def test_square_root_majorant():
    diag = majorant_validate(Majorant.standard(0.5), GRID)
    assert diag.valid and diag.best_A == pytest.approx(2.0)


def test_identity_majorant_is_the_equality_case():
    diag = majorant_validate(Majorant.standard(1.0), GRID)
    assert diag.valid and diag.best_A == pytest.approx(1.0)


def test_square_majorant_is_flagged():
    diag = majorant_validate(Majorant.standard(2.0), GRID)
    assert not diag.derivative_decreasing
    assert not diag.valid


def test_custom_majorant_log_type():
    phi = Majorant.custom(lambda t: np.log1p(t), lambda t: 1.0 / (1.0 + t))
    diag = majorant_validate(phi, GRID)
    assert diag.valid
    assert diag.best_A == pytest.approx(np.max(np.log1p(GRID) * (1 + GRID) / GRID))


def test_non_finite_majorant_values_raise():
    phi = Majorant.custom(lambda t: np.sqrt(t), lambda t: 0.5 / np.sqrt(t - 1e-3))
    with pytest.raises(EvaluationError):
        with np.errstate(invalid="ignore", divide="ignore"):
            majorant_validate(phi, GRID)


def test_bad_grids_and_exponents_are_rejected():
    with pytest.raises(InvalidInputError):
        majorant_validate(Majorant.standard(0.5), [0.0, 1.0])
    with pytest.raises(InvalidInputError):
        majorant_validate(Majorant.standard(0.5), [1.0, 0.5])
    with pytest.raises(InvalidInputError):
        Majorant.standard(0.0)


def test_weight_fields_on_the_disk():
    D = DiscretizedDomain.unit_disk()
    X = np.array([[0.0, 0.0], [0.3, 0.4]])
    np.testing.assert_allclose(WeightField.boundary_distance(D)(X), [1.0, 0.5])
    np.testing.assert_allclose(WeightField.half_boundary_distance(D)(X), [0.5, 0.25])
    np.testing.assert_allclose(WeightField.power(D, -0.5)(X), [1.0, np.sqrt(2.0)])
    np.testing.assert_allclose(WeightField.quasi_hyperbolic(D)(X), [1.0, 2.0])
    np.testing.assert_allclose(WeightField.constant(3.0)(X), [3.0, 3.0])


def test_majorant_derivative_of_a_weight():
    D = DiscretizedDomain.unit_disk()
    w = WeightField.boundary_distance(D).compose_majorant_derivative(Majorant.standard(0.5))
    assert w(np.array([[0.3, 0.4]]))[0] == pytest.approx(0.5 / np.sqrt(0.5))


def test_weights_must_be_positive_and_shaped():
    with pytest.raises(InvalidInputError):
        WeightField.constant(0.0)
    with pytest.raises(EvaluationError):
        WeightField.custom(lambda X: -np.ones(len(X)))(np.zeros((2, 2)))
    with pytest.raises(EvaluationError):
        WeightField.custom(lambda X: np.ones(len(X) + 1))(np.zeros((2, 2)))
