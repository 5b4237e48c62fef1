import math
from unittest.mock import patch

import numpy as np
import pytest

from shared.errors import InvalidInputError, ModelInvalidError
from shared.kernels import Unclassified, make_exponential, make_power_law, make_tabulated
from stages.oscillatory_transform import TransformValue
from stages.spectral_density import (
    SpectralModel,
    SpectralTable,
    check_integrability,
    compose_rhat,
    rhat,
    rhat_grid,
    rhat_near_zero,
    shared_table,
    subdiffusive_rhat_coefficient,
)


def exact_exponential_rhat(omega):
    # K(t) = exp(-t), m = beta = 1
    return (1.0 + omega**2) / (math.pi * (1.0 + omega**6))


@pytest.fixture(scope="module")
def model():
    return SpectralModel(make_exponential(1.0))


@pytest.fixture(scope="module")
def table(model):
    return SpectralTable(model, 1e-4, 1e2, 16)


@pytest.mark.parametrize("omega", [0.01, 0.5, 1.0, 3.0, 30.0])
def test_rhat_matches_exponential_closed_form(model, omega):
    value = rhat(model, omega)

    assert value.rhat == pytest.approx(exact_exponential_rhat(omega), rel=1e-6)
    assert value.rhat <= value.upper_bound(model.beta) * (1 + 1e-12)
    assert value.converged


def test_rhat_is_even(model):
    assert rhat(model, -2.0).rhat == rhat(model, 2.0).rhat


def test_rhat_at_zero_is_rejected(model):
    with pytest.raises(InvalidInputError):
        rhat(model, 0.0)


def test_compose_rhat_rejects_nonpositive_kcos(model):
    with pytest.raises(ModelInvalidError):
        compose_rhat(model, 1.0, 0.0, 0.5)


def test_compose_rhat_propagates_errors(model):
    exact = compose_rhat(model, 1.0, 0.5, 0.5)
    shifted = compose_rhat(model, 1.0, 0.5 + 1e-6, 0.5)
    noisy = compose_rhat(model, 1.0, 0.5, 0.5, kc_error=1e-6)

    assert noisy.rhat == exact.rhat
    assert noisy.abs_error == pytest.approx(abs(shifted.rhat - exact.rhat), rel=1e-3)


def test_compose_rhat_keeps_the_sign_of_ksin(model):
    positive = compose_rhat(model, 1.0, 0.5, 0.5)
    mirrored = compose_rhat(model, -1.0, 0.5, -0.5)
    negative = compose_rhat(model, 1.0, 0.5, -0.5)

    assert positive.rhat == pytest.approx(1.0 / math.pi)
    assert mirrored.rhat == positive.rhat
    assert negative.rhat == pytest.approx(0.2 / math.pi)
    assert negative.ksin == -0.5


def test_rhat_flags_transforms_that_missed_tolerance(model):
    loose = TransformValue(omega=2.0, value=0.2, abs_error=1e-3, cutoff_time=40.0, tail_bound=0.0, converged=False)

    with patch("stages.spectral_density.spectral.kcos", return_value=loose):
        value = rhat(model, 2.0)

    assert not value.converged
    assert value.kcos == 0.2


def test_model_rejects_nonpositive_parameters():
    with pytest.raises(InvalidInputError):
        SpectralModel(make_exponential(1.0), m=0.0)
    with pytest.raises(InvalidInputError):
        SpectralModel(make_exponential(1.0), beta=-1.0)


def test_rhat_grid_keeps_order(model):
    values = rhat_grid(model, [0.5, 1.0, 2.0], threads=3)

    assert [v.omega for v in values] == [0.5, 1.0, 2.0]


def test_near_zero_limit_diffusive(model):
    report = rhat_near_zero(model)

    assert report.limit == pytest.approx(1.0 / math.pi)
    assert report.passed
    assert report.fitted_exponent == pytest.approx(2.0, abs=0.1)


def test_subdiffusive_coefficient():
    root = math.sqrt(math.pi / 2)

    expected = root / (math.pi * 2.0 * (2.0 * root**2))
    assert subdiffusive_rhat_coefficient(0.5, 2.0, 1.0) == pytest.approx(expected)


def test_near_zero_unclassified_is_rejected():
    t = np.geomspace(0.01, 10.0, 12)
    kernel = make_tabulated(np.column_stack([t, np.exp(-t)]), Unclassified())

    with pytest.raises(InvalidInputError):
        rhat_near_zero(SpectralModel(kernel))


@pytest.mark.slow
def test_near_zero_limit_subdiffusive():
    model = SpectralModel(make_power_law(0.5))

    report = rhat_near_zero(model)

    assert report.limit == pytest.approx(subdiffusive_rhat_coefficient(0.5, 1.0, 1.0))
    assert report.passed


def test_table_interpolates_between_nodes(table):
    between = np.sqrt(table.omegas[:-1] * table.omegas[1:])

    np.testing.assert_allclose(table(between), exact_exponential_rhat(between), rtol=1e-3)
    assert table.relative_error < 1e-2
    assert 0 < table.absolute_error <= table.relative_error * table.sup


def test_table_extrapolation(table):
    assert table(1e-7)[()] == pytest.approx(table.values[0])
    assert table(1e3)[()] == pytest.approx(table.values[-1] * 1e-2)
    assert table(-0.5)[()] == table(0.5)[()]


def test_table_mass_is_half_the_variance(table):
    mass = table.mass(0.0)

    assert mass.value == pytest.approx(0.5, rel=1e-3)
    assert mass.converged


def test_cell_masses_add_up(table):
    edges = np.array([0.0, 1e-3, 0.1, 1.0, 10.0, 100.0])

    values, errors = table.cell_masses(edges)

    assert values.sum() == pytest.approx(table.mass(0.0, 100.0).value, rel=1e-9)
    assert errors.shape == (5,)
    with pytest.raises(InvalidInputError):
        table.cell_masses(np.array([0.0, 1e3]))


def test_table_rejects_bad_range(model):
    with pytest.raises(InvalidInputError):
        SpectralTable(model, 2.0, 1e2, 8)
    with pytest.raises(InvalidInputError):
        SpectralTable(model, 1e-4, 1e2, 2)


def test_integrability_of_exponential_model(model, table):
    report = check_integrability(model, omega_max=1e2, table=table)

    assert report.finite
    assert report.total == pytest.approx(1.0, rel=1e-3)
    assert report.tail_majorant < 1e-5


def test_shared_table_is_built_once():
    model = SpectralModel(make_exponential(3.0))
    shared_table.cache_clear()

    with patch("stages.spectral_density.table.SpectralTable") as mock_table:
        first = shared_table(model)
        second = shared_table(model)

    assert first is second
    mock_table.assert_called_once_with(model, tol=None)
    shared_table.cache_clear()
