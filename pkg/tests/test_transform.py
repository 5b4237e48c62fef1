import math

import numpy as np
import pytest
from scipy.special import gamma

from shared.errors import DivergenceError, InvalidInputError
from shared.kernels import (
    Diffusive,
    MemoryKernel,
    Unclassified,
    make_exponential,
    make_power_law,
    make_pure_power,
    make_tabulated,
)
from stages.oscillatory_transform import (
    kcos,
    kernel_integral,
    ksin,
    tail_remainder_bound,
    transform_grid,
    validate_grid,
)


@pytest.mark.parametrize("omega", [1e-3, 0.1, 1.0, 10.0, 1e3])
def test_exponential_matches_closed_form(omega):
    kernel = make_exponential(1.0)

    cos_value = kcos(kernel, omega)
    sin_value = ksin(kernel, omega)

    assert cos_value.value == pytest.approx(kernel.closed_form_kcos(omega), abs=1e-8)
    assert sin_value.value == pytest.approx(kernel.closed_form_ksin(omega), abs=1e-8)
    assert cos_value.converged and sin_value.converged
    assert cos_value.abs_error < 1e-7


@pytest.mark.slow
def test_closed_form_fidelity_on_wide_grid():
    kernels = [make_exponential(1.0), make_power_law(1.0)]
    for kernel in kernels:
        for omega in np.geomspace(1e-3, 1e3, 50):
            assert kcos(kernel, omega).value == pytest.approx(kernel.closed_form_kcos(omega), abs=1e-8)
            assert ksin(kernel, omega).value == pytest.approx(kernel.closed_form_ksin(omega), abs=1e-8)


def test_parity():
    kernel = make_power_law(0.5)

    assert kcos(kernel, -2.0).value == kcos(kernel, 2.0).value
    assert ksin(kernel, -2.0).value == -ksin(kernel, 2.0).value
    assert ksin(kernel, 0.0).value == 0.0


def test_kernel_integral_closed_form_and_numeric():
    cubic = MemoryKernel(name="cubic", evaluate=lambda t: np.power(1.0 + t, -3.0), regime=Diffusive(beta0=2.0))

    assert kcos(make_exponential(2.0), 0.0).value == pytest.approx(0.5)
    result = kernel_integral(cubic)
    assert result.value == pytest.approx(0.5, abs=1e-7)
    assert result.method == "geometric_panels"


@pytest.mark.parametrize("alpha", [0.5, 1.0])
def test_kcos_at_zero_diverges_outside_diffusive_regime(alpha):
    with pytest.raises(DivergenceError):
        kcos(make_power_law(alpha), 0.0)


def test_tail_remainder_bound_inputs():
    kernel = make_exponential(1.0)

    assert tail_remainder_bound(kernel, 1.0, -2.0) == pytest.approx(2.0 * math.exp(-1.0))
    with pytest.raises(InvalidInputError):
        tail_remainder_bound(kernel, 1.0, 0.0)


def _shifted(kernel, T):
    return MemoryKernel(name=f"{kernel.name}+{T}", evaluate=lambda s: kernel.evaluate(s + T), regime=kernel.regime)


@pytest.mark.slow
def test_tail_remainder_bound_is_sound():
    rng = np.random.default_rng(1234)
    for _ in range(100):
        if rng.random() < 0.5:
            rate = rng.uniform(0.5, 2.0)
            kernel = make_exponential(rate)
            T = rng.uniform(0.5, 12.0 / rate)
        else:
            kernel = make_power_law(rng.uniform(0.2, 1.0))
            T = rng.uniform(1.0, 100.0)
        omega = rng.uniform(0.05, 20.0)
        bound = tail_remainder_bound(kernel, T, omega)
        tol = min(1e-8, 1e-3 * bound)

        # int_T^inf K(t) trig(w t) dt through the shifted kernel K(T + s)
        shifted = _shifted(kernel, T)
        c = kcos(shifted, omega, tol).value
        s = ksin(shifted, omega, tol).value
        cos_tail = math.cos(omega * T) * c - math.sin(omega * T) * s
        sin_tail = math.sin(omega * T) * c + math.cos(omega * T) * s

        assert abs(cos_tail) <= bound
        assert abs(sin_tail) <= bound


def test_transform_grid_records_failures():
    t = np.geomspace(0.01, 10.0, 12)
    kernel = make_tabulated(np.column_stack([t, np.exp(-t)]), Unclassified())

    rows = transform_grid(kernel, [1.0, 2.0])

    assert [row.omega for row in rows] == [1.0, 2.0]
    assert all(row.error and row.kcos is None for row in rows)


def test_transform_grid_preserves_order():
    rows = transform_grid(make_exponential(1.0), [0.5, 1.0, 4.0], threads=2)

    assert [row.omega for row in rows] == [0.5, 1.0, 4.0]
    assert rows[2].kcos.value == pytest.approx(1.0 / 17.0, abs=1e-8)


def test_transform_grid_empty():
    assert transform_grid(make_exponential(1.0), []) == []


@pytest.mark.parametrize("grid", [[1.0, 1.0], [2.0, 1.0], [-1.0, 1.0], [1.0, math.nan]])
def test_validate_grid_rejects_bad_grids(grid):
    with pytest.raises(InvalidInputError):
        validate_grid(grid)


@pytest.mark.parametrize("alpha", [0.25, 0.5, 0.75])
def test_pure_power_transforms_match_gamma_form(alpha):
    kernel = make_pure_power(alpha)
    amplitude = gamma(1.0 - alpha)

    for omega in [0.1, 0.5, 1.0, 5.0, 10.0]:
        scale = amplitude * omega ** (alpha - 1.0)
        assert kcos(kernel, omega).value == pytest.approx(scale * math.sin(0.5 * alpha * math.pi), rel=1e-6)
        assert ksin(kernel, omega).value == pytest.approx(scale * math.cos(0.5 * alpha * math.pi), rel=1e-6)


def test_halving_the_tolerance_stays_within_it():
    kernel = make_power_law(0.5)

    for transform in (kcos, ksin):
        coarse = transform(kernel, 1.0, 1e-6)
        fine = transform(kernel, 1.0, 5e-7)
        assert coarse.converged and fine.converged
        assert abs(coarse.value - fine.value) <= 1e-6 + 5e-7


@pytest.mark.slow
@pytest.mark.parametrize(
    "kernel",
    [make_exponential(1.0), make_power_law(0.5), make_power_law(1.0)],
    ids=["exponential", "power_law_0.5", "power_law_1"],
)
def test_transforms_decay_at_high_frequency(kernel):
    assert abs(kcos(kernel, 1e4).value) < 1e-2
    assert abs(ksin(kernel, 1e4).value) < 1e-2


@pytest.mark.slow
def test_pure_power_transforms_decay_only_like_inverse_root():
    # K_cos = K_sin = sqrt(pi / (2 w)) for t^-1/2, just above 1e-2 at w = 1e4
    kernel = make_pure_power(0.5)
    expected = math.sqrt(math.pi / 2e4)

    assert kcos(kernel, 1e4).value == pytest.approx(expected, rel=1e-6)
    assert ksin(kernel, 1e4).value == pytest.approx(expected, rel=1e-6)
    assert expected > 1e-2


@pytest.mark.slow
@pytest.mark.parametrize(
    "kernel",
    [make_exponential(1.0), make_power_law(0.5), make_power_law(1.0), make_pure_power(0.5)],
    ids=["exponential", "power_law_0.5", "power_law_1", "pure_power_0.5"],
)
def test_kcos_is_positive_on_a_dense_grid(kernel):
    for omega in np.geomspace(1e-3, 1e3, 61):
        result = kcos(kernel, omega)
        assert result.value - result.abs_error > 0
