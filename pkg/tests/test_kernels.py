import math

import numpy as np
import pytest

from shared.errors import InvalidInputError
from shared.kernels import (
    Critical,
    Diffusive,
    KernelRegistry,
    Subdiffusive,
    Unclassified,
    make_exponential,
    make_power_law,
    make_pure_power,
    make_tabulated,
    tail_from_section,
)


def test_exponential_values_and_closed_forms():
    kernel = make_exponential(2.0)

    assert kernel(np.array([0.0, 1.0]))[1] == pytest.approx(math.exp(-2.0))
    assert isinstance(kernel.regime, Diffusive)
    assert kernel.regime.gamma0 == 2.0
    assert kernel.closed_form_kcos(1.0) == pytest.approx(2.0 / 5.0)
    assert kernel.closed_form_ksin(-1.0) == pytest.approx(-1.0 / 5.0)


def test_exponential_rejects_nonpositive_rate():
    with pytest.raises(InvalidInputError):
        make_exponential(0.0)


def test_power_law_regimes():
    sub = make_power_law(0.5)
    critical = make_power_law(1.0, scale=2.0)

    assert isinstance(sub.regime, Subdiffusive)
    assert sub.regime.alpha == 0.5
    assert sub.regime.eta == pytest.approx(0.5)
    assert not sub.has_closed_form
    assert isinstance(critical.regime, Critical)
    assert critical.regime.c1 == 2.0
    assert critical.value(9.0) == pytest.approx(0.2)


def test_critical_closed_forms_small_frequency():
    kernel = make_power_law(1.0)

    # K_sin -> pi / 2 and K_cos ~ |log w| as w -> 0
    assert kernel.closed_form_ksin(1e-6) == pytest.approx(math.pi / 2, rel=1e-4)
    assert kernel.closed_form_kcos(1e-6) / abs(math.log(1e-6)) == pytest.approx(1.0, rel=0.05)


@pytest.mark.parametrize("alpha", [0.0, 1.5, -0.2])
def test_power_law_rejects_exponent_outside_range(alpha):
    with pytest.raises(InvalidInputError):
        make_power_law(alpha)


def test_pure_power_is_singular_with_exact_tail():
    kernel = make_pure_power(0.5)

    assert kernel.singular_at_origin
    assert kernel.singularity_exponent == 0.5
    assert math.isinf(kernel.regime.rate_exponent)
    assert kernel.closed_form_kcos(1.0) == pytest.approx(math.sqrt(math.pi / 2))
    assert kernel.closed_form_ksin(1.0) == pytest.approx(math.sqrt(math.pi / 2))


@pytest.mark.parametrize("alpha", [0.25, 0.5, 1.0])
def test_power_law_tail_approach_is_within_inverse_time(alpha):
    t = 10.0 ** np.random.default_rng(11).uniform(-2.0, 6.0, 200)

    gap = np.abs(t**alpha * make_power_law(alpha)(t) - 1.0)

    assert np.all(gap <= 1.0 / t)


def test_pure_power_tail_is_exact():
    t = 10.0 ** np.random.default_rng(11).uniform(-2.0, 6.0, 200)

    assert np.allclose(np.sqrt(t) * make_pure_power(0.5)(t), 1.0, rtol=1e-12, atol=0.0)


def test_pure_power_rejects_alpha_one():
    with pytest.raises(InvalidInputError):
        make_pure_power(1.0)


def _samples(n=12):
    t = np.geomspace(0.01, 50.0, n)
    return np.column_stack([t, np.power(1.0 + t, -4.0)])


def test_tabulated_interpolates_in_log_log_space():
    t = np.geomspace(0.1, 100.0, 10)
    kernel = make_tabulated(np.column_stack([t, t**-0.5]), Subdiffusive(alpha=0.5))

    assert kernel.value(3.7) == pytest.approx(3.7**-0.5, rel=1e-12)
    # beyond the table the declared tail continues the last sample
    assert kernel.value(400.0) == pytest.approx(400.0**-0.5, rel=1e-12)
    assert kernel.value(0.01) == pytest.approx(0.1**-0.5)


def test_tabulated_origin_sample_joins_linearly():
    samples = np.vstack([[0.0, 1.0], _samples()])
    kernel = make_tabulated(samples, Diffusive(beta0=2.0))

    half = 0.5 * samples[1, 0]
    assert kernel.value(half) == pytest.approx(0.5 * (1.0 + samples[1, 1]))


def test_tabulated_unclassified_tail_refuses_extrapolation():
    kernel = make_tabulated(_samples(), Unclassified())

    with pytest.raises(InvalidInputError):
        kernel(np.array([100.0]))


def test_tabulated_decrease_onset_is_declared():
    t = np.arange(1.0, 11.0)
    k = np.array([1.0, 2.0, 1.5, 1.2, 1.0, 0.8, 0.6, 0.5, 0.4, 0.3])

    assert make_tabulated(np.column_stack([t, k]), Diffusive()).decrease_onset == 0.0
    assert make_tabulated(np.column_stack([t, k]), Diffusive(), decrease_onset=2.0).decrease_onset == 2.0
    with pytest.raises(InvalidInputError, match="onset"):
        make_tabulated(np.column_stack([t, k]), Diffusive(), decrease_onset=10.0)


@pytest.mark.parametrize(
    "samples, message",
    [
        (np.ones((4, 2)), "at least"),
        (np.array([[float(i), -1.0] for i in range(1, 10)]), "nonnegative"),
        (np.array([[1.0, 1.0]] * 9), "increasing"),
    ],
)
def test_tabulated_validation(samples, message):
    with pytest.raises(InvalidInputError, match=message):
        make_tabulated(samples, Diffusive())


def test_registry_builds_built_in_families():
    registry = KernelRegistry.instance()

    assert {"exponential", "power_law", "pure_power", "tabulated"} <= set(registry.families())
    kernel = registry.from_config({"family": "power_law", "alpha": "0.5", "scale": "2"})
    assert kernel.parameters == {"alpha": 0.5, "scale": 2.0}


def test_registry_unknown_family():
    with pytest.raises(InvalidInputError, match="Unknown kernel family"):
        KernelRegistry.instance().from_config({"family": "gaussian"})


def test_registry_register_new_family():
    registry = KernelRegistry()
    registry.register("fast_exponential", lambda section: make_exponential(10.0))

    assert registry.create("fast_exponential").parameters["lambda"] == 10.0


def test_registry_tabulated_reads_table(tmp_path):
    path = tmp_path / "k.csv"
    rows = "\n".join(f"{float(t)!r},{float(k)!r}" for t, k in _samples())
    path.write_text("t,K\n" + rows + "\n", encoding="utf-8")

    kernel = KernelRegistry.instance().from_config(
        {"family": "tabulated", "table_path": str(path), "tail": "diffusive", "beta0": "2"}
    )

    assert isinstance(kernel.regime, Diffusive)
    assert kernel.value(1.0) == pytest.approx(1.0 / 16.0, rel=0.05)


def test_tail_from_section():
    assert tail_from_section({"tail": "critical", "c1": "3"}) == Critical(c1=3.0)
    assert isinstance(tail_from_section({}), Unclassified)
    with pytest.raises(InvalidInputError):
        tail_from_section({"tail": "subdiffusive"})
