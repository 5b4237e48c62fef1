import numpy as np
import pytest

from shared.errors import AssumptionError, InvalidInputError
from shared.kernels import Diffusive, MemoryKernel, Subdiffusive, make_exponential, make_power_law, make_tabulated
from stages.assumption_check import Verdict, validate_assumptions

WIDE = np.geomspace(1e-2, 1e6, 33)
FEW_OMEGAS = [1e-2, 1.0, 1e2]


def test_exponential_passes_despite_underflow():
    report = validate_assumptions(make_exponential(1.0), WIDE, FEW_OMEGAS)

    assert report.verdict is Verdict.PASS
    assert report.condition("positivity").verdict is Verdict.PASS
    assert report.tail_constant == 0.0
    report.raise_on_fail()


def test_subdiffusive_power_law_tail_estimates():
    report = validate_assumptions(make_power_law(0.5), WIDE, FEW_OMEGAS)

    assert report.verdict is Verdict.PASS
    assert report.tail_constant == pytest.approx(1.0, rel=1e-3)
    assert report.rate_exponent == pytest.approx(1.0, rel=0.1)


def test_positivity_failure_is_raised():
    truncated = MemoryKernel(
        name="truncated", evaluate=lambda t: np.where(t < 1.0, np.exp(-t), 0.0), regime=Diffusive()
    )

    report = validate_assumptions(truncated, WIDE, [1.0])

    positivity = report.condition("positivity")
    assert positivity.verdict is Verdict.FAIL
    assert WIDE[positivity.evidence[0]] >= 1.0
    with pytest.raises(AssumptionError, match="positivity"):
        report.raise_on_fail()


def test_eventual_decrease_failure_reports_last_violation():
    wavy = MemoryKernel(name="wavy", evaluate=lambda t: (2.0 + np.sin(t)) / (1.0 + t) ** 2, regime=Diffusive())
    times = np.geomspace(1.0, 1e4, 200)

    report = validate_assumptions(wavy, times, [1.0])

    decrease = report.condition("eventual_decrease")
    assert decrease.verdict is Verdict.FAIL
    assert decrease.estimates["last_violation_time"] > 1.0


def test_late_bump_in_a_table_fails_eventual_decrease():
    t = np.geomspace(1e-1, 1e4, 41)
    k = np.power(1.0 + t, -2.0)
    k[35] *= 3.0
    kernel = make_tabulated(np.column_stack([t, k]), Diffusive(beta0=0.5))

    report = validate_assumptions(kernel, t, [1.0])

    decrease = report.condition("eventual_decrease")
    assert kernel.decrease_onset == 0.0
    assert decrease.verdict is Verdict.FAIL
    assert decrease.evidence == [35]
    assert decrease.estimates["last_violation_index"] == 35
    assert decrease.estimates["last_violation_time"] == pytest.approx(t[35])


def test_declared_onset_excuses_an_early_rise():
    t = np.geomspace(1e-1, 1e4, 41)
    k = np.power(1.0 + t, -2.0)
    k[2] *= 1.5
    samples = np.column_stack([t, k])

    strict = validate_assumptions(make_tabulated(samples, Diffusive(beta0=0.5)), t, [1.0])
    declared = validate_assumptions(make_tabulated(samples, Diffusive(beta0=0.5), decrease_onset=1.0), t, [1.0])

    assert strict.condition("eventual_decrease").verdict is Verdict.FAIL
    assert declared.condition("eventual_decrease").verdict is Verdict.PASS


def test_declared_tail_constant_mismatch_fails():
    base = make_power_law(0.5)
    mislabeled = MemoryKernel(name="mislabeled", evaluate=base.evaluate, regime=Subdiffusive(alpha=0.5, c_alpha=2.0))

    report = validate_assumptions(mislabeled, WIDE, FEW_OMEGAS)

    assert report.condition("tail").verdict is Verdict.FAIL
    assert report.verdict is Verdict.FAIL


def test_short_grid_is_inconclusive():
    report = validate_assumptions(make_power_law(0.5), np.geomspace(1.0, 100.0, 5), [1.0])

    assert report.condition("tail").verdict is Verdict.INCONCLUSIVE
    assert report.verdict is Verdict.INCONCLUSIVE
    report.raise_on_fail()


def test_report_serializes_verdicts():
    data = validate_assumptions(make_exponential(1.0), WIDE, [1.0]).as_dict()

    assert data["verdict"] == "pass"
    names = {c["condition"] for c in data["conditions"]}
    assert names == {"positivity", "eventual_decrease", "tail", "kcos_positivity"}
    assert all(isinstance(c["verdict"], str) for c in data["conditions"])


def test_needs_three_times():
    with pytest.raises(InvalidInputError):
        validate_assumptions(make_exponential(1.0), [1.0, 2.0])
