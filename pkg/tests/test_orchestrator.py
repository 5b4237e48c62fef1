from unittest.mock import MagicMock, patch

import numpy as np
import pytest
from pydantic import ValidationError

from shared.config import build_run_config
from shared.errors import AssumptionError, InvalidInputError
from shared.kernels import Diffusive, MemoryKernel, make_exponential
from stages.msd_engine import AsymptoteSpec, MsdCurve
from stages.orchestrator import REPORT_STEPS, CheckSummary, LabReport, Step, build_report, run_pipeline
from stages.orchestrator.pipeline import _asymptote, _deviation
from stages.spectral_density import SpectralModel


def config_for(**extra):
    flat = {"kernel.family": "exponential", **extra}
    return build_run_config(flat)


def test_report_steps_order():
    names = [step.name for step in REPORT_STEPS]

    assert names == ["validate", "transform", "spectrum", "msd", "asymptote", "deviation"]


def test_run_pipeline_threads_state_through_steps():
    calls = []

    def first(state):
        calls.append("first")
        state["value"] = 1

    def second(state):
        calls.append("second")
        state["value"] += 1

    state = run_pipeline([Step("first", first), Step("second", second)], {})

    assert calls == ["first", "second"]
    assert state["value"] == 2


def test_run_pipeline_stops_on_failure():
    later = MagicMock()

    def broken(state):
        raise InvalidInputError("bad input")

    with pytest.raises(InvalidInputError):
        run_pipeline([Step("broken", broken), Step("later", later)], {})
    later.assert_not_called()


def test_failed_assumptions_stop_before_transforms():
    truncated = MemoryKernel(
        name="truncated", evaluate=lambda t: np.where(t < 1.0, np.exp(-t), 0.0), regime=Diffusive()
    )
    config = config_for(**{"validate.omegas": "1"})

    with patch("stages.orchestrator.pipeline.transform_grid") as mock_transform:
        with pytest.raises(AssumptionError, match="positivity"):
            build_report(config, truncated, SpectralModel(truncated))

    mock_transform.assert_not_called()


def test_asymptote_step_requires_a_law():
    curve = MagicMock(asymptote=None)
    kernel = make_exponential(1.0)

    with pytest.raises(InvalidInputError):
        _asymptote({"curve": curve, "kernel": kernel})


def test_deviation_step_records_checks():
    kernel = make_exponential(1.0)
    spec = AsymptoteSpec(regime="diffusive", trend="t", constant=2.0, predicted_rate=1.0, rate_marker="t^-1")
    t = np.geomspace(10.0, 1e5, 13)
    curve = MsdCurve(t, 2.0 * t - 1.0, np.zeros_like(t), SpectralModel(kernel), spec, [True] * t.size)
    state = {"config": config_for(), "curve": curve, "kernel": kernel, "asymptote": spec}

    _deviation(state)

    verdicts = {check.name: check.verdict for check in state["checks"]}
    assert verdicts == {"deviation": "pass", "classification": "pass"}
    assert state["deviation"].fitted == pytest.approx(1.0)


def test_deviation_step_on_a_curve_with_a_ballistic_start():
    kernel = make_exponential(1.0)
    spec = AsymptoteSpec(regime="diffusive", trend="t", constant=2.0, predicted_rate=1.0, rate_marker="t^-1")
    t = np.geomspace(1e-2, 1e4, 25)
    values = 2.0 * t * (1.0 - np.exp(-t))
    curve = MsdCurve(t, values, np.zeros_like(t), SpectralModel(kernel), spec, [True] * t.size)
    state = {"config": config_for(), "curve": curve, "kernel": kernel, "asymptote": spec}

    _deviation(state)

    verdicts = {check.name: check.verdict for check in state["checks"]}
    assert verdicts == {"deviation": "pass", "classification": "pass"}
    assert state["deviation"].window[0] == pytest.approx(1e-2)


def test_unmet_tolerances_lists_convergence_checks_only():
    report = LabReport(
        kernel={},
        model={},
        regime={},
        asymptote={"trend": "t", "constant": 2.0, "predicted_rate": 1.0, "rate_marker": "t^-1"},
        deviation={"fitted": None, "verdict": "inconclusive"},
        checks=[
            CheckSummary(name="transform", verdict="pass"),
            CheckSummary(name="msd_converged", verdict="inconclusive", detail="2 of 25 above tolerance"),
            CheckSummary(name="deviation", verdict="inconclusive"),
        ],
    )

    assert [c.name for c in report.unmet_tolerances()] == ["msd_converged"]


def test_check_summary_rejects_unknown_verdict():
    with pytest.raises(ValidationError):
        CheckSummary(name="x", verdict="maybe")


@pytest.mark.slow
def test_exponential_report():
    kernel = make_exponential(1.0)
    config = config_for(**{"transform.omegas": "geom:1e-2:1e2:5", "spectrum.omegas": "geom:1e-2:1e2:5"})

    report = build_report(config, kernel, SpectralModel(kernel))

    assert isinstance(report, LabReport)
    assert report.asymptote.constant == pytest.approx(2.0)
    assert report.deviation.verdict == "pass"
    assert report.deviation.fitted >= 0.8
    assert all(check.verdict == "pass" for check in report.checks if check.name.startswith("assumption"))
    assert {c.name: c.verdict for c in report.checks}["classification"] == "pass"
    assert len(report.msd) == 25
    assert report.msd[0]["t"] == pytest.approx(1e-2)
