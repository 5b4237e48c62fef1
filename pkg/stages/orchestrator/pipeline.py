"""
Report Orchestrator

Runs the stages in sequence over a shared state dictionary:
- validate → transform → spectrum → msd → asymptote → deviation
- near-zero and integrability checks of the spectral density ride along
- a failed assumption check stops the chain before any expensive stage
"""

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass
from typing import Any

from shared.errors import InvalidInputError, LabError
from shared.kernels import Critical, MemoryKernel, Subdiffusive
from stages.assumption_check import Verdict, validate_assumptions
from stages.msd_engine import classify_from_msd, deviation_fit, msd_curve
from stages.oscillatory_transform import transform_grid
from stages.spectral_density import SpectralModel, check_integrability, rhat_grid, rhat_near_zero, shared_table

from .schema import AsymptoteSummary, CheckSummary, DeviationSummary, LabReport

logger = logging.getLogger(__name__)

State = dict[str, Any]


@dataclass(frozen=True)
class Step:
    name: str
    run: Callable[[State], None]


def _check(state: State, name: str, verdict: str, detail: str = "") -> None:
    state.setdefault("checks", []).append(CheckSummary(name=name, verdict=verdict, detail=detail))
    if verdict != "pass":
        logger.warning("Check %s: %s %s", name, verdict, detail)


def _validate(state: State) -> None:
    config = state["config"]
    report = validate_assumptions(
        state["kernel"], config.validate_.times, config.validate_.omegas or None, config.validate_.tol
    )
    for condition in report.conditions:
        _check(state, f"assumption:{condition.condition}", condition.verdict.value, condition.detail)
    if report.verdict is Verdict.FAIL:
        report.raise_on_fail()
    state["assumptions"] = report


def _transform(state: State) -> None:
    config = state["config"]
    rows = transform_grid(state["kernel"], config.transform.omegas, config.transform.tol, config.threads)
    failed = [row for row in rows if row.error]
    loose = [row for row in rows if not row.error and not (row.kcos.converged and row.ksin.converged)]
    if failed:
        _check(state, "transform", "fail", f"{len(failed)} frequencies failed, first: {failed[0].error}")
    elif loose:
        _check(state, "transform", "inconclusive", f"{len(loose)} frequencies above tolerance")
    else:
        _check(state, "transform", "pass", f"{len(rows)} frequencies")
    state["transforms"] = rows


def _spectrum(state: State) -> None:
    config, model = state["config"], state["model"]
    values = rhat_grid(model, config.spectrum.omegas, config.spectrum.tol, config.threads)
    negative = [v.omega for v in values if v.rhat < 0]
    _check(state, "rhat_nonnegative", "fail" if negative else "pass", f"{len(values)} frequencies")
    loose = sum(not v.converged for v in values)
    detail = f"{loose} of {len(values)} above tolerance"
    _check(state, "spectrum_converged", "pass" if not loose else "inconclusive", detail)
    near_zero = rhat_near_zero(model, config.spectrum.tol, threads=config.threads)
    _check(state, "rhat_near_zero", "pass" if near_zero.passed else "fail", near_zero.quantity)
    table = shared_table(model)
    integrability = check_integrability(model, table=table, threads=config.threads)
    detail = f"integral {integrability.total:.6g} +- {integrability.abs_error:.2g}"
    _check(state, "rhat_integrable", "pass" if integrability.finite else "fail", detail)
    state.update(spectrum=values, near_zero=near_zero, integrability=integrability, table=table)


def _msd(state: State) -> None:
    config = state["config"]
    curve = msd_curve(state["model"], config.msd.times, config.msd.tol, state["table"], config.threads)
    loose = curve.converged.count(False)
    _check(state, "msd_converged", "pass" if not loose else "inconclusive", f"{loose} of {len(curve)} above tolerance")
    state["curve"] = curve


def _asymptote(state: State) -> None:
    curve = state["curve"]
    if curve.asymptote is None:
        raise InvalidInputError(f"No asymptotic law for {state['kernel'].name}")
    state["asymptote"] = curve.asymptote


def _expected_exponent(kernel: MemoryKernel) -> float:
    regime = kernel.regime
    return regime.alpha if isinstance(regime, Subdiffusive) else 1.0


def _deviation(state: State) -> None:
    config, curve, kernel = state["config"], state["curve"], state["kernel"]
    fit = deviation_fit(curve, state["asymptote"], config.deviation.slack)
    _check(state, "deviation", fit.verdict, f"{fit.kind} fit over {fit.points} points")
    state["deviation"] = fit
    try:
        found = classify_from_msd(curve)
    except LabError as e:
        _check(state, "classification", "inconclusive", str(e))
        return
    critical = isinstance(kernel.regime, Critical)
    consistent = found.log_corrected == critical and (
        critical or abs(found.alpha_hat - _expected_exponent(kernel)) <= 0.05
    )
    detail = f"alpha_hat {found.alpha_hat:.4g}, log correction {found.log_corrected}"
    _check(state, "classification", "pass" if consistent else "fail", detail)
    state["classification"] = found


REPORT_STEPS = [
    Step("validate", _validate),
    Step("transform", _transform),
    Step("spectrum", _spectrum),
    Step("msd", _msd),
    Step("asymptote", _asymptote),
    Step("deviation", _deviation),
]


def run_pipeline(steps: list[Step], state: State) -> State:
    for step in steps:
        logger.info("Stage %s started", step.name)
        step.run(state)
        logger.info("Stage %s finished", step.name)
    return state


def _finite_or_none(value: float | None) -> float | None:
    return value if value is not None and math.isfinite(value) else None


def build_report(config: Any, kernel: MemoryKernel, model: SpectralModel) -> LabReport:
    """Chain every stage for one kernel and summarise the results."""
    state = run_pipeline(REPORT_STEPS, {"config": config, "kernel": kernel, "model": model})
    asymptote, fit, curve = state["asymptote"], state["deviation"], state["curve"]
    classification = state.get("classification")
    return LabReport(
        kernel=kernel.describe(),
        model={"m": model.m, "beta": model.beta},
        regime=kernel.regime.as_dict(),
        asymptote=AsymptoteSummary(
            trend=asymptote.trend,
            constant=asymptote.constant,
            predicted_rate=asymptote.predicted_rate,
            rate_marker=asymptote.rate_marker,
        ),
        deviation=DeviationSummary(
            fitted=_finite_or_none(fit.fitted), verdict=fit.verdict, predicted=fit.predicted, window=fit.window
        ),
        checks=state["checks"],
        near_zero=state["near_zero"].as_dict(),
        integrability=state["integrability"].as_dict(),
        classification=classification.as_dict() if classification else None,
        msd=[
            {"t": t, "msd": v, "msd_err": e, "trend": g, "ratio": r} for t, v, e, g, r in curve.rows()
        ],
    )
