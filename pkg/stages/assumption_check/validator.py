import logging
import math
from collections.abc import Sequence
from dataclasses import asdict, dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any

import numpy as np

from shared.errors import AssumptionError, InvalidInputError, LabError
from shared.kernels import Critical, Diffusive, MemoryKernel, Subdiffusive
from shared.numerics import decades, fit_power_law
from shared.utils.file_loader import load_stage_defaults
from stages.oscillatory_transform import kcos, validate_grid

logger = logging.getLogger(__name__)

DEFAULTS = load_stage_defaults(
    Path(__file__).with_name("defaults.yaml"),
    {
        "min_decades": 4.0,
        "relative_tolerance": 0.1,
        "underflow_level": 1e-250,
        "kcos_omegas": [1e-3, 1e3, 13],
        "tol": 1e-8,
        "min_tail_points": 4,
    },
)


class Verdict(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class ConditionVerdict:
    condition: str
    verdict: Verdict
    # grid indices (time or frequency grid) that produced the verdict
    evidence: list[int]
    detail: str
    estimates: dict[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class AssumptionReport:
    kernel: str
    regime: str
    conditions: list[ConditionVerdict]
    tail_constant: float | None = None
    rate_exponent: float | None = None

    @property
    def verdict(self) -> Verdict:
        verdicts = {c.verdict for c in self.conditions}
        if Verdict.FAIL in verdicts:
            return Verdict.FAIL
        if Verdict.INCONCLUSIVE in verdicts:
            return Verdict.INCONCLUSIVE
        return Verdict.PASS

    def condition(self, name: str) -> ConditionVerdict:
        for c in self.conditions:
            if c.condition == name:
                return c
        raise KeyError(name)

    def raise_on_fail(self) -> None:
        failed = [c for c in self.conditions if c.verdict is Verdict.FAIL]
        if failed:
            raise AssumptionError(
                f"Kernel {self.kernel} fails " + "; ".join(f"{c.condition}: {c.detail}" for c in failed)
            )

    def as_dict(self) -> dict[str, Any]:
        data = asdict(self)
        data["verdict"] = self.verdict.value
        for c in data["conditions"]:
            c["verdict"] = c["verdict"].value
        return data


def _underflows(times: np.ndarray, values: np.ndarray, positive: np.ndarray, zero: int) -> bool:
    last = positive[-1]
    if values[last] < float(DEFAULTS["underflow_level"]):
        return True
    if positive.size < 2:
        return False
    # log-log extrapolation of the last two positive samples to the first zero
    prev = positive[-2]
    slope = math.log(values[last] / values[prev]) / math.log(times[last] / times[prev])
    predicted = math.log(values[last]) + slope * math.log(times[zero] / times[last])
    return predicted < math.log(float(np.finfo(float).smallest_subnormal))


def _positivity(times: np.ndarray, values: np.ndarray) -> ConditionVerdict:
    bad = np.nonzero(~np.isfinite(values) | (values < 0))[0]
    zeros = np.nonzero(values == 0)[0]
    if zeros.size:
        positive = np.nonzero(values > 0)[0]
        trailing = bool(positive.size) and zeros[0] > positive[-1]
        underflow = trailing and _underflows(times, values, positive, int(zeros[0]))
        if not underflow:
            bad = np.union1d(bad, zeros)
    if bad.size:
        return ConditionVerdict(
            "positivity", Verdict.FAIL, bad.tolist(), f"K(t) <= 0 or non-finite at t={times[bad[0]]:g}"
        )
    return ConditionVerdict("positivity", Verdict.PASS, [0, int(times.size - 1)], "K(t) > 0 on the grid")


def _eventual_decrease(kernel: MemoryKernel, times: np.ndarray, values: np.ndarray) -> ConditionVerdict:
    increases = np.nonzero(np.diff(values) > 0)[0] + 1
    late = increases[times[increases] > kernel.decrease_onset]
    if late.size:
        last = int(late[-1])
        return ConditionVerdict(
            "eventual_decrease",
            Verdict.FAIL,
            late.tolist(),
            f"K increases at t={times[last]:g} (index {last}), past the decrease onset {kernel.decrease_onset:g}",
            {"last_violation_time": float(times[last]), "last_violation_index": float(last)},
        )
    last = int(increases[-1]) if increases.size else -1
    return ConditionVerdict(
        "eventual_decrease",
        Verdict.PASS,
        [last] if last >= 0 else [],
        "K is non-increasing past the decrease onset",
        {"last_violation_time": float(times[last]) if last >= 0 else 0.0},
    )


def _aitken(g: np.ndarray) -> float:
    g1, g2, g3 = g[-3:]
    denominator = (g3 - g2) - (g2 - g1)
    if denominator == 0:
        return float(g3)
    return float(g3 - (g3 - g2) ** 2 / denominator)


def _tail(
    kernel: MemoryKernel, times: np.ndarray, values: np.ndarray
) -> tuple[ConditionVerdict, float | None, float | None]:
    regime = kernel.regime
    rel = float(DEFAULTS["relative_tolerance"])
    span = decades(times)
    if span < float(DEFAULTS["min_decades"]):
        return (
            ConditionVerdict(
                "tail", Verdict.INCONCLUSIVE, [], f"grid spans {span:.2f} decades, need {DEFAULTS['min_decades']}"
            ),
            None,
            None,
        )

    if isinstance(regime, Diffusive):
        weighted = np.power(times, regime.beta0 + 1.0) * values
        peak = int(np.argmax(weighted))
        end = int(times.size - 1)
        c_hat = float(times[-1] * values[-1])
        decayed = weighted[-1] <= rel * weighted[peak]
        verdict = Verdict.PASS if decayed and abs(c_hat) <= rel else Verdict.FAIL
        detail = f"t K(t) -> {c_hat:.3g}; t^(beta0+1) K(t) falls to {weighted[-1]:.3g} from {weighted[peak]:.3g}"
        return ConditionVerdict("tail", verdict, [peak, end], detail, {"tail_constant": c_hat}), c_hat, None

    if not isinstance(regime, Subdiffusive | Critical):
        return ConditionVerdict("tail", Verdict.INCONCLUSIVE, [], "unclassified regime"), None, None

    kappa = float(regime.tail_weight)
    declared_c = float(regime.tail_constant)
    declared_rate = float(regime.rate_exponent)
    g = np.power(times, kappa) * values
    c_hat = _aitken(g)
    upper = np.nonzero(times >= math.sqrt(times[0] * times[-1]))[0]
    deviation = np.abs(g[upper] - c_hat)
    resolved = deviation > 1e-12 * abs(c_hat)
    constant_ok = abs(c_hat - declared_c) <= rel * declared_c
    estimates = {"tail_constant": c_hat}

    if np.count_nonzero(resolved) < int(DEFAULTS["min_tail_points"]):
        rate = math.inf
        rate_ok = True
        evidence = upper.tolist()
    else:
        fit = fit_power_law(times[upper][resolved], deviation[resolved])
        rate = -fit.slope
        rate_ok = rate >= (1.0 - rel) * declared_rate if math.isfinite(declared_rate) else False
        evidence = upper[resolved].tolist()
    estimates["rate_exponent"] = rate

    verdict = Verdict.PASS if constant_ok and rate_ok else Verdict.FAIL
    detail = (
        f"t^{kappa:g} K(t) -> {c_hat:.6g} (declared {declared_c:g}), "
        f"rate {rate:.3g} (declared {'exact' if math.isinf(declared_rate) else f'{declared_rate:g}'})"
    )
    return ConditionVerdict("tail", verdict, evidence, detail, estimates), c_hat, rate


def _kcos_positivity(kernel: MemoryKernel, omegas: np.ndarray, tol: float) -> ConditionVerdict:
    negative: list[int] = []
    unresolved: list[int] = []
    for i, omega in enumerate(omegas):
        try:
            result = kcos(kernel, float(omega), tol)
        except LabError as e:
            logger.warning("K_cos(%g) of %s not computable: %s", omega, kernel.name, e)
            unresolved.append(i)
            continue
        if result.value + result.abs_error <= 0:
            negative.append(i)
        elif result.value - result.abs_error <= 0:
            unresolved.append(i)
    if negative:
        detail = f"K_cos <= 0 at omega={omegas[negative[0]]:g}"
        return ConditionVerdict("kcos_positivity", Verdict.FAIL, negative, detail)
    if unresolved:
        return ConditionVerdict("kcos_positivity", Verdict.INCONCLUSIVE, unresolved, "K_cos not resolved away from 0")
    every = list(range(omegas.size))
    return ConditionVerdict("kcos_positivity", Verdict.PASS, every, "K_cos > 0 on the frequency grid")


def validate_assumptions(
    kernel: MemoryKernel,
    grid: Sequence[float] | np.ndarray,
    omegas: Sequence[float] | np.ndarray | None = None,
    tol: float | None = None,
) -> AssumptionReport:
    """Grid checks of positivity, eventual decrease, the declared tail law and K_cos positivity."""
    times = validate_grid(grid, "time")
    if times.size < 3:
        raise InvalidInputError("Assumption validation needs at least three grid times")
    if omegas is None:
        lo, hi, n = DEFAULTS["kcos_omegas"]
        omegas = np.geomspace(float(lo), float(hi), int(n))
    frequencies = validate_grid(omegas)
    tol = float(DEFAULTS["tol"]) if tol is None else tol

    values = kernel(times)
    tail, c_hat, rate = _tail(kernel, times, values)
    conditions = [
        _positivity(times, values),
        _eventual_decrease(kernel, times, values),
        tail,
        _kcos_positivity(kernel, frequencies, tol),
    ]
    report = AssumptionReport(kernel.name, kernel.regime.name, conditions, c_hat, rate)
    for c in conditions:
        if c.verdict is Verdict.INCONCLUSIVE:
            logger.warning("Condition %s inconclusive for %s: %s", c.condition, kernel.name, c.detail)
    logger.info("Assumption check of %s: %s", kernel.name, report.verdict.value)
    return report
