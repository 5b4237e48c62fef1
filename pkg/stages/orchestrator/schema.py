from typing import Any, Literal

from pydantic import BaseModel, Field

TOLERANCE_CHECKS = frozenset({"transform", "spectrum_converged", "msd_converged"})


class CheckSummary(BaseModel):
    name: str = Field(description="Check identifier, e.g. assumption:tail or msd_converged")
    verdict: Literal["pass", "fail", "inconclusive"]
    detail: str = ""


class AsymptoteSummary(BaseModel):
    trend: str
    constant: float
    predicted_rate: float | None
    rate_marker: str


class DeviationSummary(BaseModel):
    fitted: float | None
    verdict: Literal["pass", "fail", "inconclusive"]
    predicted: float | None = None
    window: tuple[float, float] | None = None


class LabReport(BaseModel):
    """JSON summary written by the ``report`` subcommand."""

    kernel: dict[str, Any]
    model: dict[str, Any]
    regime: dict[str, Any]
    asymptote: AsymptoteSummary
    deviation: DeviationSummary
    checks: list[CheckSummary] = Field(default_factory=list)
    near_zero: dict[str, Any] | None = None
    integrability: dict[str, Any] | None = None
    classification: dict[str, Any] | None = None
    msd: list[dict[str, float]] = Field(default_factory=list)

    def unmet_tolerances(self) -> list[CheckSummary]:
        """Transform and MSD checks whose values missed the requested tolerance."""
        return [c for c in self.checks if c.name in TOLERANCE_CHECKS and c.verdict != "pass"]
