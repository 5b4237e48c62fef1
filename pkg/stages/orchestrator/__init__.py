from .pipeline import REPORT_STEPS, Step, build_report, run_pipeline
from .schema import AsymptoteSummary, CheckSummary, DeviationSummary, LabReport

__all__ = [
    "REPORT_STEPS",
    "AsymptoteSummary",
    "CheckSummary",
    "DeviationSummary",
    "LabReport",
    "Step",
    "build_report",
    "run_pipeline",
]
