from .validator import AssumptionReport, ConditionVerdict, Verdict, validate_assumptions

__all__ = ["AssumptionReport", "ConditionVerdict", "Verdict", "validate_assumptions"]
