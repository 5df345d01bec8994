"""
Error types with helpful messages for the spectral-density workbench.

Every error carries a machine-readable ``category`` so the CLI and the MCP
tools can report failures as a small JSON document instead of a traceback.
"""

import json
from typing import Any, Dict, Optional


class AnalysisError(Exception):
    """Base class for every error raised by stokes_sd."""

    category = "analysis"

    def __init__(self, message: str, **details: Any):
        super().__init__(message)
        self.message = message
        self.details = details

    def to_dict(self) -> Dict[str, Any]:
        return {
            "error": self.category,
            "message": self.message,
            "details": self.details,
            "hint": suggest_fix(self.category),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, default=str)


class ValidationError(AnalysisError):
    """Custom exception for invalid inputs with helpful messages."""

    category = "validation"


class DomainError(ValidationError):
    """An argument lies outside the domain of the requested quantity."""

    category = "domain"


class ParseError(ValidationError):
    """A data file could not be read; ``line`` points at the offending row."""

    category = "parse"

    def __init__(self, message: str, line: Optional[int] = None, **details: Any):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message, line=line, **details)
        self.line = line


class UsageError(ValidationError):
    category = "usage"


class PresetLookupError(ValidationError):
    category = "lookup"

    def __init__(self, name: str, valid_names: list):
        super().__init__(
            f"Unknown preset '{name}'. Valid presets: {', '.join(valid_names)}",
            name=name,
            valid=valid_names,
        )


class ResolutionError(AnalysisError):
    """A grid is too coarse for the requested transform."""

    category = "resolution"


class TailNeededError(AnalysisError):
    category = "tail-needed"


class TailFitError(AnalysisError):
    category = "tail-fit"


class NonConvergenceError(AnalysisError):
    category = "non-convergence"

    def __init__(self, message: str, best_residual: Optional[float] = None, **details: Any):
        super().__init__(message, best_residual=best_residual, **details)
        self.best_residual = best_residual


class RankDeficiencyError(AnalysisError):
    category = "rank-deficiency"


class ZetaAccuracyError(AnalysisError):
    category = "zeta-accuracy"

    def __init__(self, message: str, estimate: float, **details: Any):
        super().__init__(message, estimate=estimate, **details)
        self.estimate = estimate


class TruncationError(AnalysisError):
    category = "truncation"

    def __init__(self, message: str, estimate: float, **details: Any):
        super().__init__(message, estimate=estimate, **details)
        self.estimate = estimate


def suggest_fix(category: str, context: str = "") -> str:
    """
    Suggest fixes for common error patterns.
    """
    suggestions = {
        "domain": "Check parameter ranges: omega_c, omega_ph, delta_s > 0 and s > 0; times must be >= 0",
        "parse": "CSV files need a header row (t_ps,S[,sigma]), comma separators and dot decimals",
        "usage": "Run the subcommand with --help to see the accepted flags",
        "lookup": "Use the 'presets' subcommand (or list_presets tool) to see registered names",
        "resolution": "Use a denser frequency grid (refine_omega_grid) or a shorter time window",
        "tail-needed": "Pass --tail algebraic or --tail exponential, or extend the measurement window",
        "tail-fit": "Check that the last 20% of samples decay and are positive",
        "non-convergence": "Try normalizing the data (--normalize) or loosen the fit options",
        "rank-deficiency": "The data is flat; no decay time can be identified",
        "zeta-accuracy": "Reduce |Im q| (shorter times or higher temperature) or relax zeta_tolerance",
        "truncation": "Extend the time grid until exp(-Re g) has decayed",
    }
    base = suggestions.get(category, "Check the inputs and try again")
    if context:
        base += f"\nContext: {context}"
    return base


def format_error(error: AnalysisError) -> str:
    """
    Format an error with its category and a recovery hint.
    """
    return f"""
Error ({error.category}): {error.message}

Hint: {suggest_fix(error.category)}
"""


def validate_tool_call(tool_name: str, params: Dict[str, Any]) -> None:
    """
    Check tool arguments against the tool's schema; raises UsageError listing every problem.
    """
    from stokes_sd.schemas import ALL_SCHEMAS, validate_params

    if tool_name not in ALL_SCHEMAS:
        raise UsageError(f"Unknown tool '{tool_name}'. Available tools: {', '.join(ALL_SCHEMAS)}")

    supplied = {name: value for name, value in params.items() if value is not None}
    errors = validate_params(supplied, ALL_SCHEMAS[tool_name])
    if errors:
        raise UsageError(
            f"Validation failed for {tool_name}:\n" + "\n".join(f"• {e}" for e in errors),
            errors=errors,
        )
