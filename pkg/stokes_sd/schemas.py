"""
JSON Schema definitions for fit options and the MCP tool parameters.

The schemas are checked before any numerical work so that a malformed
options document fails with a list of readable messages.
"""

import json
from typing import Any, Dict, List, Mapping, Optional, Union

from stokes_sd.models.fit import FitOptions
from stokes_sd.validation import UsageError

MODEL_KINDS = ["subohmic", "subohmic-baseline", "gauss-biexp", "ohmic"]

FIT_OPTIONS_SCHEMA = {
    "type": "object",
    "properties": {
        "max_iterations": {
            "type": "integer",
            "description": "Maximum function evaluations per multistart point",
            "minimum": 10
        },
        "ftol": {"type": "number", "description": "Relative cost-reduction tolerance", "exclusiveMinimum": 0},
        "xtol": {"type": "number", "description": "Relative step tolerance", "exclusiveMinimum": 0},
        "gtol": {"type": "number", "description": "Gradient-orthogonality tolerance", "exclusiveMinimum": 0},
        "gradient_tol": {
            "type": "number",
            "description": "Largest first-order optimality accepted as converged",
            "exclusiveMinimum": 0
        },
        "boundary_tol": {
            "type": "number",
            "description": "Distance from a bound reported as boundary-active",
            "exclusiveMinimum": 0
        },
        "ohmic_margin": {
            "type": "number",
            "description": "Sub-Ohmic fits with 1 - s below this hit the Ohmic edge",
            "minimum": 0,
            "maximum": 1
        },
        "omega_c_bounds": {
            "type": "array",
            "description": "[lower, upper] bounds for omega_c in rad/ps",
            "minItems": 2,
            "maxItems": 2,
            "items": {"type": "number", "exclusiveMinimum": 0}
        },
        "constrain_amplitudes": {
            "type": "boolean",
            "description": "Gauss+biexponential: impose a_g + a_1 + a_2 = 1"
        },
        "multistart": {"type": "boolean", "description": "Use the full multistart grid"},
        "use_sigma": {"type": "boolean", "description": "Weight residuals by 1/sigma when available"}
    },
    "required": [],
    "additionalProperties": False
}

FIT_RESPONSE_SCHEMA = {
    "type": "object",
    "properties": {
        "model": {
            "type": "string",
            "enum": MODEL_KINDS,
            "description": "Model family to fit",
            "default": "subohmic"
        },
        "times": {"type": "array", "description": "Sample times in ps, starting at 0", "minItems": 2},
        "values": {"type": "array", "description": "S(t) samples", "minItems": 2},
        "name": {"type": "string", "description": "Name to store the result under", "minLength": 1},
        "options": {"type": "object", "description": "Fit options document (see FIT_OPTIONS_SCHEMA)"}
    },
    "required": ["times", "values"]
}

SYNTHESIZE_SCHEMA = {
    "type": "object",
    "properties": {
        "preset": {"type": "string", "description": "Preset name (see list_presets)", "minLength": 1},
        "t_max": {"type": "number", "description": "Window end in ps", "exclusiveMinimum": 0},
        "n_points": {"type": "integer", "description": "Number of samples", "minimum": 2},
        "noise": {"type": "number", "description": "Gaussian noise sigma", "minimum": 0},
        "seed": {"type": "integer", "description": "Random seed", "minimum": 0},
        "b0": {"type": "number", "description": "Dimensionless baseline"}
    },
    "required": ["preset"]
}

SPECTRUM_SCHEMA = {
    "type": "object",
    "properties": {
        "kind": {
            "type": "string",
            "enum": ["absorption", "fluorescence"],
            "description": "Spectrum type",
            "default": "absorption"
        },
        "temperature_k": {"type": "number", "description": "Temperature in K", "exclusiveMinimum": 0},
        "omega_eg": {"type": "number", "description": "Electronic gap frequency in rad/ps"},
        "t_max": {"type": "number", "description": "Line-shape window in ps", "exclusiveMinimum": 0},
        "n_points": {"type": "integer", "description": "Line-shape samples", "minimum": 2}
    },
    "required": ["temperature_k"]
}


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _check_number(name: str, value: Any, field_schema: Dict[str, Any], errors: List[str]) -> None:
    if not _is_number(value):
        errors.append(f"{name} must be a number, got {type(value).__name__}")
        return
    minimum = field_schema.get("minimum")
    maximum = field_schema.get("maximum")
    exclusive = field_schema.get("exclusiveMinimum")
    if minimum is not None and value < minimum:
        errors.append(f"{name} must be >= {minimum}, got {value}")
    if maximum is not None and value > maximum:
        errors.append(f"{name} must be <= {maximum}, got {value}")
    if exclusive is not None and value <= exclusive:
        errors.append(f"{name} must be > {exclusive}, got {value}")


def validate_params(params: Mapping[str, Any], schema: Dict[str, Any]) -> List[str]:
    """
    Validate parameters against JSON schema and return list of errors.
    """
    errors = []

    for required_field in schema.get("required", []):
        if required_field not in params:
            errors.append(f"Missing required parameter: {required_field}")

    properties = schema.get("properties", {})
    if schema.get("additionalProperties") is False:
        for field_name in params:
            if field_name not in properties:
                errors.append(f"Unknown parameter: {field_name} (accepted: {', '.join(properties)})")

    for field_name, field_schema in properties.items():
        if field_name not in params:
            continue
        value = params[field_name]
        field_type = field_schema.get("type")

        if field_type == "integer":
            if not isinstance(value, int) or isinstance(value, bool):
                errors.append(f"{field_name} must be an integer, got {type(value).__name__}")
            else:
                _check_number(field_name, value, field_schema, errors)

        elif field_type == "number":
            _check_number(field_name, value, field_schema, errors)

        elif field_type == "string":
            if not isinstance(value, str):
                errors.append(f"{field_name} must be a string, got {type(value).__name__}")
            else:
                enum_values = field_schema.get("enum")
                if enum_values and value not in enum_values:
                    errors.append(f"{field_name} must be one of {enum_values}, got '{value}'")
                min_length = field_schema.get("minLength")
                if min_length and len(value) < min_length:
                    errors.append(f"{field_name} must be at least {min_length} characters")

        elif field_type == "boolean":
            if not isinstance(value, bool):
                errors.append(f"{field_name} must be boolean, got {type(value).__name__}")

        elif field_type == "object":
            if not isinstance(value, dict):
                errors.append(f"{field_name} must be an object, got {type(value).__name__}")

        elif field_type == "array":
            if not isinstance(value, (list, tuple)):
                errors.append(f"{field_name} must be an array, got {type(value).__name__}")
                continue
            min_items = field_schema.get("minItems")
            max_items = field_schema.get("maxItems")
            if min_items and len(value) < min_items:
                errors.append(f"{field_name} must have at least {min_items} items")
            if max_items is not None and len(value) > max_items:
                errors.append(f"{field_name} must have at most {max_items} items")
            items = field_schema.get("items")
            if items and items.get("type") == "number":
                for i, item in enumerate(value):
                    _check_number(f"{field_name}[{i}]", item, items, errors)

    return errors


def load_fit_options(source: Optional[Union[str, Mapping[str, Any]]] = None) -> FitOptions:
    """
    Build FitOptions from a JSON file path or a mapping; None gives the defaults.
    """
    if source is None:
        return FitOptions()
    if isinstance(source, str):
        try:
            with open(source, "r", encoding="utf-8") as f:
                document = json.load(f)
        except OSError as e:
            raise UsageError(f"cannot read options file {source}: {e}") from e
        except json.JSONDecodeError as e:
            raise UsageError(f"options file {source} is not valid JSON: {e}") from e
    else:
        document = dict(source)
    if not isinstance(document, dict):
        raise UsageError("fit options must be a JSON object")

    errors = validate_params(document, FIT_OPTIONS_SCHEMA)
    if not errors and "omega_c_bounds" in document:
        lower, upper = document["omega_c_bounds"]
        if lower >= upper:
            errors.append(f"omega_c_bounds must be increasing, got {document['omega_c_bounds']}")
    if errors:
        raise UsageError("invalid fit options:\n" + "\n".join(f"• {e}" for e in errors), errors=errors)
    return FitOptions(**document)


# Export all schemas for easy access
ALL_SCHEMAS = {
    "fit_options": FIT_OPTIONS_SCHEMA,
    "fit_response": FIT_RESPONSE_SCHEMA,
    "synthesize_response": SYNTHESIZE_SCHEMA,
    "optical_spectrum": SPECTRUM_SCHEMA,
}
