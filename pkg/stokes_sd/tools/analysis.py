"""
MCP tools for data: synthesis, fitting, model comparison and the J/S transforms.
"""

import json
import math
from typing import Any, Dict, List, Literal, Optional

import numpy as np

from stokes_sd.fitting import compare_models, fit_model
from stokes_sd.generators.synth import synthesize
from stokes_sd.presets import get_preset, resolve_model
from stokes_sd.schemas import load_fit_options
from stokes_sd.storage.files import response_columns, spectral_columns
from stokes_sd.storage.results import get_result_store
from stokes_sd.tools.common import response_from_lists, tool_errors
from stokes_sd.transforms import (
    default_omega_grid,
    fit_tail,
    forward_stokes,
    invert_density,
    refine_omega_grid,
)
from stokes_sd.validation import UsageError, validate_tool_call


def _columns_json(columns: Dict[str, np.ndarray], **extra: Any) -> str:
    document = {
        name: [float(v) if math.isfinite(v) else None for v in values] for name, values in columns.items()
    }
    document.update(extra)
    return json.dumps(document, indent=2)


@tool_errors
def synthesize_response(
    preset: str,
    t_max: Optional[float] = None,
    n_points: int = 200,
    noise: float = 0.0,
    seed: int = 0,
    b0: Optional[float] = None,
) -> str:
    """
    Sample S(t) of a preset on [0, t_max] with optional Gaussian noise (deterministic per seed).
    Example: synthesize_response("coumarin343-eq6", t_max=3.0, n_points=200)
    """
    validate_tool_call("synthesize_response", dict(preset=preset, t_max=t_max, n_points=n_points,
                                                   noise=noise, seed=seed, b0=b0))
    response = synthesize(get_preset(preset), t_max=t_max, n_points=n_points, noise=noise, seed=seed, b0=b0)
    return _columns_json(response_columns(response), source=response.source)


@tool_errors
async def fit_response(
    times: List[float],
    values: List[float],
    model: Literal["subohmic", "subohmic-baseline", "gauss-biexp", "ohmic"] = "subohmic",
    sigma: Optional[List[float]] = None,
    normalize: bool = False,
    options: Optional[Dict[str, Any]] = None,
    name: Optional[str] = None,
) -> str:
    """
    Fit a model family to S(t) samples and return the FitResult JSON.
    With ``name`` the result is stored for get_fit_result.
    Example: fit_response(times=[0, 0.1, ...], values=[1, 0.8, ...], model="subohmic", name="run1")
    """
    validate_tool_call("fit_response", dict(times=times, values=values, model=model, name=name, options=options))
    data = response_from_lists(times, values, sigma, normalize)
    result = fit_model(model, data, load_fit_options(options))
    if name:
        await get_result_store().save(name, result)
    return result.model_dump_json(indent=2)


@tool_errors
def compare_response_models(
    times: List[float],
    values: List[float],
    sigma: Optional[List[float]] = None,
    normalize: bool = False,
    models: Optional[List[str]] = None,
    options: Optional[Dict[str, Any]] = None,
) -> str:
    """
    Fit several models to the same samples and rank them by AICc.
    Example: compare_response_models(times, values, models=["subohmic", "ohmic"])
    """
    data = response_from_lists(times, values, sigma, normalize)
    kinds = tuple(models) if models else ("subohmic", "gauss-biexp", "ohmic")
    return compare_models(data, load_fit_options(options), kinds).model_dump_json(indent=2)


@tool_errors
def invert_response(
    times: List[float],
    values: List[float],
    reorganization_energy: float,
    tail: Literal["auto", "algebraic", "exponential", "none"] = "auto",
    omega_min: Optional[float] = None,
    omega_max: Optional[float] = None,
    omega_points: Optional[int] = None,
) -> str:
    """
    Spectral density from S(t): K(w) = w J(w) on a frequency grid, J null below the floor.
    reorganization_energy (lambda, hbar*rad/ps) is required; use 1 for a shape-only J.
    Example: invert_response(times, values, reorganization_energy=1.0, tail="algebraic")
    """
    data = response_from_lists(times, values)
    if (omega_min is None) != (omega_max is None):
        raise UsageError("omega_min and omega_max must be given together")
    if omega_min is not None:
        if not 0 < omega_min < omega_max:
            raise UsageError("the frequency window needs 0 < omega_min < omega_max")
        omegas = np.geomspace(omega_min, omega_max, omega_points or 400)
    else:
        omegas = refine_omega_grid(default_omega_grid(points=omega_points, data=data), data.t_max)
    tail_model = fit_tail(data, tail)
    spectral = invert_density(data, reorganization_energy, omegas, tail_model)
    return _columns_json(
        spectral_columns(spectral),
        tail=tail_model.model_dump(),
        normalization_defect=spectral.normalization_defect,
    )


@tool_errors
def forward_transform(
    t_max: float,
    n_points: int = 200,
    preset: Optional[str] = None,
    omega_c: Optional[float] = None,
    s: Optional[float] = None,
) -> str:
    """
    S(t) from a model spectral density by the cosine transform, normalized to S(0) = 1.
    Example: forward_transform(t_max=2.0, omega_c=5.0, s=0.5)
    """
    params = resolve_model(preset, omega_c, s)
    response = forward_stokes(params, np.linspace(0.0, t_max, n_points))
    return _columns_json(response_columns(response), source=response.source)
