"""
MCP tools for line shapes, spectra, noise and coupling-strength reports.
"""

import json
from typing import List, Literal, Optional

import numpy as np

from stokes_sd.lineshape import (
    classical_regression_check,
    fdt_noise_spectrum,
    g_numeric,
    g_subohmic_closed,
    spectrum_from_g,
)
from stokes_sd.models.params import PhysicalContext
from stokes_sd.presets import resolve_subohmic
from stokes_sd.sdcore import huang_rhys, reorganization_energy
from stokes_sd.storage.files import lineshape_columns, spectrum_columns
from stokes_sd.tools.common import tool_errors
from stokes_sd.validation import validate_tool_call


def _line_shape(params, temperature_k: float, t_max: float, n_points: int, method: str):
    ctx = PhysicalContext(temperature=temperature_k)
    t_grid = np.linspace(0.0, t_max, n_points)
    if method == "closed":
        return g_subohmic_closed(params, ctx, t_grid)
    return g_numeric(params, ctx, t_grid)


@tool_errors
def line_shape(
    temperature_k: float,
    t_max: float = 2.0,
    n_points: int = 401,
    method: Literal["closed", "numeric"] = "closed",
    preset: Optional[str] = None,
    omega_c: Optional[float] = None,
    s: Optional[float] = None,
    delta_s: Optional[float] = None,
    omega_ph: Optional[float] = None,
) -> str:
    """
    Line-shape function g(t) of a sub-Ohmic density with its thermal and zero-point parts.
    Example: line_shape(300.0, t_max=1.0, omega_c=5.0, s=0.5)
    """
    params = resolve_subohmic(preset, omega_c, s, delta_s, omega_ph)
    g = _line_shape(params, temperature_k, t_max, n_points, method)
    document = {name: [float(v) for v in values] for name, values in lineshape_columns(g).items()}
    document["reorganization_energy"] = g.reorganization_energy
    return json.dumps(document, indent=2)


@tool_errors
def optical_spectrum(
    temperature_k: float,
    kind: Literal["absorption", "fluorescence"] = "absorption",
    omega_eg: float = 0.0,
    t_max: float = 2.0,
    n_points: int = 4001,
    preset: Optional[str] = None,
    omega_c: Optional[float] = None,
    s: Optional[float] = None,
    delta_s: Optional[float] = None,
    omega_ph: Optional[float] = None,
) -> str:
    """
    Absorption or fluorescence line normalized to unit peak, with its window error.
    Fails with a truncation error when exp(-g) has not decayed by t_max.
    Example: optical_spectrum(300.0, "fluorescence", omega_c=5.0, s=0.5, t_max=0.4)
    """
    validate_tool_call("optical_spectrum", dict(kind=kind, temperature_k=temperature_k, omega_eg=omega_eg,
                                                t_max=t_max, n_points=n_points))
    params = resolve_subohmic(preset, omega_c, s, delta_s, omega_ph)
    g = _line_shape(params, temperature_k, t_max, n_points, "closed" if params.s < 1 else "numeric")
    spectrum = spectrum_from_g(g, omega_eg, kind)
    document = {name: [float(v) for v in values] for name, values in spectrum_columns(spectrum).items()}
    document.update(kind=spectrum.kind, window_error=spectrum.window_error, certified=spectrum.certified)
    return json.dumps(document, indent=2)


@tool_errors
def huang_rhys_factor(
    preset: Optional[str] = None,
    omega_c: Optional[float] = None,
    s: Optional[float] = None,
    delta_s: Optional[float] = None,
    omega_ph: Optional[float] = None,
) -> str:
    """
    Huang-Rhys factor (finite for s > 1, infrared-divergent otherwise) and the reorganization energy.
    Example: huang_rhys_factor(preset="rhodopsin-530nm")
    """
    params = resolve_subohmic(preset, omega_c, s, delta_s, omega_ph)
    document = huang_rhys(params).model_dump()
    document.update(reorganization_energy=reorganization_energy(params), regime=params.regime.value)
    return json.dumps(document, indent=2)


@tool_errors
def noise_spectrum(omegas: List[float], re_y: List[float], temperature_k: float) -> str:
    """
    Quantum noise spectrum 2[hbar w/2 + hbar w n(w)] Re Y(w) from the dissipative response.
    Example: noise_spectrum([0.1, 1.0], [1.0, 0.5], 300.0)
    """
    spectrum = fdt_noise_spectrum(re_y, PhysicalContext(temperature=temperature_k), omegas)
    document = {name: [float(v) for v in values] for name, values in spectrum_columns(spectrum).items()}
    return json.dumps(document, indent=2)


@tool_errors
def regression_check(
    temperature_k: float,
    t_max: float = 2.0,
    n_points: int = 101,
    preset: Optional[str] = None,
    omega_c: Optional[float] = None,
    s: Optional[float] = None,
) -> str:
    """
    Distance between the quantum symmetrized correlation and S(t) over temperature decades.
    Example: regression_check(300.0, omega_c=5.0, s=0.5)
    """
    params = resolve_subohmic(preset, omega_c, s)
    report = classical_regression_check(
        params, PhysicalContext(temperature=temperature_k), np.linspace(0.0, t_max, n_points)
    )
    return report.model_dump_json(indent=2)
