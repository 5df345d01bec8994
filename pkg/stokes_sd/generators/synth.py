"""
Synthetic Stokes-shift data from presets or explicit parameters.

Output is deterministic for a given seed: samples on a uniform grid over
[0, t_max] plus optional Gaussian noise of a fixed standard deviation.
"""

import logging
from typing import Optional, Union

import numpy as np

from stokes_sd.models.params import GaussBiexpParams, SubOhmicParams
from stokes_sd.models.preset import PresetEntry
from stokes_sd.models.series import SampledResponse
from stokes_sd.presets import preset_baseline
from stokes_sd.sdcore import (
    eval_gauss_biexp_stokes,
    eval_stokes_with_baseline,
    eval_subohmic_stokes,
)
from stokes_sd.validation import DomainError, UsageError

logger = logging.getLogger(__name__)

Source = Union[PresetEntry, SubOhmicParams, GaussBiexpParams]

# sub-Ohmic S(t) has decayed to a few percent by 50/omega_c for moderate s
SUBOHMIC_SPAN = 50.0
# five times the slowest exponential
GAUSS_BIEXP_SPAN = 5.0


def _unwrap(source: Source, b0: Optional[float]):
    if isinstance(source, PresetEntry):
        params = source.gauss_biexp if source.model == "gauss-biexp" else source.subohmic
        if source.model == "subohmic-baseline":
            b0 = preset_baseline(source, b0)
        return params, b0
    return source, b0


def model_values(source: Source, times, b0: Optional[float] = None) -> np.ndarray:
    """Noiseless S(t) of a preset or a parameter set; ``b0`` selects the baseline form."""
    params, b0 = _unwrap(source, b0)
    if isinstance(params, GaussBiexpParams):
        if b0:
            raise UsageError("a baseline only applies to sub-Ohmic models")
        return np.asarray(eval_gauss_biexp_stokes(params, times), dtype=float)
    if isinstance(params, SubOhmicParams):
        if b0 is None:
            return np.asarray(eval_subohmic_stokes(params, times), dtype=float)
        return np.asarray(eval_stokes_with_baseline(params, b0, times), dtype=float)
    raise UsageError(f"cannot synthesize data from a {type(params).__name__}")


def default_t_max(source: Source) -> float:
    params, _ = _unwrap(source, 0.0)
    if isinstance(params, GaussBiexpParams):
        return GAUSS_BIEXP_SPAN * max(params.tau_1, params.tau_2)
    return SUBOHMIC_SPAN / params.omega_c


def synthesize(
    source: Source,
    t_max: Optional[float] = None,
    n_points: int = 200,
    noise: float = 0.0,
    seed: int = 0,
    b0: Optional[float] = None,
) -> SampledResponse:
    """
    Sample S(t) on ``n_points`` equally spaced times in [0, t_max].

    With ``noise`` > 0 every value gets N(0, noise^2) added and the sigma
    column is set to ``noise``.
    """
    if n_points < 2:
        raise DomainError(f"n_points must be >= 2, got {n_points}")
    if noise < 0 or not np.isfinite(noise):
        raise DomainError(f"noise sigma must be finite and >= 0, got {noise}")
    t_max = default_t_max(source) if t_max is None else t_max
    if not t_max > 0:
        raise DomainError(f"t_max must be > 0, got {t_max}")

    times = np.linspace(0.0, t_max, n_points)
    values = model_values(source, times, b0)
    sigma = None
    if noise > 0:
        rng = np.random.default_rng(seed)
        values = values + rng.normal(0.0, noise, size=n_points)
        sigma = np.full(n_points, noise)

    label = source.name if isinstance(source, PresetEntry) else type(source).__name__
    logger.info("Synthesized %d samples of %s on [0, %.4g] ps (noise %.3g, seed %d)",
                n_points, label, t_max, noise, seed)
    return SampledResponse(times=times, values=values, sigma=sigma, source=f"synth:{label}")
