"""
Closed-form sub-Ohmic and Gauss+biexponential quantities.

All evaluators accept a scalar or a numpy array for ``t``/``omega`` and return
the same shape (a float for scalar input). Frequencies are angular (rad/ps),
energies are hbar*omega in rad/ps.
"""

import logging
import math
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from stokes_sd.constants import HBAR_OVER_KB_PS_K, WAVENUMBER_TO_RADPS
from stokes_sd.models.params import GaussBiexpParams, Regime, SubOhmicParams
from stokes_sd.models.reports import HuangRhysFactor
from stokes_sd.models.series import SampledResponse
from stokes_sd.specfun import gamma_fn
from stokes_sd.validation import DomainError

logger = logging.getLogger(__name__)

ArrayLike = Union[float, Sequence[float], np.ndarray]

# K(omega) is negligible (exp(-50)) beyond this many cutoff frequencies
CUTOFF_SPAN = 50.0
# Gaussian term negligible beyond this many sqrt(omega_d)
GAUSSIAN_SPAN = 10.0


def _as_times(t: ArrayLike) -> np.ndarray:
    times = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(times)):
        raise DomainError("times must be finite")
    if np.any(times < 0):
        raise DomainError(f"times must be >= 0, got min {float(np.min(times))}")
    return times


def _as_frequencies(omega: ArrayLike) -> np.ndarray:
    omegas = np.asarray(omega, dtype=float)
    if not np.all(np.isfinite(omegas)):
        raise DomainError("frequencies must be finite")
    if np.any(omegas <= 0):
        raise DomainError(
            "frequencies must be > 0 (J diverges at omega -> 0; integrate K = omega J instead)",
            omega_min=float(np.min(omegas)),
        )
    return omegas


def _out(values: np.ndarray, like: np.ndarray):
    return float(values) if like.ndim == 0 else values


def subohmic_regime(p: SubOhmicParams) -> Regime:
    return p.regime


def eval_subohmic_density(p: SubOhmicParams, omega: ArrayLike):
    """J(w) = 2 delta_s w_ph^(1-s) w^(s-2) exp(-w/w_c)."""
    w = _as_frequencies(omega)
    j = 2.0 * p.delta_s * p.omega_ph ** (1.0 - p.s) * w ** (p.s - 2.0) * np.exp(-w / p.omega_c)
    return _out(j, w)


def eval_subohmic_stokes(p: SubOhmicParams, t: ArrayLike):
    """S(t) = (1 + w_c^2 t^2)^(-s/2) cos(s arctan(w_c t))."""
    times = _as_times(t)
    x = p.omega_c * times
    s = (1.0 + x * x) ** (-0.5 * p.s) * np.cos(p.s * np.arctan(x))
    return _out(s, times)


def eval_subohmic_stokes_jacobian(p: SubOhmicParams, t: ArrayLike) -> Tuple[np.ndarray, np.ndarray]:
    """(dS/dw_c, dS/ds) of the sub-Ohmic Stokes function."""
    times = _as_times(np.atleast_1d(t))
    x = p.omega_c * times
    r = 1.0 + x * x
    theta = np.arctan(x)
    envelope = r ** (-0.5 * p.s)
    cos_st = np.cos(p.s * theta)
    sin_st = np.sin(p.s * theta)
    d_omega_c = -p.s * times * envelope / r * (x * cos_st + sin_st)
    d_s = -0.5 * np.log(r) * envelope * cos_st - theta * envelope * sin_st
    return d_omega_c, d_s


def stokes_short_time(p: SubOhmicParams, t: ArrayLike):
    """Quadratic expansion 1 - s(1+s)(w_c t)^2 / 2."""
    times = _as_times(t)
    x = p.omega_c * times
    return _out(1.0 - 0.5 * p.s * (1.0 + p.s) * x * x, times)


def stokes_long_time(p: SubOhmicParams, t: ArrayLike):
    """Algebraic law cos(pi s/2) (w_c t)^(-s), valid for w_c t >= 1."""
    times = _as_times(t)
    x = p.omega_c * times
    if np.any(x < 1.0):
        raise DomainError(
            "the long-time law is asymptotic and needs omega_c t >= 1",
            omega_c_t_min=float(np.min(x)),
        )
    return _out(math.cos(0.5 * math.pi * p.s) * x ** (-p.s), times)


def reorganization_energy(p: SubOhmicParams) -> float:
    """lambda = 2 delta_s Gamma(s) (w_c/w_ph)^(s-1) hbar w_c."""
    return 2.0 * p.delta_s * gamma_fn(p.s) * (p.omega_c / p.omega_ph) ** (p.s - 1.0) * p.omega_c


def huang_rhys(p: SubOhmicParams) -> HuangRhysFactor:
    """
    Integral of J(w) = K(w)/w over (0, inf), the effective environment mass.

    Finite only for s > 1; the integral diverges at w -> 0 otherwise, and
    logarithmically at the Ohmic boundary s = 1.
    """
    if p.s <= 1.0:
        return HuangRhysFactor(kind="infrared-divergent", logarithmic=p.s == 1.0)
    value = 2.0 * p.delta_s * gamma_fn(p.s - 1.0) * (p.omega_c / p.omega_ph) ** (p.s - 1.0)
    return HuangRhysFactor(kind="finite", value=value)


def eval_stokes_with_baseline(p: SubOhmicParams, b0: float, t: ArrayLike):
    """[S(t) + b0] / (1 + b0)."""
    if not math.isfinite(b0):
        raise DomainError(f"b0 must be finite, got {b0}")
    if 1.0 + b0 == 0.0:
        raise DomainError("b0 = -1 makes the baseline form singular", b0=b0)
    times = _as_times(t)
    s = (np.asarray(eval_subohmic_stokes(p, times)) + b0) / (1.0 + b0)
    return _out(s, times)


def eval_ohmic_stokes(omega_c: float, t: ArrayLike):
    """Single exponential exp(-w_c t) of the Ohmic (s = 1, Debye) density."""
    if not omega_c > 0:
        raise DomainError(f"omega_c must be > 0, got {omega_c}")
    times = _as_times(t)
    return _out(np.exp(-omega_c * times), times)


def eval_gauss_biexp_stokes(g: GaussBiexpParams, t: ArrayLike):
    times = _as_times(t)
    s = (
        g.a_g * np.exp(-0.5 * g.omega_d * times * times)
        + g.a_1 * np.exp(-times / g.tau_1)
        + g.a_2 * np.exp(-times / g.tau_2)
    )
    return _out(s, times)


def _gauss_biexp_k(g: GaussBiexpParams, w: np.ndarray) -> np.ndarray:
    gaussian = math.sqrt(1.0 / (2.0 * math.pi * g.omega_d)) * g.a_g * np.exp(-w * w / (2.0 * g.omega_d))
    lorentz_1 = g.a_1 * g.tau_1 / (math.pi * (1.0 + (g.tau_1 * w) ** 2))
    lorentz_2 = g.a_2 * g.tau_2 / (math.pi * (1.0 + (g.tau_2 * w) ** 2))
    return gaussian + lorentz_1 + lorentz_2


def eval_gauss_biexp_density(g: GaussBiexpParams, omega: ArrayLike):
    """
    Unnormalized J(w) implied by the Gauss+biexponential S(t).

    Each term is the cosine transform of the matching S(t) term divided by w;
    the absolute scale comes from a separately supplied lambda.
    """
    w = _as_frequencies(omega)
    return _out(_gauss_biexp_k(g, w) / w, w)


def gauss_biexp_reorganization(g: GaussBiexpParams) -> float:
    """Integral of w J(w) for the unnormalized density: (a_g + a_1 + a_2)/2."""
    return 0.5 * g.amplitude_sum


# Unit conversions

def wavenumber_to_radps(value: ArrayLike):
    array = np.asarray(value, dtype=float)
    return _out(array * WAVENUMBER_TO_RADPS, array)


def radps_to_wavenumber(value: ArrayLike):
    array = np.asarray(value, dtype=float)
    return _out(array / WAVENUMBER_TO_RADPS, array)


def hbar_beta(temperature: float) -> float:
    """hbar/(k_B T) in ps."""
    if not temperature > 0:
        raise DomainError(f"hbar*beta needs a temperature > 0 K, got {temperature}")
    return HBAR_OVER_KB_PS_K / temperature


def thermal_frequency(temperature: float) -> float:
    """k_B T / hbar in rad/ps."""
    if temperature < 0:
        raise DomainError(f"temperature must be >= 0 K, got {temperature}")
    return temperature / HBAR_OVER_KB_PS_K


def stokes_from_peak_shift(
    times: ArrayLike,
    peak_energies: ArrayLike,
    final_energy: Optional[float] = None,
    source: str = "",
) -> Tuple[SampledResponse, float]:
    """
    Normalized Stokes function from a time-resolved emission peak trace.

    ``peak_energies`` are in cm^-1. S(t) = [E(t) - E(inf)] / [E(0) - E(inf)]
    with E(inf) the last sample unless ``final_energy`` is given. The
    reorganization energy is estimated as half the total dynamic shift and
    returned in hbar*rad/ps.
    """
    t = np.asarray(times, dtype=float)
    e = np.asarray(peak_energies, dtype=float)
    if t.shape != e.shape or t.ndim != 1 or t.size < 2:
        raise DomainError("times and peak energies must be matching series of >= 2 samples")
    order = np.argsort(t, kind="stable")
    t = t[order]
    e = e[order]
    e_inf = float(e[-1]) if final_energy is None else float(final_energy)
    total_shift = float(e[0]) - e_inf
    if total_shift == 0.0:
        raise DomainError("the peak trace shows no dynamic shift (E(0) = E(inf))")
    response = SampledResponse.from_unsorted(t, (e - e_inf) / total_shift, source=source)
    lam = 0.5 * abs(total_shift) * WAVENUMBER_TO_RADPS
    logger.info("Dynamic Stokes shift %.1f cm^-1, lambda estimate %.4g rad/ps", total_shift, lam)
    return response, lam


# Density profiles for the quadrature engine

class DensityProfile(BaseModel):
    """
    K(w) = w J(w) written as w^alpha * density(w) with density smooth at 0.

    ``omega_max`` closes the body integral; ``heavy_tail`` marks densities
    whose K decays algebraically beyond it and needs an oscillatory tail.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    alpha: float = Field(description="Low-frequency exponent of K")
    density: Callable[[np.ndarray], np.ndarray] = Field(description="Smooth factor h(w)")
    scale: float = Field(description="Characteristic frequency (rad/ps)")
    omega_max: float = Field(description="Upper limit of the body integral (rad/ps)")
    heavy_tail: bool = False
    breakpoints: Tuple[float, ...] = ()
    reorganization: float = Field(description="Integral of K over (0, inf)")

    def k(self, omega: np.ndarray) -> np.ndarray:
        w = np.asarray(omega, dtype=float)
        return w ** self.alpha * self.density(w)


def subohmic_profile(p: SubOhmicParams) -> DensityProfile:
    prefactor = 2.0 * p.delta_s * p.omega_ph ** (1.0 - p.s)
    omega_c = p.omega_c
    return DensityProfile(
        alpha=p.s - 1.0,
        density=lambda w: prefactor * np.exp(-w / omega_c),
        scale=omega_c,
        omega_max=CUTOFF_SPAN * omega_c,
        breakpoints=(omega_c, 5.0 * omega_c),
        reorganization=reorganization_energy(p),
    )


def gauss_biexp_profile(g: GaussBiexpParams) -> DensityProfile:
    gaussian_width = math.sqrt(g.omega_d)
    rates = (1.0 / g.tau_1, 1.0 / g.tau_2)
    return DensityProfile(
        alpha=0.0,
        density=lambda w: _gauss_biexp_k(g, w),
        scale=min(gaussian_width, *rates),
        omega_max=max(GAUSSIAN_SPAN * gaussian_width, CUTOFF_SPAN * max(rates)),
        heavy_tail=True,
        breakpoints=tuple(sorted((gaussian_width, *rates))),
        reorganization=gauss_biexp_reorganization(g),
    )
