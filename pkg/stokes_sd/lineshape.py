"""
Line-shape function g(t), optical spectra, FDT noise and the classical
regression check.

    g(t) = -i lambda t + i int J sin(wt) dw                 (coherent)
           + 2 int J n(w) (1 - cos wt) dw                  (thermal)
           + int J (1 - cos wt) dw                         (zero point)

with n(w) the Bose occupation at the context temperature.
"""

import logging
import math
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from scipy import integrate

from stokes_sd.config import get_solver_config
from stokes_sd.constants import HBAR_OVER_KB_PS_K
from stokes_sd.models.params import PhysicalContext, SubOhmicParams
from stokes_sd.models.reports import RegressionReport
from stokes_sd.models.series import LineShapeSeries, SpectrumSeries, TabulatedSpectralFunction
from stokes_sd.sdcore import eval_subohmic_stokes, reorganization_energy, subohmic_profile
from stokes_sd.specfun import gamma_fn, hurwitz_zeta
from stokes_sd.transforms import bose_omega, filon_moments, integrate_density
from stokes_sd.validation import DomainError, TruncationError, UsageError

logger = logging.getLogger(__name__)

REGRESSION_RATIOS = (1.0, 10.0, 100.0)
DEFAULT_SPECTRUM_POINTS = 1001


def _time_grid(t_grid) -> np.ndarray:
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or t.size == 0:
        raise DomainError("t_grid must be a non-empty one-dimensional grid")
    if not np.all(np.isfinite(t)) or np.any(t < 0):
        raise DomainError("t_grid must be finite and >= 0")
    if np.any(np.diff(t) <= 0):
        raise DomainError("t_grid must be strictly increasing")
    return t


def _tabulated_head(spectral: TabulatedSpectralFunction, t: np.ndarray, kernel) -> np.ndarray:
    """int_0^{w_0} K_0 (w/w_0)^alpha kernel(w, t) dw for each t."""
    w0 = float(spectral.omegas[0])
    alpha = spectral.head_exponent
    prefactor = float(spectral.k_values[0]) * w0 ** (-alpha)
    out = np.empty_like(t)
    for i, ti in enumerate(t):
        value, _ = integrate.quad(kernel, 0.0, w0, args=(ti,), weight="alg", wvar=(alpha, 0.0))
        out[i] = prefactor * value
    return out


def _sin_over_w(w, t):
    return t * np.sinc(w * t / np.pi)


def _one_minus_cos_over_w(w, t):
    return 0.5 * w * t * t * np.sinc(w * t / (2.0 * np.pi)) ** 2


def _g_tabulated(spectral: TabulatedSpectralFunction, hbar_beta: float, t: np.ndarray):
    """Sine, thermal and zero-point integrals of a tabulated density."""
    omegas = spectral.omegas
    j = spectral.k_values / omegas
    j_thermal = 2.0 * j * bose_omega(omegas, hbar_beta) / omegas

    cos_j, sin_j = filon_moments(omegas, j, t)
    cos_thermal, _ = filon_moments(omegas, j_thermal, t)

    def thermal_head(w, ti):
        return 2.0 * float(bose_omega(w, hbar_beta)) * 0.5 * ti * ti * np.sinc(w * ti / (2.0 * np.pi)) ** 2

    sine = sin_j + _tabulated_head(spectral, t, _sin_over_w)
    zero_point = (integrate.trapezoid(j, omegas) - cos_j
                  + _tabulated_head(spectral, t, _one_minus_cos_over_w))
    thermal = (integrate.trapezoid(j_thermal, omegas) - cos_thermal
               + _tabulated_head(spectral, t, thermal_head))
    return spectral.grid_reorganization(), sine, thermal, zero_point


def g_numeric(
    source: Union[SubOhmicParams, TabulatedSpectralFunction],
    ctx: PhysicalContext,
    t_grid,
) -> LineShapeSeries:
    """
    g(t) by direct quadrature of its four integrals, term by term.

    Analytic densities use the adaptive engine; tabulated ones use Filon
    moments of J on the frequency grid plus the power-law head below it.
    """
    ctx.require_thermal()
    t = _time_grid(t_grid)
    hb = ctx.hbar_beta
    if isinstance(source, SubOhmicParams):
        profile = subohmic_profile(source)
        lam = profile.reorganization
        sine = integrate_density(profile, t, "sin")
        thermal = integrate_density(profile, t, "thermal", hbar_beta=hb)
        zero_point = integrate_density(profile, t, "one_minus_cos")
    elif isinstance(source, TabulatedSpectralFunction):
        lam, sine, thermal, zero_point = _g_tabulated(source, hb, t)
    else:
        raise UsageError(f"cannot build g(t) from a {type(source).__name__}")

    coherent = 1j * (sine - lam * t)
    values = coherent + thermal + zero_point
    return LineShapeSeries(
        times=t,
        values=values,
        coherent=coherent,
        thermal=thermal,
        zero_point=zero_point,
        context=ctx,
        reorganization_energy=lam,
        method="numeric",
    )


def _thermal_closed(p: SubOhmicParams, hb: float, t: np.ndarray, prefactor: float) -> np.ndarray:
    kappa = 1.0 / (hb * p.omega_c)
    z = p.s - 1.0
    static = hurwitz_zeta(z, 1.0 + kappa).real
    out = np.empty_like(t)
    for i, ti in enumerate(t):
        if ti == 0.0:
            out[i] = 0.0
            continue
        # zeta(z, conj q) = conj zeta(z, q): the pair sums to twice the real part
        moving = hurwitz_zeta(z, complex(1.0 + kappa, ti / hb)).real
        out[i] = 2.0 * (static - moving)
    return prefactor * kappa ** z * out


def g_subohmic_closed(p: SubOhmicParams, ctx: PhysicalContext, t_grid) -> LineShapeSeries:
    """
    Closed form of g(t) for 0 < s < 1 in terms of the Hurwitz zeta function,
    with kappa = 1/(hbar beta omega_c) and the principal branch of
    (1 + i omega_c t)^(1-s).
    """
    if not 0.0 < p.s < 1.0:
        raise DomainError(f"the closed form needs 0 < s < 1, got s = {p.s}", s=p.s)
    ctx.require_thermal()
    t = _time_grid(t_grid)
    hb = ctx.hbar_beta
    lam = reorganization_energy(p)
    prefactor = 2.0 * p.delta_s * gamma_fn(p.s - 1.0) * (p.omega_c / p.omega_ph) ** (p.s - 1.0)

    bracket = prefactor * (1.0 - np.power(1.0 + 1j * p.omega_c * t, 1.0 - p.s))
    zero_point = bracket.real
    coherent = 1j * (bracket.imag - lam * t)
    thermal = _thermal_closed(p, hb, t, prefactor)
    return LineShapeSeries(
        times=t,
        values=coherent + thermal + zero_point,
        coherent=coherent,
        thermal=thermal,
        zero_point=zero_point,
        context=ctx,
        reorganization_energy=lam,
        method="closed",
    )


def _default_spectrum_grid(g: LineShapeSeries, omega_eg: float) -> np.ndarray:
    lam = g.reorganization_energy
    half_width = 3.0 * lam + 40.0 / float(g.times[-1])
    center = omega_eg - lam
    return np.linspace(center - half_width, center + half_width, DEFAULT_SPECTRUM_POINTS)


def _window_error(t: np.ndarray, f: np.ndarray, peak_raw: float) -> float:
    t_max = float(t[-1])
    truncation = abs(f[-1]) * t_max
    if t.size > 2:
        second = np.abs(np.gradient(np.gradient(f, t), t))
        interpolation = float(integrate.trapezoid(second, t)) * float(np.max(np.diff(t))) ** 2 / 12.0
    else:
        interpolation = 0.0
    return (truncation + interpolation) / peak_raw


def spectrum_from_g(
    g: LineShapeSeries,
    omega_eg: float,
    kind: str = "absorption",
    omegas: Optional[Sequence[float]] = None,
    strict: bool = True,
) -> SpectrumSeries:
    """
    One-sided transform of exp(-g(t)), normalized to unit peak.

    absorption:   Re int_0^T exp(i(w - w_eg)t) exp(-g(t)) dt
    fluorescence: Re int_0^T exp(i(w - w_eg + 2 lambda)t) exp(-g*(t)) dt

    The window error adds the truncated tail |exp(-g(T))| T and the linear
    interpolation bound of the integrand; with ``strict`` an uncertified
    spectrum raises TruncationError.
    """
    if kind not in ("absorption", "fluorescence"):
        raise UsageError(f"unknown spectrum kind {kind!r}; use absorption or fluorescence")
    if not math.isfinite(omega_eg):
        raise DomainError("omega_eg must be finite")
    t = g.times
    if t.size < 2 or t[0] != 0.0:
        raise DomainError("spectra need a line-shape grid starting at t = 0 with >= 2 points")
    w = _default_spectrum_grid(g, omega_eg) if omegas is None else np.asarray(omegas, dtype=float)

    if kind == "absorption":
        f = np.exp(-g.values)
        detuning = w - omega_eg
    else:
        f = np.exp(-np.conj(g.values))
        detuning = w - omega_eg + 2.0 * g.reorganization_energy

    cos_part, sin_part = filon_moments(t, f, detuning)
    raw = cos_part.real - sin_part.imag
    peak_raw = float(np.max(raw))
    if not peak_raw > 0:
        raise TruncationError("the spectrum has no positive peak on this grid", estimate=math.inf)

    estimate = _window_error(t, f, peak_raw)
    tolerance = get_solver_config().window_tolerance
    certified = estimate <= tolerance
    values = raw / peak_raw
    if certified:
        values = np.where((values < 0) & (values >= -estimate), 0.0, values)
    elif strict:
        raise TruncationError(
            f"exp(-g) has not decayed on the time grid (window error {estimate:.3g} > {tolerance:g})",
            estimate=estimate,
        )
    else:
        logger.warning("Spectrum window error %.3g exceeds %.3g; output is not certified", estimate, tolerance)
    return SpectrumSeries(omegas=w, values=values, kind=kind, window_error=estimate, certified=certified)


def fdt_noise_spectrum(re_y, ctx: PhysicalContext, omegas) -> SpectrumSeries:
    """
    Quantum noise 2 [hbar w/2 + hbar w/(exp(hbar w/kT) - 1)] Re Y(w).

    At T = 0 the bracket is the zero-point term hbar w/2; at w = 0 it is k_B T.
    """
    w = np.asarray(omegas, dtype=float)
    y = np.asarray(re_y, dtype=float)
    if w.shape != y.shape or w.ndim != 1:
        raise DomainError("Re Y and the frequency grid must be matching one-dimensional series")
    if not (np.all(np.isfinite(w)) and np.all(np.isfinite(y))):
        raise DomainError("Re Y and the frequencies must be finite")
    if np.any(w < 0):
        raise DomainError("noise frequencies must be >= 0")
    bracket = 0.5 * w
    if ctx.temperature > 0:
        bracket = bracket + bose_omega(w, ctx.hbar_beta)
    return SpectrumSeries(omegas=w, values=2.0 * bracket * y, kind="noise")


def symmetrized_correlation(p: SubOhmicParams, temperature: float, t_grid) -> np.ndarray:
    """int K(w) w coth(hbar beta w/2) cos(wt) dw normalized to 1 at t = 0."""
    t = _time_grid(t_grid)
    hb = HBAR_OVER_KB_PS_K / temperature
    with_origin = np.concatenate(([0.0], t)) if t[0] != 0.0 else t
    values = integrate_density(subohmic_profile(p), with_origin, "symmetrized", hbar_beta=hb)
    normalized = values / values[0]
    return normalized[1:] if t[0] != 0.0 else normalized


def classical_regression_check(
    p: SubOhmicParams,
    ctx: PhysicalContext,
    t_grid,
    ratios: Tuple[float, ...] = REGRESSION_RATIOS,
) -> RegressionReport:
    """
    Sup-norm distance between the normalized symmetrized correlation and
    S(t) at k_B T/(hbar omega_c) in ``ratios`` plus the context temperature.
    The quantum correlation should approach S(t) as T grows.
    """
    ctx.require_thermal()
    if p.s <= 0:
        raise DomainError("the symmetrized correlation needs s > 0")
    t = _time_grid(t_grid)
    scale = p.omega_c * HBAR_OVER_KB_PS_K
    temperatures = sorted({r * scale for r in ratios} | {ctx.temperature})
    stokes = np.asarray(eval_subohmic_stokes(p, t))
    deviations = []
    for temperature in temperatures:
        correlation = symmetrized_correlation(p, temperature, t)
        deviations.append(float(np.max(np.abs(correlation - stokes))))
    monotone = bool(np.all(np.diff(deviations) < 0))
    if not monotone:
        logger.warning("Regression deviation is not monotone in temperature: %s", deviations)
    return RegressionReport(
        temperatures=temperatures,
        thermal_ratios=[T / scale for T in temperatures],
        deviations=deviations,
        monotone=monotone,
    )
