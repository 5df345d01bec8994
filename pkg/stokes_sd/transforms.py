"""
Forward and inverse cosine transforms between K(w) = w J(w) and S(t).

    S(t) = (1/lambda) int_0^inf K(w) cos(wt) dw
    K(w) = (2 lambda/pi) int_0^inf S(t) cos(wt) dt

Sampled data are integrated with Filon moments of the piecewise-linear
interpolant on the data's own nodes; analytic densities go through
``integrate_density``, an adaptive engine that removes the w^alpha
singularity of K at the origin by substitution.
"""

import logging
import math
from typing import Literal, Optional, Sequence, Tuple, Union

import mpmath
import numpy as np
from scipy import integrate

from stokes_sd.config import get_solver_config
from stokes_sd.models.params import GaussBiexpParams, SubOhmicParams
from stokes_sd.models.series import SampledResponse, TabulatedSpectralFunction, TailModel
from stokes_sd.sdcore import DensityProfile, gauss_biexp_profile, subohmic_profile
from stokes_sd.validation import (
    DomainError,
    ResolutionError,
    TailFitError,
    TailNeededError,
    UsageError,
)

logger = logging.getLogger(__name__)

DensityWeight = Literal["cos", "sin", "one_minus_cos", "thermal", "symmetrized"]
TailKind = Literal["auto", "none", "algebraic", "exponential"]

# Series of (sin x - x cos x)/x^2 is used below this |x|
FILON_SERIES_SWITCH = 0.5
FILON_SERIES_TERMS = 7
FILON_BLOCK = 1 << 21

TAIL_FRACTION = 0.2
TAIL_MIN_POINTS = 5
NEEDS_TAIL_LEVEL = 0.05
UNDECAYED_LEVEL = 0.5

# Default grids reach DATA_SPAN_FLOOR/t_max
DATA_SPAN_FLOOR = 0.1
MIN_POINTS_PER_DECADE = 10


def _increasing_grid(values: Union[Sequence[float], np.ndarray], name: str, positive: bool) -> np.ndarray:
    grid = np.asarray(values, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise DomainError(f"{name} must be a non-empty one-dimensional grid")
    if not np.all(np.isfinite(grid)):
        raise DomainError(f"{name} must be finite")
    if positive and grid[0] <= 0:
        raise DomainError(f"{name} must be > 0")
    if not positive and grid[0] < 0:
        raise DomainError(f"{name} must be >= 0")
    if np.any(np.diff(grid) <= 0):
        raise DomainError(f"{name} must be strictly increasing")
    return grid


# Filon moments

def _filon_phi(theta: np.ndarray) -> np.ndarray:
    """(sin x - x cos x)/x^2 with a series near zero."""
    out = np.empty_like(theta)
    small = np.abs(theta) < FILON_SERIES_SWITCH
    big = ~small
    tb = theta[big]
    out[big] = (np.sin(tb) - tb * np.cos(tb)) / (tb * tb)
    ts = theta[small]
    acc = np.zeros_like(ts)
    for k in range(FILON_SERIES_TERMS, 0, -1):
        acc += (-1) ** (k + 1) * 2 * k * ts ** (2 * k - 1) / math.factorial(2 * k + 1)
    out[small] = acc
    return out


def filon_moments(nodes, values, frequencies) -> Tuple[np.ndarray, np.ndarray]:
    """
    Exact cosine and sine moments of a piecewise-linear function.

    Returns (int f(x) cos(kx) dx, int f(x) sin(kx) dx) over [nodes[0], nodes[-1]]
    for every k in ``frequencies``. ``values`` may be complex.
    """
    x = np.asarray(nodes, dtype=float)
    f = np.asarray(values)
    k = np.atleast_1d(np.asarray(frequencies, dtype=float))
    if x.shape != f.shape or x.size < 2:
        raise DomainError("Filon moments need >= 2 matching nodes and values")

    h = np.diff(x)
    mid = 0.5 * (x[1:] + x[:-1])
    mean = 0.5 * (f[1:] + f[:-1])
    half_step = 0.5 * (f[1:] - f[:-1])

    dtype = np.result_type(f.dtype, float)
    cos_moments = np.zeros(k.size, dtype=dtype)
    sin_moments = np.zeros(k.size, dtype=dtype)
    block = max(1, FILON_BLOCK // h.size)
    for start in range(0, k.size, block):
        kk = k[start:start + block, None]
        theta = 0.5 * kk * h
        sinc = np.sinc(theta / np.pi)
        phi = _filon_phi(theta)
        c = np.cos(kk * mid)
        s = np.sin(kk * mid)
        cos_moments[start:start + block] = np.sum(h * (mean * c * sinc - half_step * s * phi), axis=1)
        sin_moments[start:start + block] = np.sum(h * (mean * s * sinc + half_step * c * phi), axis=1)
    return cos_moments, sin_moments


# Adaptive density integrals

def bose_omega(omega, hbar_beta: float) -> np.ndarray:
    """w n(w) = w/(exp(hbar beta w) - 1), equal to 1/(hbar beta) at w = 0."""
    w = np.asarray(omega, dtype=float)
    x = hbar_beta * w
    with np.errstate(divide="ignore", invalid="ignore"):
        out = w / np.expm1(x)
    return np.where(x == 0.0, 1.0 / hbar_beta, out)


def _kernel(weight: DensityWeight, w: float, t: np.ndarray, hbar_beta: Optional[float]) -> np.ndarray:
    if weight == "cos":
        return np.cos(w * t)
    if weight == "sin":
        return np.sinc(w * t / np.pi)
    if weight == "one_minus_cos":
        return 0.5 * w * np.sinc(w * t / (2.0 * np.pi)) ** 2
    if weight == "thermal":
        return float(bose_omega(w, hbar_beta)) * np.sinc(w * t / (2.0 * np.pi)) ** 2
    if weight == "symmetrized":
        return (w + 2.0 * float(bose_omega(w, hbar_beta))) * np.cos(w * t)
    raise UsageError(f"unknown density weight {weight!r}")


def _post_factor(weight: DensityWeight, t: np.ndarray) -> np.ndarray:
    if weight == "sin":
        return t
    if weight in ("one_minus_cos", "thermal"):
        return t * t
    return np.ones_like(t)


def integrate_density(
    profile: DensityProfile,
    times,
    weight: DensityWeight = "cos",
    hbar_beta: Optional[float] = None,
) -> np.ndarray:
    """
    int_0^inf K(w) w(w, t) dw for every t, with

        cos:           cos(wt)
        sin:           sin(wt)/w
        one_minus_cos: (1 - cos wt)/w
        thermal:       2 n(w) (1 - cos wt)/w
        symmetrized:   w coth(hbar beta w/2) cos(wt)

    Kernels are evaluated in a form bounded uniformly in t and rescaled
    afterwards, so the max-norm error control of ``quad_vec`` is relative to
    each output. Below w_split = min(0.1 scale, 1/t_max) the variable
    u = w^(alpha+1) absorbs the w^alpha factor of K.
    """
    t = np.atleast_1d(np.asarray(times, dtype=float))
    if t.ndim != 1 or np.any(t < 0) or not np.all(np.isfinite(t)):
        raise DomainError("times must be finite and >= 0")
    if weight in ("thermal", "symmetrized") and not (hbar_beta and hbar_beta > 0):
        raise DomainError(f"the {weight} weight needs a temperature > 0")
    if profile.alpha <= -1.0:
        raise DomainError("K must be integrable at w = 0 (alpha > -1)")

    config = get_solver_config()
    epsabs = config.quad_epsabs * max(profile.reorganization, 1e-300)
    quad_kwargs = dict(epsabs=epsabs, epsrel=config.quad_epsrel, norm="max", limit=config.quad_limit)

    t_max = float(np.max(t)) if t.size else 0.0
    omega_split = 0.1 * profile.scale
    if t_max > 0:
        omega_split = min(omega_split, 1.0 / t_max)

    alpha = profile.alpha
    if alpha < 0:
        power = alpha + 1.0

        def head(u):
            w = u ** (1.0 / power)
            return float(profile.density(w)) * _kernel(weight, w, t, hbar_beta) / power

        head_value, _ = integrate.quad_vec(head, 0.0, omega_split ** power, **quad_kwargs)
        body_start = omega_split
    else:
        head_value = np.zeros_like(t)
        body_start = 0.0

    def body(w):
        return float(profile.k(w)) * _kernel(weight, w, t, hbar_beta)

    points = [p for p in profile.breakpoints if body_start < p < profile.omega_max]
    body_value, _ = integrate.quad_vec(body, body_start, profile.omega_max,
                                       points=points or None, **quad_kwargs)
    total = (head_value + body_value) * _post_factor(weight, t)

    if profile.heavy_tail:
        if weight != "cos":
            raise DomainError("heavy-tailed densities support only the cosine transform")
        total = total + _cosine_tail(profile, t, config.quad_limit)
    return total


def _cosine_tail(profile: DensityProfile, t: np.ndarray, limit: int) -> np.ndarray:
    tail = np.empty_like(t)
    for i, ti in enumerate(t):
        if ti == 0.0:
            tail[i], _ = integrate.quad(profile.k, profile.omega_max, np.inf, limit=limit)
        else:
            tail[i], _ = integrate.quad(profile.k, profile.omega_max, np.inf,
                                        weight="cos", wvar=ti, limlst=100)
    return tail


# Forward transform

def _alg_head_cosine(spectral: TabulatedSpectralFunction, t: np.ndarray) -> np.ndarray:
    """int_0^{w_0} K_0 (w/w_0)^alpha cos(wt) dw."""
    w0 = float(spectral.omegas[0])
    k0 = float(spectral.k_values[0])
    alpha = spectral.head_exponent
    out = np.empty_like(t)
    for i, ti in enumerate(t):
        value, _ = integrate.quad(lambda w: math.cos(w * ti), 0.0, w0, weight="alg", wvar=(alpha, 0.0))
        out[i] = k0 * w0 ** (-alpha) * value
    return out


def forward_stokes(
    source: Union[TabulatedSpectralFunction, SubOhmicParams, GaussBiexpParams],
    t_grid,
) -> SampledResponse:
    """
    S(t) = (1/lambda) int K(w) cos(wt) dw on a time grid starting at t = 0.

    lambda is the integral of K on the same grid and quadrature, so S(0) = 1.
    """
    t = _increasing_grid(t_grid, "t_grid", positive=False)
    if t[0] != 0.0:
        raise DomainError("t_grid must start at t = 0")

    if isinstance(source, TabulatedSpectralFunction):
        config = get_solver_config()
        spacing = float(np.max(np.diff(source.omegas)))
        if spacing * t[-1] >= config.resolution_factor:
            raise ResolutionError(
                f"frequency spacing {spacing:.4g} rad/ps is too coarse for t_max = {t[-1]:.4g} ps "
                f"(spacing * t_max must stay below {config.resolution_factor:.4f})",
                spacing=spacing,
                t_max=float(t[-1]),
            )
        cos_part, _ = filon_moments(source.omegas, source.k_values, t)
        integral = cos_part + _alg_head_cosine(source, t)
        label = "forward:tabulated"
    else:
        if isinstance(source, SubOhmicParams):
            profile = subohmic_profile(source)
            label = "forward:subohmic"
        elif isinstance(source, GaussBiexpParams):
            profile = gauss_biexp_profile(source)
            label = "forward:gauss-biexp"
        else:
            raise UsageError(f"cannot transform a {type(source).__name__}")
        integral = integrate_density(profile, t, "cos")

    norm = float(integral[0])
    if norm <= 0:
        raise DomainError("the density has no positive weight (lambda <= 0)")
    values = integral / norm
    values[0] = 1.0
    return SampledResponse(times=t, values=values, source=label)


# Tails

def exponential_tail_cosine(tail: TailModel, omegas: np.ndarray) -> np.ndarray:
    """int_T^inf A exp(-r t) cos(wt) dt."""
    r = tail.rate
    big_t = tail.t_splice
    w = np.asarray(omegas, dtype=float)
    return (tail.amplitude * math.exp(-r * big_t)
            * (r * np.cos(w * big_t) - w * np.sin(w * big_t)) / (r * r + w * w))


def algebraic_tail_cosine(tail: TailModel, omegas: np.ndarray) -> np.ndarray:
    """
    int_T^inf P t^-p cos(wt) dt with P = amplitude * omega_c^-p.

    Rotating the contour gives P w^(p-1) Re[exp(i pi (1-p)/2) Gamma(1-p, -i w T)].
    """
    p = tail.s
    prefactor = tail.amplitude * tail.omega_c ** (-p)
    big_t = tail.t_splice
    phase = mpmath.expjpi(0.5 * (1.0 - p))
    out = np.empty(np.size(omegas))
    for i, w in enumerate(np.atleast_1d(omegas)):
        upper = mpmath.gammainc(1.0 - p, mpmath.mpc(0.0, -w * big_t))
        out[i] = prefactor * w ** (p - 1.0) * float(mpmath.re(phase * upper))
    return out


def _trailing_zero_start(data: SampledResponse) -> Optional[float]:
    nonzero = np.flatnonzero(data.values != 0.0)
    if nonzero.size == data.n or nonzero.size == 0:
        return None
    return float(data.times[nonzero[-1] + 1])


def _tail_window(data: SampledResponse) -> Tuple[np.ndarray, np.ndarray]:
    in_last_decade = int(np.count_nonzero(data.times >= 0.1 * data.t_max))
    if in_last_decade < TAIL_MIN_POINTS:
        raise TailFitError(
            f"only {in_last_decade} samples in the final decade of time; need {TAIL_MIN_POINTS}",
        )
    start = max(0, min(int(math.floor((1.0 - TAIL_FRACTION) * data.n)), data.n - TAIL_MIN_POINTS))
    t = data.times[start:]
    v = data.values[start:]
    keep = (v > 0) & (t > 0)
    if np.count_nonzero(keep) < TAIL_MIN_POINTS:
        raise TailFitError("fewer than 5 positive samples in the tail window")
    return t[keep], v[keep]


def _check_splice(tail: TailModel, data: SampledResponse) -> TailModel:
    tolerance = get_solver_config().splice_tolerance
    last = float(data.values[-1])
    model = float(tail.value(tail.t_splice))
    mismatch = abs(model - last) / max(abs(last), np.finfo(float).tiny)
    if mismatch > tolerance:
        raise TailFitError(
            f"{tail.kind} tail misses the last sample by {100 * mismatch:.2f}% "
            f"(allowed {100 * tolerance:.1f}%)",
            mismatch=mismatch,
        )
    return tail


def _fit_algebraic(data: SampledResponse) -> Tuple[TailModel, float]:
    t, v = _tail_window(data)
    slope, intercept = np.polyfit(np.log(t), np.log(v), 1)
    if slope >= 0:
        raise TailFitError(f"tail does not decay (log-log slope {slope:.3g})", slope=float(slope))
    p = -float(slope)
    coefficient = math.exp(float(intercept))
    t_splice = data.t_max
    if 0 < p < 1:
        amplitude = math.cos(0.5 * math.pi * p)
        omega_c = (amplitude / coefficient) ** (1.0 / p)
    else:
        omega_c = 1.0 / t_splice
        amplitude = coefficient * t_splice ** (-p)
    tail = TailModel(kind="algebraic", t_splice=t_splice, s=p, omega_c=omega_c, amplitude=amplitude)
    rms = float(np.sqrt(np.mean((tail.value(t) - v) ** 2)))
    return _check_splice(tail, data), rms


def _fit_exponential(data: SampledResponse) -> Tuple[TailModel, float]:
    t, v = _tail_window(data)
    slope, intercept = np.polyfit(t, np.log(v), 1)
    if slope >= 0:
        raise TailFitError(f"tail does not decay (log-linear slope {slope:.3g})", slope=float(slope))
    tail = TailModel(kind="exponential", t_splice=data.t_max, rate=-float(slope),
                     amplitude=math.exp(float(intercept)))
    rms = float(np.sqrt(np.mean((tail.value(t) - v) ** 2)))
    return _check_splice(tail, data), rms


def fit_tail(s_data: SampledResponse, kind: TailKind = "algebraic") -> TailModel:
    """
    Fit a long-time extrapolation to the final 20% of the samples.

    ``none`` splices at the start of a run of trailing exact zeros (t_max
    otherwise); ``auto`` picks none for such data and else the algebraic or
    exponential law with the lower RMS misfit.
    """
    zero_start = _trailing_zero_start(s_data)
    if kind == "none":
        return TailModel(kind="none", t_splice=zero_start if zero_start is not None else s_data.t_max)
    if kind == "algebraic":
        return _fit_algebraic(s_data)[0]
    if kind == "exponential":
        return _fit_exponential(s_data)[0]
    if kind != "auto":
        raise UsageError(f"unknown tail kind {kind!r}; use auto, none, algebraic or exponential")

    if zero_start is not None:
        return TailModel(kind="none", t_splice=zero_start)
    candidates = []
    failures = []
    for fitter in (_fit_algebraic, _fit_exponential):
        try:
            candidates.append(fitter(s_data))
        except TailFitError as e:
            failures.append(e.message)
    if not candidates:
        raise TailFitError("no tail model fits the data: " + "; ".join(failures))
    tail, rms = min(candidates, key=lambda pair: pair[1])
    logger.info("Automatic tail choice: %s (rms %.3g)", tail.kind, rms)
    return tail


# Inverse transform

def _data_until(data: SampledResponse, t_splice: float) -> Tuple[np.ndarray, np.ndarray]:
    if t_splice >= data.t_max:
        return data.times, data.values
    inside = data.times < t_splice
    t = np.append(data.times[inside], t_splice)
    v = np.append(data.values[inside], np.interp(t_splice, data.times, data.values))
    return t, v


def invert_density(
    s_data: SampledResponse,
    lam: float,
    omega_grid,
    tail: TailModel,
) -> TabulatedSpectralFunction:
    """
    K(w) = (2 lambda/pi) int_0^inf S(t) cos(wt) dt on ``omega_grid``.

    The data region is integrated exactly for the piecewise-linear
    interpolant; beyond ``tail.t_splice`` the tail model's cosine integral
    is added in closed form.
    """
    if not math.isfinite(lam) or lam < 0:
        raise DomainError(f"lambda must be finite and >= 0, got {lam}")
    omegas = _increasing_grid(omega_grid, "omega_grid", positive=True)

    last = float(s_data.values[-1])
    if last >= UNDECAYED_LEVEL:
        logger.warning(
            "S(t_max) = %.3f: the data does not span one decay; the inversion is extrapolation-dominated",
            last,
        )
    if tail.kind == "none" and last > NEEDS_TAIL_LEVEL:
        raise TailNeededError(
            f"S(t_max) = {last:.3g} has not decayed below {NEEDS_TAIL_LEVEL}; supply a tail model",
            last_value=last,
        )

    t, v = _data_until(s_data, tail.t_splice if tail.kind != "none" else s_data.t_max)
    integral, _ = filon_moments(t, v, omegas)
    head_exponent = 0.0
    if tail.kind == "exponential":
        integral = integral + exponential_tail_cosine(tail, omegas)
    elif tail.kind == "algebraic":
        integral = integral + algebraic_tail_cosine(tail, omegas)
        head_exponent = tail.s - 1.0

    k_values = (2.0 * lam / math.pi) * integral
    spectral = TabulatedSpectralFunction(
        omegas=omegas,
        k_values=k_values,
        reorganization_energy=lam,
        head_exponent=head_exponent,
        omega_floor=get_solver_config().omega_floor,
    )
    logger.info("Inverted %d samples onto %d frequencies (tail %s, normalization defect %.3g)",
                s_data.n, omegas.size, tail.kind, spectral.normalization_defect)
    return spectral


# Frequency grids

def _one_over_e_time(data: SampledResponse) -> float:
    below = np.flatnonzero(data.values <= data.values[0] / math.e)
    return float(data.times[below[0]]) if below.size else data.t_max


def default_omega_grid(
    omega_c: Optional[float] = None,
    points: Optional[int] = None,
    data: Optional[SampledResponse] = None,
) -> np.ndarray:
    """
    Logarithmic grid over [w_c/100, 20 w_c], or over [0.01, 100]/tau_e when only
    data is available (tau_e is the first 1/e crossing, t_max if none).

    With data the lower end also reaches down to 0.1/t_max, and the grid keeps
    at least 10 points per decade.
    """
    points = points or get_solver_config().omega_points
    if points < 2:
        raise DomainError("a frequency grid needs >= 2 points")
    if omega_c is not None:
        if not omega_c > 0:
            raise DomainError(f"omega_c must be > 0, got {omega_c}")
        lo, hi = omega_c / 100.0, 20.0 * omega_c
    elif data is None:
        raise UsageError("default_omega_grid needs omega_c or data")
    else:
        tau_e = _one_over_e_time(data)
        if tau_e <= 0:
            raise DomainError("the data has no positive decay time")
        lo, hi = 0.01 / tau_e, 100.0 / tau_e
    if data is not None:
        lo = min(lo, DATA_SPAN_FLOOR / data.t_max)
    decades = math.log10(hi / lo)
    points = max(points, int(math.ceil(MIN_POINTS_PER_DECADE * decades)) + 1)
    return np.geomspace(lo, hi, points)


def refine_omega_grid(omegas, t_max: float, factor: Optional[float] = None) -> np.ndarray:
    """Insert uniform points wherever the spacing reaches factor/t_max (factor defaults to pi/4)."""
    grid = _increasing_grid(omegas, "omegas", positive=True)
    if not t_max > 0:
        return grid
    factor = factor or get_solver_config().resolution_factor
    limit = factor / t_max
    pieces = [grid[:1]]
    for left, right in zip(grid[:-1], grid[1:]):
        count = int(math.floor((right - left) / limit)) + 1
        pieces.append(np.linspace(left, right, count + 1)[1:])
    return np.concatenate(pieces)
