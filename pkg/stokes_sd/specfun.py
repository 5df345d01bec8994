"""
Special functions for the closed-form sub-Ohmic quantities.

``gamma_fn`` is a Lanczos approximation (g = 7, nine coefficients) with the
reflection formula below 1/2. ``hurwitz_zeta`` evaluates the generalized
Riemann zeta function zeta(z, q) for real z < 1 and complex q with positive
real part by Euler-Maclaurin summation: the argument is shifted by N integer
steps, the remainder is replaced by its asymptotic expansion with Bernoulli
corrections up to B_60, and the size of the last correction plus a rounding
bound is reported as the error estimate.
"""

import cmath
import math
from typing import Optional, Tuple

import mpmath
import numpy as np

from stokes_sd.config import get_solver_config
from stokes_sd.validation import DomainError, ZetaAccuracyError

LANCZOS_G = 7
LANCZOS_COEFFICIENTS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)

SQRT_TWO_PI = math.sqrt(2.0 * math.pi)

# B_2j / (2j)! for j = 1..30
BERNOULLI_RATIOS = tuple(
    float(mpmath.bernoulli(2 * j) / mpmath.factorial(2 * j)) for j in range(1, 31)
)

MIN_SHIFT_MODULUS = 10.0
MAX_SHIFT_DOUBLINGS = 4


def sinpi(x: float) -> float:
    """sin(pi x) with exact argument reduction to [-1/2, 1/2]."""
    r = math.fmod(x, 2.0)
    if r > 1.0:
        r -= 2.0
    elif r < -1.0:
        r += 2.0
    if r > 0.5:
        r = 1.0 - r
    elif r < -0.5:
        r = -1.0 - r
    return math.sin(math.pi * r)


def _lanczos(x: float) -> float:
    x -= 1.0
    a = LANCZOS_COEFFICIENTS[0]
    for i in range(1, LANCZOS_G + 2):
        a += LANCZOS_COEFFICIENTS[i] / (x + i)
    t = x + LANCZOS_G + 0.5
    # split the power so large x does not overflow before exp(-t) is applied
    half = t ** ((x + 0.5) / 2.0)
    return SQRT_TWO_PI * half * (half * math.exp(-t)) * a


def gamma_fn(x: float) -> float:
    """Gamma function on the real line minus the non-positive integers."""
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"gamma_fn needs a finite argument, got {x}")
    if x <= 0 and x == math.floor(x):
        raise DomainError(f"gamma_fn has a pole at {x}", pole=x)
    if x < 0.5:
        return math.pi / (sinpi(x) * _lanczos(1.0 - x))
    return _lanczos(x)


def _as_finite_complex(q) -> complex:
    q = complex(q)
    if not (math.isfinite(q.real) and math.isfinite(q.imag)):
        raise DomainError(f"q must have finite components, got {q}")
    return q


def _shift_for(z: float, q: complex) -> int:
    target = max(MIN_SHIFT_MODULUS, abs(z))
    return max(0, int(math.ceil(target - q.real)))


def _euler_maclaurin(z: float, q: complex, shift: int, tolerance: float) -> Tuple[complex, float]:
    eps = np.finfo(float).eps
    if shift:
        head_terms = np.power(q + np.arange(shift, dtype=float), -z)
    else:
        head_terms = np.zeros(0, dtype=complex)
    total = complex(np.sum(head_terms))
    magnitude = float(np.sum(np.abs(head_terms)))

    w = q + shift
    w_pow = cmath.exp((1.0 - z) * cmath.log(w))  # w^(1-z)
    integral = w_pow / (z - 1.0)
    boundary = 0.5 * w_pow / w
    total += integral + boundary
    magnitude += abs(integral) + abs(boundary)

    inv_w2 = 1.0 / (w * w)
    power = w_pow * inv_w2  # w^(-z-1)
    rising = z  # (z)_1
    last = 0.0
    for j, ratio in enumerate(BERNOULLI_RATIOS, start=1):
        if j > 1:
            power *= inv_w2
            rising *= (z + 2 * j - 3) * (z + 2 * j - 2)
        term = ratio * rising * power
        total += term
        magnitude += abs(term)
        last = abs(term)
        if rising == 0.0 or last <= 0.1 * tolerance * abs(total):
            break

    return total, last + 16.0 * eps * magnitude


def hurwitz_zeta_with_error(
    z: float,
    q,
    shift: Optional[int] = None,
    tolerance: Optional[float] = None,
) -> Tuple[complex, float]:
    """
    zeta(z, q) and an absolute error estimate.

    ``shift`` overrides the number of directly summed terms; by default it is
    the smallest N with Re(q + N) >= max(10, |z|). When the estimate misses
    the relative tolerance the shift is doubled a few times before giving up.
    """
    z = float(z)
    if not math.isfinite(z):
        raise DomainError(f"z must be finite, got {z}")
    if z >= 1.0:
        raise DomainError(f"hurwitz_zeta is provided for z < 1 only, got z = {z}")
    q = _as_finite_complex(q)
    if q.real <= 0:
        raise DomainError(f"hurwitz_zeta needs Re(q) > 0, got q = {q}")
    if tolerance is None:
        tolerance = get_solver_config().zeta_tolerance

    n = _shift_for(z, q) if shift is None else int(shift)
    value, estimate = _euler_maclaurin(z, q, n, tolerance)
    if shift is not None:
        return value, estimate
    for _ in range(MAX_SHIFT_DOUBLINGS):
        if estimate <= tolerance * max(abs(value), np.finfo(float).tiny):
            return value, estimate
        n = max(2 * n, 1)
        value, estimate = _euler_maclaurin(z, q, n, tolerance)
    if estimate > tolerance * abs(value):
        raise ZetaAccuracyError(
            f"zeta({z}, {q}) did not reach relative accuracy {tolerance:g}",
            estimate=estimate,
            z=z,
            q=str(q),
        )
    return value, estimate


def hurwitz_zeta(z: float, q) -> complex:
    """Generalized (Hurwitz) Riemann zeta function zeta(z, q)."""
    value, _ = hurwitz_zeta_with_error(z, q)
    return value
