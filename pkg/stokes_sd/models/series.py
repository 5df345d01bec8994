"""
Sampled series: measured responses, tabulated spectral functions, tails,
line-shape functions and spectra.

Arrays are stored as read-only float (or complex) numpy arrays and dumped as
plain lists, so every series serializes with ``model_dump_json``.
"""

import logging
from typing import Annotated, Any, Literal, Optional

import numpy as np
from scipy.integrate import trapezoid
from pydantic import (
    BaseModel,
    BeforeValidator,
    ConfigDict,
    Field,
    PlainSerializer,
    computed_field,
    model_validator,
)

from stokes_sd.models.params import PhysicalContext
from stokes_sd.validation import DomainError

logger = logging.getLogger(__name__)


def _as_float_array(value: Any) -> np.ndarray:
    array = np.array(value, dtype=float)
    if array.ndim != 1:
        raise DomainError(f"expected a one-dimensional series, got shape {array.shape}")
    array.setflags(write=False)
    return array


def _as_complex_array(value: Any) -> np.ndarray:
    if isinstance(value, dict):
        value = np.asarray(value["re"], dtype=float) + 1j * np.asarray(value["im"], dtype=float)
    array = np.array(value, dtype=complex)
    if array.ndim != 1:
        raise DomainError(f"expected a one-dimensional series, got shape {array.shape}")
    array.setflags(write=False)
    return array


FloatArray = Annotated[
    np.ndarray,
    BeforeValidator(_as_float_array),
    PlainSerializer(lambda a: a.tolist(), return_type=list),
]

ComplexArray = Annotated[
    np.ndarray,
    BeforeValidator(_as_complex_array),
    PlainSerializer(lambda a: {"re": a.real.tolist(), "im": a.imag.tolist()}, return_type=dict),
]


def _check_increasing(values: np.ndarray, name: str) -> None:
    if values.size > 1 and np.any(np.diff(values) <= 0):
        raise DomainError(f"{name} must be strictly increasing")


class SampledResponse(BaseModel):
    """Stokes-shift samples S(t) on a nonuniform time grid starting at t = 0."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    times: FloatArray = Field(description="Time grid (ps)")
    values: FloatArray = Field(description="Dimensionless S(t) samples")
    sigma: Optional[FloatArray] = Field(default=None, description="Per-point standard uncertainty")
    source: str = Field(default="", description="Source label")

    @model_validator(mode="after")
    def _check_series(self) -> "SampledResponse":
        if self.times.size == 0:
            raise DomainError("a response needs at least one sample")
        if self.times.shape != self.values.shape:
            raise DomainError("times and values must have the same length")
        if not (np.all(np.isfinite(self.times)) and np.all(np.isfinite(self.values))):
            raise DomainError("times and values must be finite")
        if self.times[0] != 0.0:
            raise DomainError(f"the time grid must start at t = 0, got {self.times[0]!r}")
        _check_increasing(self.times, "times")
        if self.sigma is not None:
            if self.sigma.shape != self.times.shape:
                raise DomainError("sigma must have the same length as times")
            if not np.all(np.isfinite(self.sigma)) or np.any(self.sigma <= 0):
                raise DomainError("sigma must be finite and > 0 (zero weights are undefined)")
        if not 0.9 <= self.values[0] <= 1.1:
            logger.warning(
                "S(0) = %r lies outside [0.9, 1.1]; the data may not be normalized (%s)",
                float(self.values[0]), self.source or "unlabeled",
            )
        return self

    @classmethod
    def from_unsorted(cls, times, values, sigma=None, source: str = "") -> "SampledResponse":
        """Sort samples by time; duplicate times are rejected."""
        times = np.asarray(times, dtype=float)
        order = np.argsort(times, kind="stable")
        times = times[order]
        if times.size > 1 and np.any(np.diff(times) == 0):
            raise DomainError("duplicate sample times")
        values = np.asarray(values, dtype=float)[order]
        if sigma is not None:
            sigma = np.asarray(sigma, dtype=float)[order]
        return cls(times=times, values=values, sigma=sigma, source=source)

    @property
    def n(self) -> int:
        return int(self.times.size)

    @property
    def t_max(self) -> float:
        return float(self.times[-1])

    def normalized(self) -> "SampledResponse":
        """Divide by S(0) so that the first sample is exactly 1."""
        scale = float(self.values[0])
        if scale == 0:
            raise DomainError("cannot normalize a response with S(0) = 0")
        sigma = None if self.sigma is None else self.sigma / abs(scale)
        return SampledResponse(times=self.times, values=self.values / scale, sigma=sigma,
                               source=self.source)


class TailModel(BaseModel):
    """Long-time extrapolation of S(t) beyond ``t_splice``."""
    model_config = ConfigDict(frozen=True)

    kind: Literal["none", "algebraic", "exponential"]
    t_splice: float = Field(description="Time beyond which the model replaces the data (ps)")
    s: Optional[float] = Field(default=None, description="Algebraic exponent")
    omega_c: Optional[float] = Field(default=None, description="Algebraic time scale (rad/ps)")
    amplitude: Optional[float] = Field(default=None, description="Tail amplitude")
    rate: Optional[float] = Field(default=None, description="Exponential rate (1/ps)")

    @model_validator(mode="after")
    def _check_fields(self) -> "TailModel":
        if self.t_splice < 0:
            raise DomainError("t_splice must be >= 0")
        if self.kind == "algebraic":
            if self.s is None or self.omega_c is None or self.amplitude is None:
                raise DomainError("an algebraic tail needs s, omega_c and amplitude")
            if self.s <= 0 or self.omega_c <= 0:
                raise DomainError("an algebraic tail needs s > 0 and omega_c > 0")
        elif self.kind == "exponential":
            if self.rate is None or self.amplitude is None:
                raise DomainError("an exponential tail needs rate and amplitude")
            if self.rate <= 0:
                raise DomainError("an exponential tail needs rate > 0")
        return self

    def value(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if self.kind == "algebraic":
            return self.amplitude * (self.omega_c * t) ** (-self.s)
        if self.kind == "exponential":
            return self.amplitude * np.exp(-self.rate * t)
        return np.zeros_like(t)


class TabulatedSpectralFunction(BaseModel):
    """
    K(w) = w J(w) on a positive frequency grid.

    Below the first grid point K is continued as K_0 (w/w_0)^head_exponent,
    which carries the low-frequency weight into every integral over K.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    omegas: FloatArray = Field(description="Frequency grid (rad/ps)")
    k_values: FloatArray = Field(description="K(w) = w J(w) samples")
    reorganization_energy: float = Field(description="lambda used for normalization (hbar rad/ps)")
    head_exponent: float = Field(default=0.0, description="Power of K below the first grid point")
    omega_floor: float = Field(default=1e-4, description="J is not evaluable below this frequency")

    @model_validator(mode="after")
    def _check_grid(self) -> "TabulatedSpectralFunction":
        if self.omegas.size < 2 or self.omegas.shape != self.k_values.shape:
            raise DomainError("a tabulated spectral function needs >= 2 matching (omega, K) samples")
        if not (np.all(np.isfinite(self.omegas)) and np.all(np.isfinite(self.k_values))):
            raise DomainError("omegas and K values must be finite")
        if self.omegas[0] <= 0:
            raise DomainError("all grid frequencies must be > 0")
        _check_increasing(self.omegas, "omegas")
        if self.reorganization_energy < 0:
            raise DomainError("the reorganization energy must be >= 0")
        if self.head_exponent <= -1:
            raise DomainError("head_exponent must be > -1 for an integrable K")
        if self.has_negative_lobes:
            logger.warning("K(w) has negative lobes (min %.3e); the inversion is noise-limited",
                           float(self.k_values.min()))
        return self

    @property
    def has_negative_lobes(self) -> bool:
        return bool(np.any(self.k_values < 0))

    def head_weight(self) -> float:
        """Integral of the power-law continuation over [0, w_0]."""
        return float(self.k_values[0] * self.omegas[0] / (self.head_exponent + 1.0))

    def grid_reorganization(self) -> float:
        """hbar * integral of K over the head plus the trapezoid over the grid."""
        return self.head_weight() + float(trapezoid(self.k_values, self.omegas))

    @computed_field
    @property
    def normalization_defect(self) -> float:
        if self.reorganization_energy == 0:
            return 0.0
        return abs(self.grid_reorganization() - self.reorganization_energy) / self.reorganization_energy

    def j_values(self) -> np.ndarray:
        """J = K/w, NaN below the frequency floor."""
        with np.errstate(divide="ignore", invalid="ignore"):
            j = self.k_values / self.omegas
        return np.where(self.omegas < self.omega_floor, np.nan, j)


class LineShapeSeries(BaseModel):
    """g(t) = coherent + thermal + zero_point on a time grid."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    times: FloatArray
    values: ComplexArray
    coherent: ComplexArray = Field(description="-i lambda t + i int J sin(wt)")
    thermal: FloatArray = Field(description="2 int J n(w) (1 - cos wt)")
    zero_point: FloatArray = Field(description="int J (1 - cos wt)")
    context: PhysicalContext
    reorganization_energy: float
    method: Literal["numeric", "closed"]

    @model_validator(mode="after")
    def _check_series(self) -> "LineShapeSeries":
        _check_increasing(self.times, "times")
        if self.values.shape != self.times.shape:
            raise DomainError("g values and times must have the same length")
        scale = max(1.0, float(np.max(np.abs(self.values)))) if self.values.size else 1.0
        if np.any(self.values.real < -1e-9 * scale):
            logger.warning("Re g(t) dips below zero (min %.3e); check the quadrature tolerances",
                           float(self.values.real.min()))
        return self


class SpectrumSeries(BaseModel):
    """A tabulated spectrum on an angular-frequency grid."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    omegas: FloatArray = Field(description="Frequency grid (rad/ps)")
    values: FloatArray
    kind: Literal["absorption", "fluorescence", "noise"]
    window_error: float = Field(default=0.0, description="Estimated truncation plus interpolation error")
    certified: bool = Field(default=True, description="window_error below the configured tolerance")

    def peak_frequency(self) -> float:
        return float(self.omegas[int(np.argmax(self.values))])
