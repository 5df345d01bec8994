import math
from enum import Enum
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

from stokes_sd.constants import HBAR_OVER_KB_PS_K
from stokes_sd.validation import DomainError

AMPLITUDE_SUM_TOLERANCE = 1e-9


def _require_finite(**values: float) -> None:
    for name, value in values.items():
        if not math.isfinite(value):
            raise DomainError(f"{name} must be finite, got {value}", parameter=name)


class Regime(str, Enum):
    SUB_OHMIC = "sub-ohmic"
    OHMIC = "ohmic"
    SUPER_OHMIC = "super-ohmic"


class SubOhmicParams(BaseModel):
    """J(w) = 2 delta_s w_ph^(1-s) w^(s-2) exp(-w/w_c)."""
    model_config = ConfigDict(frozen=True)

    delta_s: float = Field(default=1.0, description="Dimensionless coupling constant")
    omega_ph: float = Field(description="Phononic scale frequency (rad/ps)")
    omega_c: float = Field(description="Cutoff frequency (rad/ps)")
    s: float = Field(description="Low-frequency exponent")

    @model_validator(mode="after")
    def _check_domain(self) -> "SubOhmicParams":
        _require_finite(delta_s=self.delta_s, omega_ph=self.omega_ph, omega_c=self.omega_c, s=self.s)
        for name in ("delta_s", "omega_ph", "omega_c", "s"):
            value = getattr(self, name)
            if value <= 0:
                raise DomainError(f"{name} must be > 0, got {value}", parameter=name)
        return self

    @classmethod
    def from_fit(cls, omega_c: float, s: float) -> "SubOhmicParams":
        """Parameters for a fitted (omega_c, s) pair: delta_s = 1, omega_ph = omega_c."""
        return cls(delta_s=1.0, omega_ph=omega_c, omega_c=omega_c, s=s)

    @property
    def regime(self) -> Regime:
        if self.s < 1:
            return Regime.SUB_OHMIC
        if self.s == 1:
            return Regime.OHMIC
        return Regime.SUPER_OHMIC


class GaussBiexpParams(BaseModel):
    """S(t) = a_g exp(-w_d t^2/2) + a_1 exp(-t/tau_1) + a_2 exp(-t/tau_2)."""
    model_config = ConfigDict(frozen=True)

    a_g: float = Field(description="Gaussian amplitude")
    omega_d: float = Field(description="Gaussian decay parameter (1/ps^2)")
    a_1: float = Field(description="First exponential amplitude")
    tau_1: float = Field(description="First exponential time constant (ps)")
    a_2: float = Field(description="Second exponential amplitude")
    tau_2: float = Field(description="Second exponential time constant (ps)")
    normalized: bool = Field(
        default=False,
        description="Require a_g + a_1 + a_2 = 1 (user-constructed normalized models)"
    )

    @model_validator(mode="after")
    def _check_domain(self) -> "GaussBiexpParams":
        _require_finite(a_g=self.a_g, omega_d=self.omega_d, a_1=self.a_1,
                        tau_1=self.tau_1, a_2=self.a_2, tau_2=self.tau_2)
        for name in ("a_g", "a_1", "a_2"):
            value = getattr(self, name)
            if value < 0:
                raise DomainError(f"{name} must be >= 0, got {value}", parameter=name)
        for name in ("omega_d", "tau_1", "tau_2"):
            value = getattr(self, name)
            if value <= 0:
                raise DomainError(f"{name} must be > 0, got {value}", parameter=name)
        if self.normalized and abs(self.amplitude_sum - 1.0) > AMPLITUDE_SUM_TOLERANCE:
            raise DomainError(
                f"normalized model requires a_g + a_1 + a_2 = 1, got {self.amplitude_sum!r}",
                amplitude_sum=self.amplitude_sum,
            )
        return self

    @property
    def amplitude_sum(self) -> float:
        return self.a_g + self.a_1 + self.a_2

    def is_normalized(self, tolerance: float = AMPLITUDE_SUM_TOLERANCE) -> bool:
        return abs(self.amplitude_sum - 1.0) <= tolerance


class PhysicalContext(BaseModel):
    """Temperature plus the unit declaration used by thermal quantities."""
    model_config = ConfigDict(frozen=True)

    temperature: float = Field(description="Temperature in kelvin")
    units: Literal["rad/ps"] = Field(
        default="rad/ps",
        description="Frequencies are angular (rad/ps); energies are hbar*omega in rad/ps"
    )

    @model_validator(mode="after")
    def _check_domain(self) -> "PhysicalContext":
        _require_finite(temperature=self.temperature)
        if self.temperature < 0:
            raise DomainError(f"temperature must be >= 0 K, got {self.temperature}")
        return self

    def require_thermal(self) -> None:
        if self.temperature <= 0:
            raise DomainError(
                "this quantity needs a temperature > 0 K",
                temperature=self.temperature,
            )

    @property
    def hbar_beta(self) -> float:
        """hbar/(k_B T) in ps."""
        from stokes_sd.sdcore import hbar_beta

        return hbar_beta(self.temperature)

    @property
    def thermal_frequency(self) -> float:
        """k_B T / hbar in rad/ps (zero at T = 0)."""
        return self.temperature / HBAR_OVER_KB_PS_K
