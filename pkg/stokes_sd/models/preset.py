from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from stokes_sd.models.params import GaussBiexpParams, SubOhmicParams
from stokes_sd.validation import DomainError


class PresetEntry(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    system: str
    model: Literal["subohmic", "subohmic-baseline", "gauss-biexp"]
    subohmic: Optional[SubOhmicParams] = None
    gauss_biexp: Optional[GaussBiexpParams] = None
    baseline_caption: Optional[float] = Field(
        default=None,
        description="Baseline as printed next to the fit (labeled cm^-1), stored verbatim"
    )
    baseline_caption_unit: Optional[str] = None
    baseline: Optional[float] = Field(
        default=None,
        description="Dimensionless baseline b0; unset until the caption value is interpreted"
    )
    prefactor_unconstrained: bool = Field(
        default=False,
        description="delta_s and omega_ph are defaults, not constrained by S(t)"
    )
    provenance: str
    notes: str = ""

    @model_validator(mode="after")
    def _check_entry(self) -> "PresetEntry":
        if not self.provenance.strip():
            raise DomainError(f"preset {self.name} needs a provenance")
        if self.model == "gauss-biexp" and self.gauss_biexp is None:
            raise DomainError(f"preset {self.name} needs Gauss+biexponential parameters")
        if self.model != "gauss-biexp" and self.subohmic is None:
            raise DomainError(f"preset {self.name} needs sub-Ohmic parameters")
        return self
