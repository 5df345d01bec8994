from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field


class HuangRhysFactor(BaseModel):
    """Finite(value) or InfraredDivergent."""
    model_config = ConfigDict(frozen=True)

    kind: Literal["finite", "infrared-divergent"]
    value: Optional[float] = None
    logarithmic: bool = Field(default=False, description="Divergence is logarithmic (s = 1)")

    @property
    def is_finite(self) -> bool:
        return self.kind == "finite"


class RegressionReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    temperatures: List[float] = Field(description="Temperatures in increasing order (K)")
    thermal_ratios: List[float] = Field(description="k_B T / (hbar omega_c) for each temperature")
    deviations: List[float] = Field(description="Sup-norm deviation from S(t) at each temperature")
    monotone: bool = Field(description="Deviation strictly decreases with temperature")
