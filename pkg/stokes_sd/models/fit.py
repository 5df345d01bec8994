from typing import Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

from stokes_sd.models.params import GaussBiexpParams, SubOhmicParams
from stokes_sd.validation import UsageError

ModelKind = Literal["subohmic", "subohmic-baseline", "gauss-biexp", "ohmic"]

FIT_RESULT_SCHEMA_VERSION = 1


class FitOptions(BaseModel):
    """Key-value fit options; see ``stokes_sd.schemas.FIT_OPTIONS_SCHEMA``."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    max_iterations: int = Field(default=2000, description="Maximum function evaluations per start")
    ftol: float = Field(default=1e-12, description="Relative cost-reduction tolerance")
    xtol: float = Field(default=1e-12, description="Relative step tolerance")
    gtol: float = Field(default=1e-12, description="Gradient-orthogonality tolerance")
    gradient_tol: float = Field(
        default=1e-5,
        description="Largest first-order optimality accepted for a converged report"
    )
    boundary_tol: float = Field(
        default=1e-6,
        description="Distance from a bound (in bounded coordinates) reported as boundary-active"
    )
    ohmic_margin: float = Field(
        default=0.02,
        description="Sub-Ohmic fits with 1 - s below this are reported at the Ohmic edge"
    )
    omega_c_bounds: Tuple[float, float] = Field(
        default=(1e-3, 1e4),
        description="Bounds for omega_c (rad/ps)"
    )
    constrain_amplitudes: bool = Field(
        default=False,
        description="Gauss+biexponential: impose a_g + a_1 + a_2 = 1 by eliminating a_2"
    )
    multistart: bool = Field(default=True, description="Use the full multistart grid")
    use_sigma: bool = Field(default=True, description="Weight residuals by 1/sigma when available")


class FitWindow(BaseModel):
    model_config = ConfigDict(frozen=True)

    t_min: float
    t_max: float
    n_points: int
    weighted: bool


class FitResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    schema_version: int = FIT_RESULT_SCHEMA_VERSION
    model: ModelKind
    params: Dict[str, float]
    param_names: List[str] = Field(default_factory=list, description="Row/column order of the covariance")
    uncertainties: Dict[str, float]
    covariance: List[List[float]] = Field(default_factory=list)
    residual: float = Field(description="Root-mean-square (weighted) misfit")
    chi2: float
    iterations: int
    converged: bool
    optimality: float = Field(description="First-order optimality at the solution")
    boundary_active: List[str] = Field(default_factory=list)
    ill_conditioned: bool = False
    start_index: int = Field(description="Index of the winning multistart point")
    starts_tried: int
    starts_succeeded: int
    window: FitWindow
    message: str = ""

    def subohmic_params(self, delta_s: float = 1.0, omega_ph: Optional[float] = None) -> SubOhmicParams:
        if self.model not in ("subohmic", "subohmic-baseline"):
            raise UsageError(f"a {self.model} fit has no sub-Ohmic parameters")
        omega_c = self.params["omega_c"]
        return SubOhmicParams(delta_s=delta_s, omega_ph=omega_ph or omega_c,
                              omega_c=omega_c, s=self.params["s"])

    def gauss_biexp_params(self) -> GaussBiexpParams:
        if self.model != "gauss-biexp":
            raise UsageError(f"a {self.model} fit has no Gauss+biexponential parameters")
        return GaussBiexpParams(**self.params)


class ModelScore(BaseModel):
    model_config = ConfigDict(frozen=True)

    model: ModelKind
    n_params: int
    residual: float
    aicc: float
    boundary_active: List[str]
    converged: bool


class ModelComparison(BaseModel):
    model_config = ConfigDict(frozen=True)

    ranking: List[str] = Field(description="Models ordered by AICc, best first")
    scores: List[ModelScore]
    best_by_residual: str
    fits: Dict[str, FitResult]
