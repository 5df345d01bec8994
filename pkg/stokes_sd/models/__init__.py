from stokes_sd.models.fit import FitOptions, FitResult, FitWindow, ModelComparison, ModelScore
from stokes_sd.models.params import GaussBiexpParams, PhysicalContext, Regime, SubOhmicParams
from stokes_sd.models.preset import PresetEntry
from stokes_sd.models.reports import HuangRhysFactor, RegressionReport
from stokes_sd.models.series import (
    LineShapeSeries,
    SampledResponse,
    SpectrumSeries,
    TabulatedSpectralFunction,
    TailModel,
)

__all__ = [
    "FitOptions",
    "FitResult",
    "FitWindow",
    "GaussBiexpParams",
    "HuangRhysFactor",
    "LineShapeSeries",
    "ModelComparison",
    "ModelScore",
    "PhysicalContext",
    "PresetEntry",
    "Regime",
    "RegressionReport",
    "SampledResponse",
    "SpectrumSeries",
    "SubOhmicParams",
    "TabulatedSpectralFunction",
    "TailModel",
]
