"""
Registry of published parameter sets.

Values are stored verbatim; frequencies quoted in ps^-1 are read as rad/ps.
Fitted sub-Ohmic presets only constrain (omega_c, s): delta_s = 1 and
omega_ph = omega_c are defaults and the entry is flagged accordingly.
"""

import logging
from typing import Dict, List, Optional, Union

from stokes_sd.models.params import GaussBiexpParams, SubOhmicParams
from stokes_sd.models.preset import PresetEntry
from stokes_sd.validation import PresetLookupError, UsageError

logger = logging.getLogger(__name__)

COUMARIN_SOURCE = "coumarin 343 in water, time-resolved fluorescence Stokes shift"
GB1_SOURCE = "GB1 Aladan mutants, time dependence of peak emission energies"
RHODOPSIN_SOURCE = "bovine rhodopsin, dynamic Stokes shift measured at"
FP_SOURCE = "red fluorescent proteins, dynamic Stokes shift"
BASELINE_CAVEAT = (
    "b0 is printed as {value:g} cm^-1 but enters [S(t) + b0]/(1 + b0) as a pure number; "
    "supply a dimensionless b0 explicitly"
)


def _fitted(name: str, system: str, omega_c: float, s: float, provenance: str, notes: str = "") -> PresetEntry:
    return PresetEntry(
        name=name,
        system=system,
        model="subohmic",
        subohmic=SubOhmicParams.from_fit(omega_c, s),
        prefactor_unconstrained=True,
        provenance=provenance,
        notes=notes,
    )


def _baseline(name: str, system: str, omega_c: float, s: float, caption: float, provenance: str) -> PresetEntry:
    return PresetEntry(
        name=name,
        system=system,
        model="subohmic-baseline",
        subohmic=SubOhmicParams.from_fit(omega_c, s),
        baseline_caption=caption,
        baseline_caption_unit="cm^-1",
        baseline=None,
        prefactor_unconstrained=True,
        provenance=provenance,
        notes=BASELINE_CAVEAT.format(value=caption),
    )


PRESETS: Dict[str, PresetEntry] = {entry.name: entry for entry in (
    PresetEntry(
        name="coumarin343-eq6",
        system="Coumarin 343 in water",
        model="gauss-biexp",
        gauss_biexp=GaussBiexpParams(a_g=0.48, omega_d=38.5, a_1=0.20, tau_1=0.126, a_2=0.35, tau_2=0.880),
        provenance=f"{COUMARIN_SOURCE}: Gaussian plus biexponential parametrization",
        notes=(
            "omega_d is quoted as 38.5 ps^-1 but multiplies t^2, so it is stored in ps^-2; "
            "amplitudes sum to 1.03 and are not renormalized"
        ),
    ),
    _fitted("coumarin343", "Coumarin 343 in water", 6.25846, 0.785158,
            f"{COUMARIN_SOURCE}: sub-Ohmic fit"),
    _fitted("gb1-phe30", "GB1 Aladan mutant Phe30", 1.59407, 0.003447, f"{GB1_SOURCE}: Phe30"),
    _fitted("gb1-leu7", "GB1 Aladan mutant Leu7", 5.8407, 0.00433494, f"{GB1_SOURCE}: Leu7"),
    _fitted("gb1-trp43", "GB1 Aladan mutant Trp43", 2.32145, 0.00735004, f"{GB1_SOURCE}: Trp43"),
    _fitted("rhodopsin-530nm", "Bovine rhodopsin, 530 nm", 14.661, 0.736, f"{RHODOPSIN_SOURCE} 530 nm"),
    _fitted("rhodopsin-580nm", "Bovine rhodopsin, 580 nm", 17.878, 0.554, f"{RHODOPSIN_SOURCE} 580 nm"),
    _fitted("rhodopsin-630nm", "Bovine rhodopsin, 630 nm", 7.926, 0.489, f"{RHODOPSIN_SOURCE} 630 nm"),
    _fitted("rhodopsin-680nm", "Bovine rhodopsin, 680 nm", 5.677, 0.529, f"{RHODOPSIN_SOURCE} 680 nm"),
    _fitted("rhodopsin-730nm", "Bovine rhodopsin, 730 nm", 5.382, 0.594, f"{RHODOPSIN_SOURCE} 730 nm"),
    _fitted("rhodopsin-780nm", "Bovine rhodopsin, 780 nm", 7.985, 0.643, f"{RHODOPSIN_SOURCE} 780 nm"),
    _baseline("mplum-ph7", "mPlum, pH 7", 143.90, 0.467, 17.493e3, f"{FP_SOURCE}: mPlum at pH 7"),
    _baseline("mplum-ph11", "mPlum, pH 11", 202.04, 0.5296, 22.722e3, f"{FP_SOURCE}: mPlum at pH 11"),
    _fitted("mrfp", "mRFP, pH 7 buffer", 0.1995, 0.0011, f"{FP_SOURCE}: mRFP at pH 7",
            notes="described without a baseline contribution"),
    _fitted("mraspberry", "mRaspberry, pH 7 buffer", 0.1967, 0.0011, f"{FP_SOURCE}: mRaspberry at pH 7",
            notes="described without a baseline contribution"),
)}


def list_presets() -> List[PresetEntry]:
    return list(PRESETS.values())


def get_preset(name: str) -> PresetEntry:
    """Look up a preset by name (case-insensitive)."""
    entry = PRESETS.get(name.strip().lower())
    if entry is None:
        raise PresetLookupError(name, sorted(PRESETS))
    if entry.gauss_biexp is not None and not entry.gauss_biexp.is_normalized():
        logger.warning(
            "Preset %s: amplitudes sum to %.4g, not 1; S(0) differs from 1",
            entry.name, entry.gauss_biexp.amplitude_sum,
        )
    return entry


def preset_baseline(entry: PresetEntry, b0: Optional[float] = None) -> float:
    """Dimensionless b0 for a baseline preset; an explicit value overrides the registry."""
    if b0 is not None:
        return b0
    if entry.baseline is not None:
        return entry.baseline
    if entry.model != "subohmic-baseline":
        return 0.0
    raise UsageError(
        f"preset {entry.name} has no dimensionless b0; pass one explicitly (--b0)",
        caption=entry.baseline_caption,
        unit=entry.baseline_caption_unit,
    )


def resolve_model(
    preset: Optional[str] = None,
    omega_c: Optional[float] = None,
    s: Optional[float] = None,
    delta_s: Optional[float] = None,
    omega_ph: Optional[float] = None,
) -> Union[SubOhmicParams, GaussBiexpParams]:
    """A preset's parameters, or sub-Ohmic parameters given explicitly."""
    if preset is not None:
        if any(v is not None for v in (omega_c, s, delta_s, omega_ph)):
            raise UsageError("give either a preset or explicit model parameters, not both")
        entry = get_preset(preset)
        return entry.gauss_biexp if entry.model == "gauss-biexp" else entry.subohmic
    if omega_c is None or s is None:
        raise UsageError("give a preset name or both omega_c and s")
    return SubOhmicParams(
        delta_s=1.0 if delta_s is None else delta_s,
        omega_ph=omega_ph or omega_c,
        omega_c=omega_c,
        s=s,
    )


def resolve_subohmic(
    preset: Optional[str] = None,
    omega_c: Optional[float] = None,
    s: Optional[float] = None,
    delta_s: Optional[float] = None,
    omega_ph: Optional[float] = None,
) -> SubOhmicParams:
    params = resolve_model(preset, omega_c, s, delta_s, omega_ph)
    if not isinstance(params, SubOhmicParams):
        raise UsageError(f"preset {preset} is a Gauss+biexponential model; this needs a sub-Ohmic density")
    return params
