import numpy as np
import pytest

from stokes_sd.generators.synth import default_t_max, model_values, synthesize
from stokes_sd.models.params import GaussBiexpParams, SubOhmicParams
from stokes_sd.presets import (
    PRESETS,
    get_preset,
    list_presets,
    preset_baseline,
    resolve_model,
    resolve_subohmic,
)
from stokes_sd.validation import DomainError, PresetLookupError, UsageError


def test_registry_holds_fourteen_presets():
    assert len(list_presets()) == 14
    rhodopsin = [e.name for e in list_presets() if e.name.startswith("rhodopsin-")]
    assert len(rhodopsin) == 6


def test_every_preset_has_provenance():
    for entry in list_presets():
        assert entry.provenance
        assert "Fig" not in entry.provenance


def test_lookup_is_case_insensitive():
    assert get_preset(" Coumarin343 ").name == "coumarin343"


def test_unknown_preset_lists_valid_names():
    with pytest.raises(PresetLookupError) as excinfo:
        get_preset("coumarin-153")
    assert "coumarin343" in excinfo.value.details["valid"]


def test_coumarin_values_are_stored_verbatim():
    fitted = get_preset("coumarin343").subohmic
    assert (fitted.omega_c, fitted.s) == (6.25846, 0.785158)
    assert get_preset("coumarin343").prefactor_unconstrained
    gb = get_preset("coumarin343-eq6").gauss_biexp
    assert gb.amplitude_sum == pytest.approx(1.03)
    assert not gb.is_normalized()


def test_gauss_biexp_preset_warns_about_amplitude_sum(caplog):
    with caplog.at_level("WARNING"):
        get_preset("coumarin343-eq6")
    assert "amplitudes sum" in caplog.text


def test_baseline_presets_need_explicit_b0():
    entry = get_preset("mplum-ph7")
    assert entry.baseline is None
    assert entry.baseline_caption == 17.493e3
    with pytest.raises(UsageError):
        preset_baseline(entry)
    assert preset_baseline(entry, 0.5) == 0.5
    assert preset_baseline(get_preset("mrfp")) == 0.0


def test_resolve_model_from_preset_or_parameters():
    assert isinstance(resolve_model(preset="coumarin343-eq6"), GaussBiexpParams)
    p = resolve_model(omega_c=4.0, s=0.3)
    assert p == SubOhmicParams(delta_s=1.0, omega_ph=4.0, omega_c=4.0, s=0.3)
    assert resolve_model(omega_c=4.0, s=0.3, delta_s=0.2, omega_ph=1.0).omega_ph == 1.0


def test_resolve_model_rejects_mixed_input():
    with pytest.raises(UsageError):
        resolve_model(preset="coumarin343", s=0.5)
    with pytest.raises(UsageError):
        resolve_model(omega_c=4.0)


def test_resolve_subohmic_rejects_gauss_biexp():
    with pytest.raises(UsageError):
        resolve_subohmic(preset="coumarin343-eq6")


def test_synthesize_is_deterministic():
    entry = PRESETS["rhodopsin-580nm"]
    first = synthesize(entry, n_points=50, noise=0.01, seed=7)
    second = synthesize(entry, n_points=50, noise=0.01, seed=7)
    np.testing.assert_array_equal(first.values, second.values)
    assert first.source == "synth:rhodopsin-580nm"
    np.testing.assert_array_equal(first.sigma, np.full(50, 0.01))
    other = synthesize(entry, n_points=50, noise=0.01, seed=8)
    assert not np.array_equal(first.values, other.values)


def test_synthesize_defaults(subohmic, coumarin_gb):
    data = synthesize(subohmic)
    assert data.n == 200
    assert data.t_max == pytest.approx(50.0 / subohmic.omega_c)
    assert data.values[0] == 1.0
    assert data.sigma is None
    assert default_t_max(coumarin_gb) == pytest.approx(5.0 * 0.880)


def test_synthesize_baseline_preset():
    entry = get_preset("mplum-ph11")
    t = np.array([0.0, 1.0])
    values = model_values(entry, t, b0=1.0)
    plain = model_values(entry.subohmic, t)
    np.testing.assert_allclose(values, (plain + 1.0) / 2.0)


def test_synthesize_rejects_bad_arguments(subohmic, coumarin_gb):
    with pytest.raises(DomainError):
        synthesize(subohmic, n_points=1)
    with pytest.raises(DomainError):
        synthesize(subohmic, noise=-0.1)
    with pytest.raises(UsageError):
        synthesize(coumarin_gb, b0=0.5)
