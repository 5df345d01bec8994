import math

import numpy as np
import pytest
from scipy import integrate

from stokes_sd.lineshape import (
    classical_regression_check,
    fdt_noise_spectrum,
    g_numeric,
    g_subohmic_closed,
    spectrum_from_g,
    symmetrized_correlation,
)
from stokes_sd.models.params import PhysicalContext, SubOhmicParams
from stokes_sd.models.series import TabulatedSpectralFunction
from stokes_sd.sdcore import eval_subohmic_density, eval_subohmic_stokes, hbar_beta, reorganization_energy
from stokes_sd.validation import DomainError, TruncationError


@pytest.fixture
def weak_coupling():
    return SubOhmicParams(delta_s=0.3, omega_ph=1.0, omega_c=5.0, s=0.5)


def test_closed_form_matches_quadrature(weak_coupling, room_temperature):
    t = np.linspace(0.0, 2.0, 41)
    closed = g_subohmic_closed(weak_coupling, room_temperature, t)
    numeric = g_numeric(weak_coupling, room_temperature, t)
    mask = np.abs(numeric.values) > 1e-8
    np.testing.assert_allclose(closed.values[mask], numeric.values[mask], rtol=1e-6)
    assert closed.method == "closed"
    assert numeric.method == "numeric"


@pytest.mark.slow
@pytest.mark.parametrize("s", [0.2, 0.5, 0.8])
@pytest.mark.parametrize("omega_c", [1.0, 5.0, 20.0])
@pytest.mark.parametrize("temperature", [77.0, 300.0, 1000.0])
def test_closed_form_grid(s, omega_c, temperature):
    p = SubOhmicParams.from_fit(omega_c, s)
    ctx = PhysicalContext(temperature=temperature)
    t = np.linspace(0.0, 2.0, 21)
    closed = g_subohmic_closed(p, ctx, t).values
    numeric = g_numeric(p, ctx, t).values
    mask = np.abs(numeric) > 1e-8
    np.testing.assert_allclose(closed[mask], numeric[mask], rtol=1e-6)


def test_g_starts_at_zero(subohmic, room_temperature):
    g = g_subohmic_closed(subohmic, room_temperature, [0.0, 0.1])
    assert g.values[0] == 0.0
    assert g.values[1].real > 0


def test_stokes_function_inside_g(subohmic, room_temperature):
    h = 1e-4
    centers = np.linspace(0.05, 1.5, 30)
    grid = np.sort(np.concatenate([centers - h, centers + h]))
    g = g_subohmic_closed(subohmic, room_temperature, grid)
    imag = g.values.imag.reshape(-1, 2)
    derivative = (imag[:, 1] - imag[:, 0]) / (2 * h)
    lam = reorganization_energy(subohmic)
    expected = lam * (eval_subohmic_stokes(subohmic, centers) - 1.0)
    np.testing.assert_allclose(derivative, expected, atol=1e-5)


def test_components_sum_to_g(subohmic, room_temperature):
    g = g_subohmic_closed(subohmic, room_temperature, np.linspace(0.0, 1.0, 11))
    np.testing.assert_allclose(g.values, g.coherent + g.thermal + g.zero_point)
    assert np.all(g.thermal >= 0)


def test_closed_form_rejects_ohmic_and_beyond(room_temperature):
    with pytest.raises(DomainError):
        g_subohmic_closed(SubOhmicParams.from_fit(5.0, 1.0), room_temperature, [0.0, 0.1])


def test_line_shape_needs_temperature(subohmic):
    with pytest.raises(DomainError):
        g_numeric(subohmic, PhysicalContext(temperature=0.0), [0.0, 0.1])


def test_tabulated_g_matches_analytic(weak_coupling, room_temperature):
    omegas = np.concatenate([
        np.geomspace(1e-6, 0.1, 2000, endpoint=False),
        np.linspace(0.1, 50.0 * weak_coupling.omega_c, 100000),
    ])
    spectral = TabulatedSpectralFunction(
        omegas=omegas,
        k_values=omegas * eval_subohmic_density(weak_coupling, omegas),
        reorganization_energy=reorganization_energy(weak_coupling),
        head_exponent=weak_coupling.s - 1.0,
    )
    t = np.linspace(0.0, 0.5, 6)
    tabulated = g_numeric(spectral, room_temperature, t)
    analytic = g_subohmic_closed(weak_coupling, room_temperature, t)
    np.testing.assert_allclose(tabulated.values, analytic.values, rtol=1e-3, atol=1e-6)


def _spectrum_grid():
    return np.arange(0.0, 0.4 + 2.5e-4, 5e-4)


def test_absorption_spectrum_is_certified(weak_coupling, room_temperature):
    g = g_subohmic_closed(weak_coupling, room_temperature, _spectrum_grid())
    spectrum = spectrum_from_g(g, omega_eg=100.0)
    assert spectrum.certified
    assert spectrum.window_error < 1e-3
    assert spectrum.kind == "absorption"
    assert np.max(spectrum.values) == pytest.approx(1.0)
    lam = reorganization_energy(weak_coupling)
    assert abs(spectrum.peak_frequency() - 100.0) < lam


def test_fluorescence_mirrors_absorption(weak_coupling, room_temperature):
    g = g_subohmic_closed(weak_coupling, room_temperature, _spectrum_grid())
    lam = g.reorganization_energy
    detuning = np.linspace(-40.0, 40.0, 161)
    absorption = spectrum_from_g(g, 100.0, "absorption", omegas=100.0 + detuning)
    fluorescence = spectrum_from_g(g, 100.0, "fluorescence", omegas=100.0 - 2.0 * lam - detuning)
    np.testing.assert_allclose(fluorescence.values, absorption.values, atol=1e-10)


def test_short_window_raises_truncation(weak_coupling, room_temperature):
    g = g_subohmic_closed(weak_coupling, room_temperature, np.linspace(0.0, 0.01, 21))
    with pytest.raises(TruncationError) as excinfo:
        spectrum_from_g(g, 100.0)
    assert excinfo.value.estimate > 1e-3
    relaxed = spectrum_from_g(g, 100.0, strict=False)
    assert not relaxed.certified


def test_fdt_zero_temperature_is_zero_point():
    omegas = np.linspace(0.0, 10.0, 11)
    re_y = np.full_like(omegas, 2.0)
    noise = fdt_noise_spectrum(re_y, PhysicalContext(temperature=0.0), omegas)
    np.testing.assert_array_equal(noise.values, omegas * re_y)


def test_fdt_classical_limit():
    ctx = PhysicalContext(temperature=300.0)
    hb = hbar_beta(300.0)
    omega = 1e-6 / hb
    noise = fdt_noise_spectrum([1.0], ctx, [omega])
    assert noise.values[0] == pytest.approx(2.0 / hb, rel=1e-5)


def test_fdt_at_thermal_frequency():
    ctx = PhysicalContext(temperature=300.0)
    omega = 1.0 / hbar_beta(300.0)
    noise = fdt_noise_spectrum([1.0], ctx, [omega])
    expected = 2.0 * omega * (0.5 + 1.0 / (math.e - 1.0))
    assert noise.values[0] == pytest.approx(expected, rel=1e-12)
    assert noise.values[0] / (2.0 * omega) == pytest.approx(1.081977, rel=1e-6)


def test_fdt_rejects_mismatched_input():
    with pytest.raises(DomainError):
        fdt_noise_spectrum([1.0, 2.0], PhysicalContext(temperature=300.0), [1.0])


def test_symmetrized_correlation_is_normalized(subohmic):
    values = symmetrized_correlation(subohmic, 300.0, np.linspace(0.0, 1.0, 5))
    assert values[0] == 1.0


def test_regression_toward_stokes_function(subohmic, room_temperature):
    t = np.linspace(0.0, 10.0 / subohmic.omega_c, 41)
    report = classical_regression_check(subohmic, room_temperature, t)
    assert report.monotone
    assert report.temperatures == sorted(report.temperatures)
    ratio_100 = int(np.argmin(np.abs(np.array(report.thermal_ratios) - 100.0)))
    assert report.deviations[ratio_100] < 1e-3


def test_imaginary_part_does_not_depend_on_temperature(weak_coupling):
    t = np.linspace(0.0, 2.0, 41)
    cold = g_subohmic_closed(weak_coupling, PhysicalContext(temperature=77.0), t)
    hot = g_subohmic_closed(weak_coupling, PhysicalContext(temperature=600.0), t)
    np.testing.assert_allclose(cold.values.imag, hot.values.imag, rtol=1e-12, atol=1e-14)


def test_real_part_grows_with_temperature(weak_coupling):
    t = np.linspace(0.0, 2.0, 41)[1:]
    real_parts = [
        g_subohmic_closed(weak_coupling, PhysicalContext(temperature=temperature), t).values.real
        for temperature in (50.0, 150.0, 300.0, 900.0)
    ]
    for colder, hotter in zip(real_parts[:-1], real_parts[1:]):
        assert np.all(hotter > colder)


def test_real_part_is_quadratic_at_origin(weak_coupling, room_temperature):
    h = 1e-3
    g = g_numeric(weak_coupling, room_temperature, [0.0, h, 2.0 * h])
    slope = math.log(g.values[2].real / g.values[1].real) / math.log(2.0)
    assert slope == pytest.approx(2.0, abs=0.05)


@pytest.fixture
def strong_coupling():
    return SubOhmicParams(delta_s=2.0, omega_ph=5.0, omega_c=5.0, s=0.5)


def test_strong_coupling_line_is_gaussian(strong_coupling, room_temperature):
    g = g_subohmic_closed(strong_coupling, room_temperature, np.linspace(0.0, 0.15, 1501))
    h = g.times[10]
    curvature = 2.0 * g.values[10].real / (h * h)
    omegas = np.linspace(-450.0, 450.0, 3601)
    spectrum = spectrum_from_g(g, 0.0, omegas=omegas)
    assert spectrum.certified
    weight = integrate.trapezoid(spectrum.values, omegas)
    mean = integrate.trapezoid(omegas * spectrum.values, omegas) / weight
    variance = integrate.trapezoid((omegas - mean) ** 2 * spectrum.values, omegas) / weight
    assert variance == pytest.approx(curvature, rel=0.05)


def test_absorption_and_fluorescence_peaks_split_by_twice_lambda(strong_coupling, room_temperature):
    g = g_subohmic_closed(strong_coupling, room_temperature, np.linspace(0.0, 0.15, 1501))
    lam = g.reorganization_energy
    omegas = np.linspace(-500.0, 450.0, 3801)
    absorption = spectrum_from_g(g, 0.0, "absorption", omegas=omegas)
    fluorescence = spectrum_from_g(g, 0.0, "fluorescence", omegas=omegas)
    spacing = omegas[1] - omegas[0]
    separation = absorption.peak_frequency() - fluorescence.peak_frequency()
    assert separation == pytest.approx(2.0 * lam, abs=2.0 * spacing + 0.01 * 2.0 * lam)
