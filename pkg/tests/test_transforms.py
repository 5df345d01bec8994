import math

import numpy as np
import pytest
from scipy.integrate import trapezoid

from stokes_sd.models.params import SubOhmicParams
from stokes_sd.models.series import SampledResponse, TabulatedSpectralFunction, TailModel
from stokes_sd.sdcore import (
    eval_gauss_biexp_stokes,
    eval_subohmic_density,
    eval_subohmic_stokes,
    reorganization_energy,
    subohmic_profile,
)
from stokes_sd.transforms import (
    algebraic_tail_cosine,
    default_omega_grid,
    filon_moments,
    fit_tail,
    forward_stokes,
    integrate_density,
    invert_density,
    refine_omega_grid,
)
from stokes_sd.validation import DomainError, ResolutionError, TailFitError, TailNeededError


def _response(p: SubOhmicParams, times) -> SampledResponse:
    return SampledResponse(times=times, values=eval_subohmic_stokes(p, times))


def _long_grid(omega_c: float) -> np.ndarray:
    dense = np.linspace(0.0, 2.0 / omega_c, 801)
    sparse = np.geomspace(2.0 / omega_c, 400.0 / omega_c, 400)[1:]
    return np.concatenate([dense, sparse])


def test_filon_exact_for_linear_function():
    x = np.array([0.0, 0.3, 1.1, 2.0])
    f = 2.0 - 0.5 * x
    k = np.array([0.0, 0.7, 3.0, 25.0])
    cos_m, sin_m = filon_moments(x, f, k)
    b = x[-1]
    expected_cos = np.empty_like(k)
    expected_sin = np.empty_like(k)
    expected_cos[0] = 2.0 * b - 0.25 * b * b
    expected_sin[0] = 0.0
    kk = k[1:]
    # antiderivatives of (2 - x/2) cos(kx) and (2 - x/2) sin(kx)
    expected_cos[1:] = ((2.0 - 0.5 * b) * np.sin(kk * b) / kk - 0.5 * (np.cos(kk * b) - 1.0) / kk ** 2)
    expected_sin[1:] = (-(2.0 - 0.5 * b) * np.cos(kk * b) / kk + 2.0 / kk - 0.5 * np.sin(kk * b) / kk ** 2)
    np.testing.assert_allclose(cos_m, expected_cos, rtol=1e-12, atol=1e-14)
    np.testing.assert_allclose(sin_m, expected_sin, rtol=1e-12, atol=1e-14)


@pytest.mark.parametrize("omega", np.geomspace(1e-4, 1e3, 15))
def test_filon_single_segment_across_scales(omega):
    import mpmath

    a, b = 0.3, 1.3
    c0, c1 = 1.5, -0.8
    cos_m, sin_m = filon_moments([a, b], [c0 + c1 * a, c0 + c1 * b], [omega])
    with mpmath.workdps(40):
        w = mpmath.mpf(omega)

        def cos_anti(x):
            x = mpmath.mpf(x)
            return (c0 + c1 * x) * mpmath.sin(w * x) / w + c1 * mpmath.cos(w * x) / w ** 2

        def sin_anti(x):
            x = mpmath.mpf(x)
            return -(c0 + c1 * x) * mpmath.cos(w * x) / w + c1 * mpmath.sin(w * x) / w ** 2

        expected_cos = float(cos_anti(b) - cos_anti(a))
        expected_sin = float(sin_anti(b) - sin_anti(a))
    assert cos_m[0] == pytest.approx(expected_cos, rel=1e-10, abs=1e-14)
    assert sin_m[0] == pytest.approx(expected_sin, rel=1e-10, abs=1e-14)


def test_filon_accepts_complex_values():
    x = np.linspace(0.0, 1.0, 5)
    cos_m, _ = filon_moments(x, (1.0 + 2.0j) * np.ones_like(x), [0.0])
    assert cos_m[0] == pytest.approx(1.0 + 2.0j)


def test_integrate_density_cos_at_zero_is_reorganization(subohmic):
    value = integrate_density(subohmic_profile(subohmic), [0.0], "cos")
    assert value[0] == pytest.approx(reorganization_energy(subohmic), rel=1e-9)


def test_thermal_weight_needs_temperature(subohmic):
    with pytest.raises(DomainError):
        integrate_density(subohmic_profile(subohmic), [0.1], "thermal")


def test_forward_matches_closed_form(rng):
    for _ in range(20):
        p = SubOhmicParams.from_fit(rng.uniform(1.0, 10.0), rng.uniform(0.2, 1.5))
        t = np.linspace(0.0, 20.0 / p.omega_c, 41)
        response = forward_stokes(p, t)
        assert response.values[0] == 1.0
        np.testing.assert_allclose(response.values, eval_subohmic_stokes(p, t), atol=1e-6)


def test_forward_gauss_biexp_is_normalized(coumarin_gb):
    t = np.linspace(0.0, 3.0, 31)
    response = forward_stokes(coumarin_gb, t)
    expected = eval_gauss_biexp_stokes(coumarin_gb, t) / eval_gauss_biexp_stokes(coumarin_gb, 0.0)
    np.testing.assert_allclose(response.values, expected, atol=1e-5)


def test_forward_requires_grid_from_zero(subohmic):
    with pytest.raises(DomainError):
        forward_stokes(subohmic, [0.1, 0.2])


def test_forward_rejects_coarse_tabulation():
    omegas = np.linspace(1.0, 10.0, 10)
    spectral = TabulatedSpectralFunction(omegas=omegas, k_values=np.exp(-omegas), reorganization_energy=1.0)
    with pytest.raises(ResolutionError):
        forward_stokes(spectral, np.linspace(0.0, 10.0, 11))


def test_forward_tabulated_matches_closed_form(subohmic):
    omegas = np.concatenate([
        np.geomspace(1e-6, 0.1, 2000, endpoint=False),
        np.linspace(0.1, 50.0 * subohmic.omega_c, 200000),
    ])
    spectral = TabulatedSpectralFunction(
        omegas=omegas,
        k_values=omegas * eval_subohmic_density(subohmic, omegas),
        reorganization_energy=reorganization_energy(subohmic),
        head_exponent=subohmic.s - 1.0,
    )
    t = np.linspace(0.0, 2.0, 21)
    response = forward_stokes(spectral, t)
    np.testing.assert_allclose(response.values, eval_subohmic_stokes(subohmic, t), atol=1e-5)


def test_inversion_recovers_density(subohmic):
    data = _response(subohmic, _long_grid(subohmic.omega_c))
    tail = fit_tail(data, "algebraic")
    omegas = np.geomspace(0.1 * subohmic.omega_c, 5.0 * subohmic.omega_c, 40)
    spectral = invert_density(data, reorganization_energy(subohmic), omegas, tail)
    exact = omegas * eval_subohmic_density(subohmic, omegas)
    np.testing.assert_allclose(spectral.k_values, exact, rtol=1e-2)
    assert spectral.head_exponent == pytest.approx(subohmic.s - 1.0, rel=0.05)


def test_inversion_of_exponential_is_lorentzian():
    rate = 2.0
    t = np.linspace(0.0, 5.0, 5001)
    data = SampledResponse(times=t, values=np.exp(-rate * t))
    tail = fit_tail(data, "exponential")
    omegas = np.linspace(0.1, 10.0, 25)
    spectral = invert_density(data, 1.0, omegas, tail)
    lorentzian = (2.0 / math.pi) * rate / (rate * rate + omegas ** 2)
    np.testing.assert_allclose(spectral.k_values, lorentzian, rtol=1e-4)


def test_exponential_tail_rate():
    t = np.linspace(0.0, 10.0, 501)
    data = SampledResponse(times=t, values=np.exp(-0.8 * t))
    tail = fit_tail(data, "exponential")
    assert tail.kind == "exponential"
    assert tail.rate == pytest.approx(0.8, rel=0.02)
    assert tail.t_splice == pytest.approx(10.0)


def test_algebraic_tail_exponent(subohmic):
    data = _response(subohmic, _long_grid(subohmic.omega_c))
    tail = fit_tail(data, "algebraic")
    assert tail.kind == "algebraic"
    assert tail.s == pytest.approx(subohmic.s, rel=0.05)


def test_auto_tail_prefers_exponential_for_exponential_data():
    t = np.linspace(0.0, 10.0, 501)
    data = SampledResponse(times=t, values=np.exp(-0.8 * t))
    assert fit_tail(data, "auto").kind == "exponential"


def test_auto_tail_is_none_for_trailing_zeros():
    t = np.linspace(0.0, 2.0, 21)
    values = np.clip(1.0 - t, 0.0, None)
    tail = fit_tail(SampledResponse(times=t, values=values), "auto")
    assert tail.kind == "none"
    assert tail.t_splice == pytest.approx(1.0)


def test_tail_fit_needs_samples_in_last_decade():
    t = np.array([0.0, 0.5, 1.0, 10.0])
    data = SampledResponse(times=t, values=np.exp(-t))
    with pytest.raises(TailFitError):
        fit_tail(data, "exponential")


def test_undecayed_data_needs_a_tail():
    t = np.linspace(0.0, 1.0, 11)
    data = SampledResponse(times=t, values=np.exp(-0.1 * t))
    with pytest.raises(TailNeededError):
        invert_density(data, 1.0, [1.0, 2.0], TailModel(kind="none", t_splice=1.0))


def test_inversion_rejects_negative_lambda(subohmic):
    data = _response(subohmic, np.linspace(0.0, 1.0, 11))
    with pytest.raises(DomainError):
        invert_density(data, -1.0, [1.0], TailModel(kind="none", t_splice=1.0))


def test_algebraic_tail_cosine_matches_quadrature():
    from scipy import integrate

    tail = TailModel(kind="algebraic", t_splice=2.0, s=0.5, omega_c=3.0, amplitude=0.7)
    w = 1.3
    expected, _ = integrate.quad(lambda t: float(tail.value(t)), 2.0, np.inf, weight="cos", wvar=w)
    assert algebraic_tail_cosine(tail, np.array([w]))[0] == pytest.approx(expected, rel=1e-7)


def test_default_omega_grid_spans_cutoff():
    grid = default_omega_grid(omega_c=5.0, points=50)
    assert grid[0] == pytest.approx(0.05)
    assert grid[-1] == pytest.approx(100.0)
    assert grid.size == 50


def test_default_omega_grid_from_data():
    t = np.linspace(0.0, 5.0, 501)
    grid = default_omega_grid(data=SampledResponse(times=t, values=np.exp(-t)), points=20)
    assert grid[0] == pytest.approx(0.01, rel=0.02)
    assert grid[-1] == pytest.approx(100.0, rel=0.02)


def test_refine_omega_grid_bounds_spacing():
    grid = refine_omega_grid([1.0, 2.0, 2.01], t_max=10.0, factor=0.5)
    assert grid[0] == 1.0
    assert grid[-1] == 2.01
    assert np.max(np.diff(grid)) <= 0.05 + 1e-12
    assert 2.0 in grid


def test_default_omega_grid_reaches_data_span():
    t = np.linspace(0.0, 80.0, 801)
    data = SampledResponse(times=t, values=np.exp(-t))
    grid = default_omega_grid(omega_c=5.0, points=50, data=data)
    assert grid[0] == pytest.approx(0.1 / 80.0)
    assert grid[-1] == pytest.approx(100.0)
    decades = math.log10(grid[-1] / grid[0])
    assert grid.size >= 10 * decades


def _slow_subohmic_data():
    p = SubOhmicParams.from_fit(5.0, 0.6)
    dense = np.linspace(0.0, 0.4, 801)
    sparse = np.geomspace(0.4, 80.0, 600)[1:]
    return p, _response(p, np.concatenate([dense, sparse]))


def test_inversion_round_trip_on_default_grid():
    p, data = _slow_subohmic_data()
    lam = reorganization_energy(p)
    tail = fit_tail(data, "algebraic")
    window = 5.0
    omegas = refine_omega_grid(default_omega_grid(omega_c=p.omega_c, data=data), window)
    spectral = invert_density(data, lam, omegas, tail)
    t = data.times[data.times <= window]
    response = forward_stokes(spectral, t)
    assert np.max(np.abs(response.values - data.values[: t.size])) < 1e-3
    # lambda recovered from the integral of K
    assert spectral.grid_reorganization() == pytest.approx(lam, rel=5e-3)
    assert spectral.normalization_defect < 5e-3


def test_inversion_is_linear_in_the_data():
    t = np.linspace(0.0, 20.0, 2001)
    fast = SampledResponse(times=t, values=np.exp(-2.0 * t))
    slow = SampledResponse(times=t, values=np.exp(-t))
    mixed = SampledResponse(times=t, values=0.3 * fast.values + 0.7 * slow.values)
    tail = TailModel(kind="none", t_splice=20.0)
    omegas = np.linspace(0.1, 10.0, 30)
    k_fast = invert_density(fast, 1.0, omegas, tail).k_values
    k_slow = invert_density(slow, 1.0, omegas, tail).k_values
    k_mixed = invert_density(mixed, 1.0, omegas, tail).k_values
    np.testing.assert_allclose(k_mixed, 0.3 * k_fast + 0.7 * k_slow, rtol=1e-12, atol=1e-15)
    k_scaled = invert_density(slow, 2.5, omegas, tail).k_values
    np.testing.assert_allclose(k_scaled, 2.5 * k_slow, rtol=1e-13)


def test_inversion_conserves_squared_norm():
    t = np.linspace(0.0, 30.0, 3001)
    data = SampledResponse(times=t, values=np.exp(-t))
    lam = 1.7
    omegas = np.geomspace(1e-3, 300.0, 2000)
    k = invert_density(data, lam, omegas, TailModel(kind="none", t_splice=30.0)).k_values
    spectral_norm = trapezoid(k * k, omegas) + k[0] ** 2 * omegas[0]
    assert spectral_norm == pytest.approx(2.0 * lam * lam / math.pi * trapezoid(data.values ** 2, t), rel=1e-3)
