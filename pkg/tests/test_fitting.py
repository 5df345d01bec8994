import numpy as np
import pytest
from pydantic import ValidationError

from stokes_sd.fitting import (
    _GaussBiexp,
    aicc,
    compare_models,
    fit_gauss_biexp,
    fit_model,
    fit_ohmic,
    fit_subohmic,
    fit_subohmic_baseline,
)
from stokes_sd.generators.synth import synthesize
from stokes_sd.models.fit import FitOptions
from stokes_sd.models.params import GaussBiexpParams, SubOhmicParams
from stokes_sd.models.series import SampledResponse
from stokes_sd.presets import list_presets
from stokes_sd.storage.files import ingest_csv
from stokes_sd.sdcore import eval_gauss_biexp_stokes, eval_ohmic_stokes, eval_subohmic_stokes
from stokes_sd.validation import DomainError, RankDeficiencyError, UsageError


def _coumarin_curve(coumarin_gb) -> SampledResponse:
    t = np.linspace(0.0, 3.0, 200)
    return SampledResponse(times=t, values=eval_gauss_biexp_stokes(coumarin_gb, t)).normalized()


def test_coumarin_curve_gives_published_subohmic_fit(coumarin_gb):
    result = fit_subohmic(_coumarin_curve(coumarin_gb))
    assert result.params["omega_c"] == pytest.approx(6.25846, rel=0.05)
    assert result.params["s"] == pytest.approx(0.785158, rel=0.05)


def test_noiseless_subohmic_recovery(rng):
    for _ in range(3):
        true = SubOhmicParams.from_fit(rng.uniform(0.5, 50.0), rng.uniform(0.1, 0.9))
        data = synthesize(true, n_points=200)
        result = fit_subohmic(data)
        assert result.converged
        assert result.params["omega_c"] == pytest.approx(true.omega_c, rel=1e-4)
        assert result.params["s"] == pytest.approx(true.s, rel=1e-4)
        assert result.residual < 1e-8


def test_fit_result_reports_window_and_starts(subohmic):
    data = synthesize(subohmic, n_points=100)
    result = fit_subohmic(data)
    assert result.window.n_points == 100
    assert result.window.t_min == 0.0
    assert not result.window.weighted
    assert result.starts_tried == 25
    assert 0 <= result.start_index < 25
    assert result.param_names == ["omega_c", "s"]
    assert len(result.covariance) == 2


def test_fit_result_hands_back_subohmic_params(subohmic):
    data = synthesize(subohmic, n_points=100)
    params = fit_subohmic(data).subohmic_params(delta_s=0.3)
    assert params.delta_s == 0.3
    assert params.omega_ph == pytest.approx(params.omega_c)
    assert params.s == pytest.approx(subohmic.s, rel=1e-4)
    with pytest.raises(UsageError):
        fit_ohmic(data).subohmic_params()


def test_single_start_option(subohmic):
    data = synthesize(subohmic, n_points=100)
    result = fit_subohmic(data, FitOptions(multistart=False))
    assert result.starts_tried == 1


def test_weighted_fit_uses_sigma(subohmic):
    data = synthesize(subohmic, n_points=100, noise=1e-3, seed=3)
    result = fit_subohmic(data)
    assert result.window.weighted
    assert result.params["s"] == pytest.approx(subohmic.s, rel=0.05)
    unweighted = fit_subohmic(data, FitOptions(use_sigma=False))
    assert not unweighted.window.weighted


@pytest.mark.slow
@pytest.mark.parametrize("entry", list_presets(), ids=lambda e: e.name)
def test_presets_refit_to_their_generators(entry):
    if entry.model == "gauss-biexp":
        data = synthesize(entry, n_points=200)
        result = fit_gauss_biexp(data)
        expected = entry.gauss_biexp
        for name in ("a_g", "omega_d", "a_1", "tau_1", "a_2", "tau_2"):
            assert result.params[name] == pytest.approx(getattr(expected, name), rel=1e-3)
        return
    p = entry.subohmic
    t_max = 100.0 / p.omega_c
    if entry.model == "subohmic-baseline":
        data = synthesize(entry, t_max=t_max, n_points=400, b0=0.5)
        result = fit_subohmic_baseline(data)
        assert result.params["b0"] == pytest.approx(0.5, rel=1e-3)
    else:
        data = synthesize(entry, t_max=t_max, n_points=400)
        result = fit_subohmic(data)
    assert result.params["omega_c"] == pytest.approx(p.omega_c, rel=1e-3)
    assert result.params["s"] == pytest.approx(p.s, rel=1e-3)


def test_baseline_fit_with_zero_baseline_matches_plain_fit(subohmic):
    data = synthesize(subohmic, n_points=200)
    plain = fit_subohmic(data)
    baseline = fit_subohmic_baseline(data)
    assert baseline.params["b0"] == pytest.approx(0.0, abs=1e-6)
    assert baseline.params["omega_c"] == pytest.approx(plain.params["omega_c"], rel=1e-6)
    assert baseline.params["s"] == pytest.approx(plain.params["s"], rel=1e-6)
    assert "b0" in baseline.boundary_active


def test_gauss_biexp_recovery_with_canonical_taus():
    true = GaussBiexpParams(a_g=0.5, omega_d=30.0, a_1=0.2, tau_1=0.1, a_2=0.3, tau_2=1.0)
    data = synthesize(true, n_points=400)
    result = fit_gauss_biexp(data)
    assert result.params["tau_1"] < result.params["tau_2"]
    for name in ("a_g", "omega_d", "a_1", "tau_1", "a_2", "tau_2"):
        assert result.params[name] == pytest.approx(getattr(true, name), rel=1e-3)


def test_constrained_gauss_biexp_keeps_unit_sum():
    true = GaussBiexpParams(a_g=0.5, omega_d=30.0, a_1=0.2, tau_1=0.1, a_2=0.3, tau_2=1.0, normalized=True)
    data = synthesize(true, n_points=400)
    result = fit_gauss_biexp(data, FitOptions(constrain_amplitudes=True))
    total = result.params["a_g"] + result.params["a_1"] + result.params["a_2"]
    assert total == pytest.approx(1.0, abs=1e-12)
    assert result.gauss_biexp_params().is_normalized()


def test_ohmic_fit():
    t = np.linspace(0.0, 20.0 / 3.0, 100)
    data = SampledResponse(times=t, values=eval_ohmic_stokes(3.0, t))
    result = fit_ohmic(data)
    assert result.params["omega_c"] == pytest.approx(3.0, rel=1e-6)


def test_flat_data_is_rank_deficient():
    t = np.linspace(0.0, 1.0, 20)
    with pytest.raises(RankDeficiencyError):
        fit_subohmic(SampledResponse(times=t, values=np.ones_like(t)))


def test_unnormalized_data_is_rejected():
    t = np.linspace(0.0, 1.0, 20)
    with pytest.raises(DomainError):
        fit_subohmic(SampledResponse(times=t, values=5.0 * np.exp(-t)))


def test_too_few_points():
    t = np.linspace(0.0, 1.0, 5)
    with pytest.raises(DomainError):
        fit_subohmic(SampledResponse(times=t, values=np.exp(-t)))


def test_unknown_model_kind(subohmic):
    with pytest.raises(UsageError):
        fit_model("lorentz", synthesize(subohmic))


def test_options_reject_unknown_keys():
    with pytest.raises(ValidationError):
        FitOptions(max_iter=10)


def test_compare_models_on_coumarin_curve(coumarin_gb):
    comparison = compare_models(_coumarin_curve(coumarin_gb))
    assert comparison.best_by_residual == "gauss-biexp"
    assert set(comparison.ranking) == {"subohmic", "gauss-biexp", "ohmic"}
    residuals = {score.model: score.residual for score in comparison.scores}
    assert residuals["subohmic"] - residuals["gauss-biexp"] < 0.02
    assert residuals["ohmic"] > residuals["subohmic"]


def test_compare_models_prefers_subohmic_for_subohmic_data(subohmic):
    data = synthesize(subohmic, n_points=200)
    comparison = compare_models(data, models=("subohmic", "ohmic"))
    assert comparison.ranking[0] == "subohmic"


def test_aicc_penalizes_parameters():
    assert aicc(1.0, 100, 6, 1.0) > aicc(1.0, 100, 2, 1.0)
    assert aicc(1.0, 5, 4, 1.0) == float("inf")


def test_exponential_window_marks_s_at_the_ohmic_edge():
    t = np.linspace(0.0, 5.0, 200)
    data = SampledResponse(times=t, values=np.exp(-t))
    result = fit_subohmic(data)
    assert result.params["s"] < 1.0 - FitOptions().ohmic_margin
    assert "s" in result.boundary_active
    assert not result.converged
    comparison = compare_models(data, models=("subohmic", "ohmic"))
    assert comparison.ranking[0] == "ohmic"
    scores = {score.model: score for score in comparison.scores}
    assert "s" in scores["subohmic"].boundary_active


def test_near_ohmic_subohmic_data_stays_interior():
    data = synthesize(SubOhmicParams.from_fit(2.0, 0.9), n_points=200)
    result = fit_subohmic(data)
    assert result.converged
    assert result.boundary_active == []
    assert result.params["s"] == pytest.approx(0.9, rel=1e-4)


def test_fit_ignores_row_order(write_csv, subohmic):
    data = synthesize(subohmic, n_points=120, noise=2e-3, seed=5)
    rows = [f"{t!r},{v!r},{s!r}" for t, v, s in zip(data.times, data.values, data.sigma)]
    order = np.random.default_rng(11).permutation(len(rows))
    shuffled = ingest_csv(write_csv("t_ps,S,sigma\n" + "\n".join(rows[i] for i in order) + "\n"))
    assert fit_subohmic(shuffled).params == fit_subohmic(data).params


def test_doubling_sigma_doubles_uncertainties_only(subohmic):
    data = synthesize(subohmic, n_points=150, noise=2e-3, seed=9)
    doubled = SampledResponse(times=data.times, values=data.values, sigma=2.0 * data.sigma)
    base = fit_subohmic(data)
    wide = fit_subohmic(doubled)
    for name in base.param_names:
        assert wide.params[name] == pytest.approx(base.params[name], rel=1e-6)
        assert wide.uncertainties[name] == pytest.approx(2.0 * base.uncertainties[name], rel=1e-4)


def test_fits_are_deterministic(coumarin_gb):
    data = _coumarin_curve(coumarin_gb)
    assert fit_gauss_biexp(data).model_dump() == fit_gauss_biexp(data).model_dump()
    assert fit_subohmic(data).model_dump() == fit_subohmic(data).model_dump()


def test_gauss_biexp_jacobian_matches_central_differences():
    model = _GaussBiexp(FitOptions())
    p = np.array([0.45, 25.0, 0.25, 0.15, 0.3, 1.2])
    t = np.linspace(0.0, 3.0, 60)
    analytic = model.jacobian(p, t)
    for j in range(p.size):
        h = 1e-6 * max(1.0, abs(p[j]))
        up, down = p.copy(), p.copy()
        up[j] += h
        down[j] -= h
        numeric = (model.predict(up, t) - model.predict(down, t)) / (2.0 * h)
        np.testing.assert_allclose(analytic[:, j], numeric, rtol=1e-6, atol=1e-8)


def test_gaussian_only_data_leaves_exponentials_empty():
    true = GaussBiexpParams(a_g=1.0, omega_d=30.0, a_1=0.0, tau_1=0.1, a_2=0.0, tau_2=1.0)
    t = np.linspace(0.0, 1.0, 400)
    result = fit_gauss_biexp(SampledResponse(times=t, values=eval_gauss_biexp_stokes(true, t)))
    assert result.params["a_g"] == pytest.approx(1.0, rel=1e-5)
    assert result.params["omega_d"] == pytest.approx(30.0, rel=1e-4)
    assert result.params["a_1"] == pytest.approx(0.0, abs=1e-5)
    assert result.params["a_2"] == pytest.approx(0.0, abs=1e-5)


def test_raw_coumarin_curve_keeps_its_amplitude_sum(coumarin_gb):
    t = np.linspace(0.0, 3.0, 200)
    result = fit_gauss_biexp(SampledResponse(times=t, values=eval_gauss_biexp_stokes(coumarin_gb, t)))
    total = result.params["a_g"] + result.params["a_1"] + result.params["a_2"]
    assert total == pytest.approx(1.03, abs=0.01)
