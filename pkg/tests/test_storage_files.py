import json

import numpy as np
import pytest

from stokes_sd.generators.synth import synthesize
from stokes_sd.models.series import TabulatedSpectralFunction
from stokes_sd.storage.files import (
    format_table,
    ingest_csv,
    ingest_spectral_csv,
    read_noise_input_csv,
    read_peak_shift_csv,
    response_columns,
    spectral_columns,
    write_json,
    write_table,
)
from stokes_sd.validation import ParseError


def test_reads_unsorted_rows_with_sigma(write_csv):
    path = write_csv("t_ps,S,sigma\n0.2,0.5,0.01\n0.0,1.0,0.01\n0.1,0.8,0.02\n")
    response = ingest_csv(path)
    np.testing.assert_array_equal(response.times, [0.0, 0.1, 0.2])
    np.testing.assert_array_equal(response.values, [1.0, 0.8, 0.5])
    np.testing.assert_array_equal(response.sigma, [0.01, 0.02, 0.01])
    assert response.source == path


def test_extra_columns_and_blank_lines_are_ignored(write_csv):
    path = write_csv("t_ps,S,comment\n0.0,1.0,start\n\n0.5,0.4,\n")
    response = ingest_csv(path, source="run-1")
    assert response.n == 2
    assert response.source == "run-1"


def test_bad_number_reports_line(write_csv):
    path = write_csv("t_ps,S\n0.0,1.0\n0.1,0.9\n0.2,abc\n")
    with pytest.raises(ParseError) as excinfo:
        ingest_csv(path)
    assert excinfo.value.line == 4
    assert "line 4" in excinfo.value.message


def test_non_finite_value_is_rejected(write_csv):
    path = write_csv("t_ps,S\n0.0,1.0\n0.1,nan\n")
    with pytest.raises(ParseError) as excinfo:
        ingest_csv(path)
    assert excinfo.value.line == 3


def test_zero_sigma_is_rejected(write_csv):
    path = write_csv("t_ps,S,sigma\n0.0,1.0,0.1\n0.1,0.9,0\n")
    with pytest.raises(ParseError) as excinfo:
        ingest_csv(path)
    assert excinfo.value.line == 3


def test_duplicate_time_is_rejected(write_csv):
    path = write_csv("t_ps,S\n0.0,1.0\n0.1,0.9\n0.1,0.8\n")
    with pytest.raises(ParseError) as excinfo:
        ingest_csv(path)
    assert excinfo.value.line == 4


def test_missing_header_column(write_csv):
    path = write_csv("time,S\n0.0,1.0\n")
    with pytest.raises(ParseError) as excinfo:
        ingest_csv(path)
    assert excinfo.value.line == 1


def test_header_only_and_empty_files(write_csv):
    with pytest.raises(ParseError) as excinfo:
        ingest_csv(write_csv("t_ps,S\n", "header.csv"))
    assert excinfo.value.line == 2
    with pytest.raises(ParseError) as excinfo:
        ingest_csv(write_csv("", "empty.csv"))
    assert excinfo.value.line == 1


def test_missing_file():
    with pytest.raises(ParseError):
        ingest_csv("/nonexistent/stokes.csv")


def test_written_response_reads_back_identically(tmp_path, subohmic):
    response = synthesize(subohmic, n_points=25, noise=0.01, seed=1)
    path = str(tmp_path / "synth.csv")
    write_table(path, response_columns(response))
    again = ingest_csv(path)
    np.testing.assert_array_equal(again.times, response.times)
    np.testing.assert_array_equal(again.values, response.values)
    np.testing.assert_array_equal(again.sigma, response.sigma)


def test_format_table_uses_shortest_repr():
    text = format_table({"t_ps": [0.0, 0.1], "S": [1.0, float("nan")]})
    assert text == "t_ps,S\n0.0,1.0\n0.1,nan\n"


def test_spectral_table_reports_nan_below_floor(tmp_path):
    spectral = TabulatedSpectralFunction(
        omegas=[1e-5, 1.0, 2.0], k_values=[0.1, 0.5, 0.2], reorganization_energy=1.0,
    )
    path = str(tmp_path / "sd.csv")
    write_table(path, spectral_columns(spectral))
    lines = (tmp_path / "sd.csv").read_text(encoding="utf-8").splitlines()
    assert lines[0] == "omega_radps,K,J"
    assert lines[1].endswith(",nan")
    again = ingest_spectral_csv(path, reorganization_energy=1.0)
    np.testing.assert_array_equal(again.k_values, spectral.k_values)


def test_spectral_lambda_defaults_to_grid_integral(write_csv):
    path = write_csv("omega_radps,K\n1.0,1.0\n2.0,1.0\n3.0,1.0\n")
    spectral = ingest_spectral_csv(path)
    assert spectral.reorganization_energy == pytest.approx(3.0)
    assert spectral.normalization_defect == pytest.approx(0.0)


def test_peak_shift_and_noise_readers(write_csv):
    t, peaks = read_peak_shift_csv(write_csv("t_ps,peak_cm\n0,18000\n1,17500\n", "peaks.csv"))
    np.testing.assert_array_equal(peaks, [18000.0, 17500.0])
    omegas, re_y = read_noise_input_csv(write_csv("omega_radps,re_y\n0.5,1\n1.5,2\n", "y.csv"))
    np.testing.assert_array_equal(omegas, [0.5, 1.5])


def test_write_json_is_indented(tmp_path, subohmic):
    path = str(tmp_path / "params.json")
    write_json(path, subohmic)
    text = (tmp_path / "params.json").read_text(encoding="utf-8")
    assert text.endswith("}\n")
    assert json.loads(text)["omega_c"] == 5.0
