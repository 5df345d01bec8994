"""
CSV and JSON files for series and results.

Tables are comma-separated UTF-8 with a header row and dot decimals. Every
number is written with ``repr(float)`` (shortest round-trip decimal), and
files are replaced atomically so a crash never leaves a half-written table.
"""

import logging
import math
import os
import tempfile
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.integrate import trapezoid
from pydantic import BaseModel

from stokes_sd.models.series import (
    LineShapeSeries,
    SampledResponse,
    SpectrumSeries,
    TabulatedSpectralFunction,
)
from stokes_sd.validation import ParseError

logger = logging.getLogger(__name__)

RESPONSE_COLUMNS = ("t_ps", "S")
SPECTRAL_COLUMNS = ("omega_radps", "K")
PEAK_SHIFT_COLUMNS = ("t_ps", "peak_cm")
NOISE_INPUT_COLUMNS = ("omega_radps", "re_y")


def _parse_column(frame: pd.DataFrame, name: str) -> np.ndarray:
    cells = frame[name].str.strip()
    numbers = pd.to_numeric(cells, errors="coerce").to_numpy(dtype=float)
    bad = np.flatnonzero(~np.isfinite(numbers))
    if bad.size:
        row = int(bad[0])
        raise ParseError(
            f"column {name!r} holds {frame[name].iloc[row]!r}, not a finite number",
            line=int(frame.index[row]) + 2,
            column=name,
        )
    return numbers


def read_table(
    path: str,
    required: Sequence[str],
    optional: Sequence[str] = (),
) -> Tuple[Dict[str, np.ndarray], np.ndarray]:
    """
    Read the named numeric columns of a CSV file.

    Returns the columns and the 1-based file line of each row. Other columns
    are ignored; blank lines are skipped.
    """
    try:
        frame = pd.read_csv(
            path,
            sep=",",
            dtype=str,
            encoding="utf-8",
            keep_default_na=False,
            skip_blank_lines=False,
        )
    except FileNotFoundError as e:
        raise ParseError(f"no such file: {path}", path=path) from e
    except pd.errors.EmptyDataError as e:
        raise ParseError("the file is empty; a header row is required", line=1, path=path) from e
    except (pd.errors.ParserError, UnicodeDecodeError) as e:
        raise ParseError(f"not a comma-separated UTF-8 table: {e}", path=path) from e

    frame.columns = [str(c).strip() for c in frame.columns]
    missing = [c for c in required if c not in frame.columns]
    if missing:
        raise ParseError(
            f"missing header column(s) {', '.join(missing)}; expected a header row "
            f"{','.join(required)}",
            line=1,
            path=path,
            found=list(frame.columns),
        )

    frame = frame.fillna("")
    blank = (frame.apply(lambda column: column.str.strip()) == "").all(axis=1)
    frame = frame[~blank]
    columns = {name: _parse_column(frame, name) for name in required}
    for name in optional:
        if name in frame.columns:
            columns[name] = _parse_column(frame, name)
    lines = frame.index.to_numpy() + 2
    return columns, lines


def ingest_csv(path: str, source: Optional[str] = None) -> SampledResponse:
    """Read a ``t_ps,S[,sigma]`` table into a time-sorted SampledResponse."""
    columns, lines = read_table(path, RESPONSE_COLUMNS, optional=("sigma",))
    times = columns["t_ps"]
    if times.size == 0:
        raise ParseError("the table has a header but no rows", line=2, path=path)

    order = np.argsort(times, kind="stable")
    duplicate = np.flatnonzero(np.diff(times[order]) == 0)
    if duplicate.size:
        row = order[duplicate[0] + 1]
        raise ParseError(f"duplicate time {times[row]!r}", line=int(lines[row]), path=path)

    sigma = columns.get("sigma")
    if sigma is not None:
        bad = np.flatnonzero(sigma <= 0)
        if bad.size:
            raise ParseError(
                f"sigma must be > 0 (zero weights are undefined), got {sigma[bad[0]]!r}",
                line=int(lines[bad[0]]),
                path=path,
            )
    response = SampledResponse.from_unsorted(times, columns["S"], sigma=sigma, source=source or path)
    logger.info("Read %d samples from %s", response.n, path)
    return response


def ingest_spectral_csv(
    path: str,
    reorganization_energy: Optional[float] = None,
    head_exponent: float = 0.0,
) -> TabulatedSpectralFunction:
    """Read ``omega_radps,K[,J]``; lambda defaults to the integral of K on the grid."""
    columns, _ = read_table(path, SPECTRAL_COLUMNS)
    omegas = columns["omega_radps"]
    k_values = columns["K"]
    if reorganization_energy is None:
        reorganization_energy = (float(k_values[0] * omegas[0] / (head_exponent + 1.0))
                                 + float(trapezoid(k_values, omegas)))
    return TabulatedSpectralFunction(
        omegas=omegas,
        k_values=k_values,
        reorganization_energy=reorganization_energy,
        head_exponent=head_exponent,
    )


def read_peak_shift_csv(path: str) -> Tuple[np.ndarray, np.ndarray]:
    """``t_ps,peak_cm`` emission peak trace in cm^-1."""
    columns, _ = read_table(path, PEAK_SHIFT_COLUMNS)
    return columns["t_ps"], columns["peak_cm"]


def read_noise_input_csv(path: str) -> Tuple[np.ndarray, np.ndarray]:
    columns, _ = read_table(path, NOISE_INPUT_COLUMNS)
    return columns["omega_radps"], columns["re_y"]


# Writers

def _cell(value: float) -> str:
    value = float(value)
    return repr(value) if math.isfinite(value) else "nan"


def format_table(columns: Dict[str, Sequence[float]]) -> str:
    frame = pd.DataFrame({name: [_cell(v) for v in values] for name, values in columns.items()})
    return frame.to_csv(index=False, lineterminator="\n")


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.remove(tmp_path)
        raise


def write_text(path: str, text: str) -> None:
    _atomic_write(path, text)
    logger.info("Wrote %s", path)


def write_table(path: str, columns: Dict[str, Sequence[float]]) -> None:
    _atomic_write(path, format_table(columns))
    logger.info("Wrote %s", path)


def write_json(path: str, model) -> None:
    _atomic_write(path, model.model_dump_json(indent=2) + "\n")
    logger.info("Wrote %s", path)


def response_columns(response: SampledResponse) -> Dict[str, np.ndarray]:
    columns = {"t_ps": response.times, "S": response.values}
    if response.sigma is not None:
        columns["sigma"] = response.sigma
    return columns


def spectral_columns(spectral: TabulatedSpectralFunction) -> Dict[str, np.ndarray]:
    return {"omega_radps": spectral.omegas, "K": spectral.k_values, "J": spectral.j_values()}


def lineshape_columns(g: LineShapeSeries) -> Dict[str, np.ndarray]:
    return {
        "t_ps": g.times,
        "re_g": g.values.real,
        "im_g": g.values.imag,
        "thermal": g.thermal,
        "zero_point": g.zero_point,
    }


def spectrum_columns(spectrum: SpectrumSeries) -> Dict[str, np.ndarray]:
    value_name = "noise" if spectrum.kind == "noise" else "intensity"
    return {"omega_radps": spectrum.omegas, value_name: spectrum.values}
