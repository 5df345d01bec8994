"""
Solver configuration for stokes_sd using environment variables.
"""

import math
import os
from enum import Enum

from pydantic import BaseModel, Field


class LogLevel(str, Enum):
    """Supported logging levels."""
    DEBUG = "DEBUG"
    INFO = "INFO"
    WARNING = "WARNING"
    ERROR = "ERROR"


class SolverConfig(BaseModel):
    """Numerical tolerances shared by the transforms, line-shape and zeta code."""

    log_level: LogLevel = Field(
        default=LogLevel.INFO,
        description="Logging level for the CLI and the MCP server"
    )

    # Adaptive quadrature
    quad_epsrel: float = Field(
        default=1e-10,
        description="Relative tolerance for quad_vec integrations"
    )

    quad_epsabs: float = Field(
        default=1e-13,
        description="Absolute tolerance for quad_vec integrations (scaled by the reorganization energy)"
    )

    quad_limit: int = Field(
        default=2000,
        description="Maximum number of subintervals for adaptive quadrature"
    )

    # Frequency grids
    omega_floor: float = Field(
        default=1e-4,
        description="Frequencies (rad/ps) below which J = K/omega is reported as not evaluable"
    )

    omega_points: int = Field(
        default=400,
        description="Number of points of the default logarithmic frequency grid"
    )

    resolution_factor: float = Field(
        default=math.pi / 4,
        description="Largest allowed frequency spacing times t_max for tabulated forward transforms"
    )

    # Special functions
    zeta_tolerance: float = Field(
        default=1e-10,
        description="Relative accuracy demanded from the Hurwitz zeta evaluation"
    )

    # Spectra and tails
    window_tolerance: float = Field(
        default=1e-3,
        description="Largest window error estimate for which a spectrum is certified"
    )

    splice_tolerance: float = Field(
        default=0.02,
        description="Relative mismatch allowed between a tail model and the data at the splice"
    )


def get_solver_config() -> SolverConfig:
    """Load solver configuration from environment variables."""
    level_str = os.getenv("SPECDENS_LOG_LEVEL", "INFO").upper()

    return SolverConfig(
        log_level=LogLevel(level_str),
        quad_epsrel=float(os.getenv("SPECDENS_QUAD_EPSREL", "1e-10")),
        quad_epsabs=float(os.getenv("SPECDENS_QUAD_EPSABS", "1e-13")),
        quad_limit=int(os.getenv("SPECDENS_QUAD_LIMIT", "2000")),
        omega_floor=float(os.getenv("SPECDENS_OMEGA_FLOOR", "1e-4")),
        omega_points=int(os.getenv("SPECDENS_OMEGA_POINTS", "400")),
        resolution_factor=float(os.getenv("SPECDENS_RESOLUTION_FACTOR", str(math.pi / 4))),
        zeta_tolerance=float(os.getenv("SPECDENS_ZETA_TOLERANCE", "1e-10")),
        window_tolerance=float(os.getenv("SPECDENS_WINDOW_TOLERANCE", "1e-3")),
        splice_tolerance=float(os.getenv("SPECDENS_SPLICE_TOLERANCE", "0.02")),
    )
