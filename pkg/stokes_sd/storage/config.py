"""
Fit-result store settings, read from the STORAGE_* environment variables.

Named fits saved through the MCP ``fit_response`` tool outlive a single call
only with the disk or redis backend; the memory backend is per process.
"""

import os
from enum import Enum
from typing import Optional

from pydantic import BaseModel, Field

from stokes_sd.validation import UsageError

DEFAULT_RESULT_DIRECTORY = "./fit_results"
DEFAULT_NAMESPACE = "stokes_sd"


class StoreBackend(str, Enum):
    """Where named FitResult JSON documents live."""
    MEMORY = "memory"
    DISK = "disk"
    REDIS = "redis"


class StoreConfig(BaseModel):
    """Location of the named fit results kept by the MCP server."""

    backend: StoreBackend = Field(
        default=StoreBackend.MEMORY,
        description="Backend holding fit results (memory results vanish with the process)"
    )

    # disk backend: one JSON file per stored fit
    disk_directory: str = Field(
        default=DEFAULT_RESULT_DIRECTORY,
        description="Directory of fit-result JSON files"
    )

    # redis backend
    redis_host: str = Field(
        default="localhost",
        description="Redis server holding fit results"
    )

    redis_port: int = Field(
        default=6379,
        description="Port of that Redis server"
    )

    redis_password: Optional[str] = Field(
        default=None,
        description="Redis password, if the server needs one"
    )

    redis_db: int = Field(
        default=0,
        description="Redis database index for fit results"
    )

    namespace_prefix: str = Field(
        default=DEFAULT_NAMESPACE,
        description="Key prefix for stored fits and their name index"
    )


def _backend_from(value: str) -> StoreBackend:
    try:
        return StoreBackend(value.strip().lower())
    except ValueError:
        choices = ", ".join(b.value for b in StoreBackend)
        raise UsageError(f"STORAGE_BACKEND={value!r} is not a fit-result backend; use one of {choices}")


def get_store_config() -> StoreConfig:
    """Fit-result store settings from STORAGE_BACKEND, STORAGE_DISK_DIRECTORY and STORAGE_REDIS_*."""
    return StoreConfig(
        backend=_backend_from(os.getenv("STORAGE_BACKEND", "memory")),
        disk_directory=os.getenv("STORAGE_DISK_DIRECTORY", DEFAULT_RESULT_DIRECTORY),
        redis_host=os.getenv("STORAGE_REDIS_HOST", "localhost"),
        redis_port=int(os.getenv("STORAGE_REDIS_PORT", "6379")),
        redis_password=os.getenv("STORAGE_REDIS_PASSWORD"),
        redis_db=int(os.getenv("STORAGE_REDIS_DB", "0")),
        namespace_prefix=os.getenv("STORAGE_NAMESPACE_PREFIX", DEFAULT_NAMESPACE),
    )
