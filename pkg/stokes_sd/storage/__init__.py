"""
Storage for stokes_sd: CSV/JSON series files and the named fit-result store.
"""

from stokes_sd.storage.backends import create_storage_backend
from stokes_sd.storage.config import StoreBackend, StoreConfig, get_store_config
from stokes_sd.storage.results import FitResultStore, get_result_store

__all__ = [
    "FitResultStore",
    "StoreBackend",
    "StoreConfig",
    "create_storage_backend",
    "get_result_store",
    "get_store_config",
]
