"""
Named fit results kept by the MCP server between tool calls.
"""

import json
import logging
from typing import List, Optional

from pydantic import ValidationError as PydanticValidationError

from stokes_sd.models.fit import FitResult
from stokes_sd.storage.backends import StorageInterface, create_storage_backend
from stokes_sd.storage.config import get_store_config
from stokes_sd.validation import UsageError

logger = logging.getLogger(__name__)


class FitResultStore:
    """FitResult documents under ``<namespace>:fit:<name>`` plus a name index."""

    def __init__(self, storage: StorageInterface, namespace: str = "stokes_sd"):
        self.storage = storage
        self.namespace = namespace

    def _key(self, name: str) -> str:
        return f"{self.namespace}:fit:{name}"

    @property
    def _index_key(self) -> str:
        return f"{self.namespace}:fit-index"

    @staticmethod
    def _check_name(name: str) -> str:
        name = name.strip()
        if not name or any(c in name for c in ":/\\"):
            raise UsageError(f"invalid result name {name!r}; use a non-empty name without ':' or '/'")
        return name

    async def list_names(self) -> List[str]:
        data = await self.storage.get(self._index_key)
        return sorted(json.loads(data)) if data else []

    async def save(self, name: str, result: FitResult) -> None:
        name = self._check_name(name)
        await self.storage.set(self._key(name), result.model_dump_json())
        names = set(await self.list_names())
        if name not in names:
            names.add(name)
            await self.storage.set(self._index_key, json.dumps(sorted(names)))
        logger.info("Stored %s fit as %r", result.model, name)

    async def get(self, name: str) -> Optional[FitResult]:
        data = await self.storage.get(self._key(self._check_name(name)))
        if data is None:
            return None
        try:
            return FitResult.model_validate_json(data)
        except PydanticValidationError as e:
            logger.error("Stored fit %r is not a valid FitResult: %s", name, e)
            return None

    async def delete(self, name: str) -> None:
        name = self._check_name(name)
        await self.storage.delete(self._key(name))
        names = [n for n in await self.list_names() if n != name]
        await self.storage.set(self._index_key, json.dumps(names))


_result_store: Optional[FitResultStore] = None


def get_result_store() -> FitResultStore:
    """Process-wide store built from the STORAGE_* environment on first use."""
    global _result_store
    if _result_store is None:
        config = get_store_config()
        _result_store = FitResultStore(create_storage_backend(config), config.namespace_prefix)
        logger.info("Fit results use the %s backend", config.backend.value)
    return _result_store


def reset_result_store() -> None:
    global _result_store
    _result_store = None
