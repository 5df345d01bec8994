"""
Result-store backends: py-key-value-aio stores for memory and Redis, JSON
files for disk.
"""

import asyncio
import json
import logging
import os
import tempfile
from abc import ABC, abstractmethod
from typing import Any, Optional

from stokes_sd.storage.config import StoreBackend, StoreConfig

logger = logging.getLogger(__name__)


class StorageInterface(ABC):
    """Abstract interface for storage backends."""

    @abstractmethod
    async def get(self, key: str) -> Optional[str]:
        """Get a value by key."""

    @abstractmethod
    async def set(self, key: str, value: str) -> None:
        """Set a value by key."""

    @abstractmethod
    async def delete(self, key: str) -> None:
        """Delete a value by key."""

    async def exists(self, key: str) -> bool:
        return await self.get(key) is not None


class KeyValueStorage(StorageInterface):
    """
    Adapter over a py-key-value-aio store.

    Values are wrapped as ``{"value": text}`` because the stores hold
    mappings, not strings.
    """

    def __init__(self):
        self._client: Any = None
        self._ready = False
        self._lock = asyncio.Lock()

    @abstractmethod
    def _create_client(self) -> Any:
        """Build the underlying store."""

    def _get_client(self) -> Any:
        if self._client is None:
            self._client = self._create_client()
        return self._client

    async def _ensure_ready(self) -> None:
        """Ensure the store exists and setup() has run once."""
        if self._ready:
            return
        async with self._lock:
            if self._ready:
                return
            await self._get_client().setup()
            self._ready = True

    async def get(self, key: str) -> Optional[str]:
        await self._ensure_ready()
        result = await self._get_client().get(key)
        if result is None:
            return None
        if isinstance(result, str):
            return result
        if isinstance(result, dict) and "value" in result:
            return str(result["value"])
        return str(getattr(result, "value", result))

    async def set(self, key: str, value: str) -> None:
        await self._ensure_ready()
        await self._get_client().put(key, {"value": value})

    async def delete(self, key: str) -> None:
        await self._ensure_ready()
        await self._get_client().delete(key)


class MemoryStorage(KeyValueStorage):
    """In-process storage; contents vanish with the server."""

    def _create_client(self) -> Any:
        from key_value.aio.stores.memory import MemoryStore

        return MemoryStore()


class RedisStorage(KeyValueStorage):
    """Redis storage implementation using py-key-value-aio."""

    def __init__(self, host: str = "localhost", port: int = 6379,
                 password: Optional[str] = None, db: int = 0):
        super().__init__()
        self.host = host
        self.port = port
        self.password = password
        self.db = db

    def _create_client(self) -> Any:
        try:
            from key_value.aio.stores.redis import RedisStore
            import redis.asyncio as redis
        except ImportError as exc:
            raise ImportError(
                "Redis support requires 'py-key-value-aio[redis]'. "
                "Install with: pip install 'py-key-value-aio[redis]'"
            ) from exc

        # hosted Redis with a password (upstash) speaks TLS
        protocol = "rediss" if self.password and "upstash" in self.host else "redis"
        if self.password:
            url = f"{protocol}://default:{self.password}@{self.host}:{self.port}/{self.db}"
        else:
            url = f"{protocol}://{self.host}:{self.port}/{self.db}"
        # RedisStore needs str responses
        raw_client = redis.from_url(url, decode_responses=True)
        logger.info("Connecting result store to redis at %s:%d/%d", self.host, self.port, self.db)
        return RedisStore(client=raw_client)


class DiskStorage(StorageInterface):
    """One JSON file per key, replaced atomically on write."""

    def __init__(self, directory: str):
        self.directory = directory
        os.makedirs(directory, exist_ok=True)

    def _get_file_path(self, key: str) -> str:
        # colons are not portable in file names
        safe_key = key.replace(":", "_").replace(os.sep, "_")
        return os.path.join(self.directory, f"{safe_key}.json")

    async def get(self, key: str) -> Optional[str]:
        file_path = self._get_file_path(key)
        if not os.path.exists(file_path):
            return None
        try:
            with open(file_path, "r", encoding="utf-8") as f:
                return json.load(f).get("value")
        except (OSError, json.JSONDecodeError) as e:
            logger.error("Error reading %s from disk storage: %s", file_path, e)
            return None

    async def set(self, key: str, value: str) -> None:
        file_path = self._get_file_path(key)
        fd, tmp_path = tempfile.mkstemp(dir=self.directory, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as f:
                json.dump({"value": value}, f, indent=2)
            os.replace(tmp_path, file_path)
        except OSError:
            if os.path.exists(tmp_path):
                os.remove(tmp_path)
            raise

    async def delete(self, key: str) -> None:
        file_path = self._get_file_path(key)
        if os.path.exists(file_path):
            os.remove(file_path)


def create_storage_backend(config: StoreConfig) -> StorageInterface:
    """Create storage backend based on configuration."""
    if config.backend == StoreBackend.MEMORY:
        return MemoryStorage()
    if config.backend == StoreBackend.DISK:
        return DiskStorage(config.disk_directory)
    if config.backend == StoreBackend.REDIS:
        return RedisStorage(
            host=config.redis_host,
            port=config.redis_port,
            password=config.redis_password,
            db=config.redis_db,
        )
    raise ValueError(f"Unsupported storage backend: {config.backend}")
