#!/usr/bin/env python3
"""
Spectral Density Workbench MCP Server - Single Entrypoint
=========================================================

Starts the MCP server. The command-line tools live in ``python -m stokes_sd``.

Usage:
    python main.py
    python -m main
"""

import logging
import os
import sys
from pathlib import Path

# Add the project root to Python path
PROJECT_ROOT = Path(__file__).parent
sys.path.insert(0, str(PROJECT_ROOT))

from stokes_sd.config import get_solver_config  # noqa: E402

# Configure logging
logging.basicConfig(
    level=get_solver_config().log_level.value,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)


def setup_environment():
    """Configure environment variables and paths"""
    # Load from .env file if present
    env_file = PROJECT_ROOT / ".env"
    if env_file.exists():
        try:
            from dotenv import load_dotenv
            load_dotenv(env_file)
            logger.info("Loaded environment from %s", env_file)
        except ImportError:
            logger.warning("python-dotenv not installed, skipping .env file")

    backend = os.getenv("STORAGE_BACKEND", "memory")
    logger.info("Fit-result backend: %s", backend)

    if backend == "disk":
        data_dir = Path(os.getenv("STORAGE_DISK_DIRECTORY", PROJECT_ROOT / "fit_results"))
        os.environ.setdefault("STORAGE_DISK_DIRECTORY", str(data_dir))
        data_dir.mkdir(exist_ok=True)
        logger.info("Disk storage directory: %s", data_dir)


# Import the MCP server at module level so FastMCP can find it
setup_environment()
from stokes_sd.server import mcp  # noqa: E402


def main():
    """Main entry point for the application"""
    logger.info("Starting Spectral Density Workbench MCP server")
    try:
        mcp.run()
    except KeyboardInterrupt:
        logger.info("Server stopped by user")
    except Exception as e:
        logger.error("Error starting server: %s", e, exc_info=True)
        sys.exit(1)


if __name__ == "__main__":
    main()
