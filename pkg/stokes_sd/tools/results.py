import json

from stokes_sd.storage.results import get_result_store
from stokes_sd.tools.common import tool_errors
from stokes_sd.validation import UsageError


@tool_errors
async def get_fit_result(name: str) -> str:
    """
    Retrieve a fit stored by fit_response(name=...).
    Example: get_fit_result("run1")
    """
    result = await get_result_store().get(name)
    if result is None:
        raise UsageError(f"no stored fit named {name!r}; see list_fit_results")
    return result.model_dump_json(indent=2)


@tool_errors
async def list_fit_results() -> str:
    """Names of all stored fit results."""
    return json.dumps(await get_result_store().list_names())
