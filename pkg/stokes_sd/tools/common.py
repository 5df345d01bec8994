"""
Shared plumbing for the MCP tools: error documents and sample conversion.
"""

import functools
import inspect
import logging
from typing import List, Optional

from stokes_sd.models.series import SampledResponse
from stokes_sd.validation import AnalysisError, format_error

logger = logging.getLogger(__name__)


def tool_errors(fn):
    """Return an AnalysisError as its JSON document instead of raising it."""
    if inspect.iscoroutinefunction(fn):
        @functools.wraps(fn)
        async def async_wrapper(*args, **kwargs):
            try:
                return await fn(*args, **kwargs)
            except AnalysisError as e:
                logger.warning("%s failed:%s", fn.__name__, format_error(e))
                return e.to_json()
        return async_wrapper

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except AnalysisError as e:
            logger.warning("%s failed:%s", fn.__name__, format_error(e))
            return e.to_json()
    return wrapper


def response_from_lists(
    times: List[float],
    values: List[float],
    sigma: Optional[List[float]] = None,
    normalize: bool = False,
) -> SampledResponse:
    response = SampledResponse.from_unsorted(times, values, sigma=sigma, source="mcp")
    return response.normalized() if normalize else response
