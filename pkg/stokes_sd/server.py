import os

from fastmcp import FastMCP

from stokes_sd.tools.analysis import (
    compare_response_models,
    fit_response,
    forward_transform,
    invert_response,
    synthesize_response,
)
from stokes_sd.tools.lineshape import (
    huang_rhys_factor,
    line_shape,
    noise_spectrum,
    optical_spectrum,
    regression_check,
)
from stokes_sd.tools.presets import get_preset_info, list_presets
from stokes_sd.tools.results import get_fit_result, list_fit_results

# Initialize FastMCP server
mcp = FastMCP("Spectral Density Workbench")

# --- Preset Tools ---
mcp.tool()(list_presets)
mcp.tool()(get_preset_info)

# --- Data Tools ---
mcp.tool()(synthesize_response)
mcp.tool()(fit_response)
mcp.tool()(compare_response_models)
mcp.tool()(get_fit_result)
mcp.tool()(list_fit_results)

# --- Transform Tools ---
mcp.tool()(invert_response)
mcp.tool()(forward_transform)

# --- Spectroscopy Tools ---
mcp.tool()(line_shape)
mcp.tool()(optical_spectrum)
mcp.tool()(huang_rhys_factor)
mcp.tool()(noise_spectrum)
mcp.tool()(regression_check)


# --- Prompts ---
@mcp.prompt()
def spectral_analysis() -> str:
    """Workflow guide for extracting and using spectral densities from Stokes-shift data"""
    prompt_path = os.path.join(os.path.dirname(__file__), "analysis_prompt.md")
    if os.path.exists(prompt_path):
        with open(prompt_path, "r", encoding="utf-8") as f:
            return f.read()
    return "Error: analysis_prompt.md not found."


if __name__ == "__main__":
    mcp.run()
