import json

from stokes_sd.presets import get_preset, list_presets as registry_entries
from stokes_sd.tools.common import tool_errors


def list_presets() -> str:
    """
    List every registered parameter set with its model, system and provenance.
    Example: list_presets() then synthesize_response(preset="gb1-phe30").
    """
    entries = [
        {"name": e.name, "system": e.system, "model": e.model, "provenance": e.provenance}
        for e in registry_entries()
    ]
    return json.dumps(entries, indent=2)


@tool_errors
def get_preset_info(name: str) -> str:
    """
    Full preset entry including parameters and unit caveats.
    Example: get_preset_info("mplum-ph7")
    """
    return get_preset(name).model_dump_json(indent=2)
