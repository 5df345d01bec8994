"""
Command-line front end.

    python -m stokes_sd <subcommand> [flags]

Series are written as CSV, structured results as JSON; without ``--output``
they go to stdout. Failures print ``{"error": category, ...}`` on stderr and
exit with 2 for usage errors, 1 otherwise.
"""

import argparse
import json
import logging
import sys
from typing import List, Optional, Sequence

import numpy as np

from stokes_sd.config import get_solver_config
from stokes_sd.fitting import compare_models, fit_model
from stokes_sd.generators.synth import default_t_max, synthesize
from stokes_sd.lineshape import (
    fdt_noise_spectrum,
    g_numeric,
    g_subohmic_closed,
    spectrum_from_g,
)
from stokes_sd.models.params import PhysicalContext, SubOhmicParams
from stokes_sd.models.series import LineShapeSeries, SampledResponse
from stokes_sd.presets import get_preset, list_presets, resolve_model, resolve_subohmic
from stokes_sd.schemas import MODEL_KINDS, load_fit_options
from stokes_sd.sdcore import huang_rhys, reorganization_energy, stokes_from_peak_shift
from stokes_sd.storage.files import (
    format_table,
    ingest_csv,
    ingest_spectral_csv,
    lineshape_columns,
    read_noise_input_csv,
    read_peak_shift_csv,
    response_columns,
    spectral_columns,
    spectrum_columns,
    write_json,
    write_table,
    write_text,
)
from stokes_sd.transforms import (
    default_omega_grid,
    fit_tail,
    forward_stokes,
    invert_density,
    refine_omega_grid,
)
from stokes_sd.validation import AnalysisError, UsageError

logger = logging.getLogger(__name__)

SUBCOMMANDS = (
    "presets", "synth", "fit", "compare", "invert", "forward",
    "lineshape", "spectrum", "hr", "normalize", "noise",
)
DEFAULT_LINESHAPE_TMAX = 2.0
DEFAULT_LINESHAPE_POINTS = 4001


class ArgumentParser(argparse.ArgumentParser):
    """argparse that raises UsageError instead of exiting."""

    def error(self, message: str):
        raise UsageError(f"{self.prog}: {message}")


# Flag groups

def _add_output(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--output", "-o", help="Output file (default: stdout)")


def _add_model_params(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("model", "a preset or explicit sub-Ohmic parameters")
    group.add_argument("--preset", help="Registered preset name (see 'presets')")
    group.add_argument("--omega-c", type=float, help="Cutoff frequency (rad/ps)")
    group.add_argument("--s", type=float, help="Low-frequency exponent")
    group.add_argument("--delta-s", type=float, help="Dimensionless coupling (default 1)")
    group.add_argument("--omega-ph", type=float, help="Phononic scale frequency (default omega_c)")


def _add_data_input(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--input", "-i", required=True, help="CSV with columns t_ps,S[,sigma]")
    parser.add_argument("--normalize", action="store_true", help="Divide the data by S(0)")


def _add_omega_grid(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--omega-min", type=float, help="Lowest grid frequency (rad/ps)")
    parser.add_argument("--omega-max", type=float, help="Highest grid frequency (rad/ps)")
    parser.add_argument("--omega-points", type=int, help="Number of grid frequencies")


def _add_time_grid(parser: argparse.ArgumentParser, default_points: int) -> None:
    parser.add_argument("--tmax-ps", type=float, help="End of the time window (ps)")
    parser.add_argument("--npoints", type=int, default=default_points, help="Number of time samples")


def _add_lineshape_flags(parser: argparse.ArgumentParser) -> None:
    _add_model_params(parser)
    parser.add_argument("--input", "-i", help="Spectral CSV (omega_radps,K[,J]) instead of model parameters")
    parser.add_argument("--lambda", dest="lam", type=float, help="Reorganization energy of --input")
    parser.add_argument("--temperature-K", dest="temperature", type=float, required=True,
                        help="Temperature (K)")
    parser.add_argument("--method", choices=["closed", "numeric"],
                        help="closed-form Hurwitz zeta (0 < s < 1) or direct quadrature")
    _add_time_grid(parser, DEFAULT_LINESHAPE_POINTS)


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(prog="stokes_sd", description="Spectral densities from Stokes-shift data")
    parser.add_argument("--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR"],
                        help="Logging level (default from SPECDENS_LOG_LEVEL)")
    sub = parser.add_subparsers(dest="command", metavar="{" + ",".join(SUBCOMMANDS) + "}")
    sub.required = True

    p = sub.add_parser("presets", help="List registered parameter sets with provenance")
    _add_output(p)

    p = sub.add_parser("synth", help="Write synthetic S(t) samples")
    _add_model_params(p)
    _add_time_grid(p, 200)
    p.add_argument("--noise", type=float, default=0.0, help="Gaussian noise sigma")
    p.add_argument("--seed", type=int, default=0, help="Random seed")
    p.add_argument("--b0", type=float, help="Dimensionless baseline")
    _add_output(p)

    p = sub.add_parser("fit", help="Fit a model family to S(t) data (JSON)")
    _add_data_input(p)
    p.add_argument("--model", choices=MODEL_KINDS, default="subohmic")
    p.add_argument("--options", help="JSON file of fit options")
    _add_output(p)

    p = sub.add_parser("compare", help="Fit several models and rank them by AICc (JSON)")
    _add_data_input(p)
    p.add_argument("--models", nargs="+", choices=MODEL_KINDS,
                   default=["subohmic", "gauss-biexp", "ohmic"])
    p.add_argument("--options", help="JSON file of fit options")
    _add_output(p)

    p = sub.add_parser("invert", help="Spectral density from S(t) (omega_radps,K,J CSV)")
    _add_data_input(p)
    p.add_argument("--lambda", dest="lam", type=float, help="Reorganization energy (hbar rad/ps)")
    p.add_argument("--lambda-arb", type=float, help="Arbitrary lambda for a shape-only J")
    p.add_argument("--tail", choices=["auto", "algebraic", "exponential", "none"], default="auto")
    p.add_argument("--omega-c", type=float, help="Scale of the default frequency grid (rad/ps)")
    _add_omega_grid(p)
    _add_output(p)

    p = sub.add_parser("forward", help="S(t) from a spectral density (t_ps,S CSV)")
    _add_model_params(p)
    p.add_argument("--input", "-i", help="Spectral CSV (omega_radps,K[,J]) instead of model parameters")
    _add_time_grid(p, 200)
    _add_output(p)

    p = sub.add_parser("lineshape", help="Line-shape function g(t) (CSV)")
    _add_lineshape_flags(p)
    _add_output(p)

    p = sub.add_parser("spectrum", help="Absorption or fluorescence spectrum (CSV)")
    _add_lineshape_flags(p)
    p.add_argument("--kind", choices=["absorption", "fluorescence"], default="absorption")
    p.add_argument("--omega-eg", type=float, default=0.0, help="Electronic gap frequency (rad/ps)")
    _add_omega_grid(p)
    _add_output(p)

    p = sub.add_parser("hr", help="Huang-Rhys factor and reorganization energy (JSON)")
    _add_model_params(p)
    _add_output(p)

    p = sub.add_parser("normalize", help="S(t) and a lambda estimate from an emission peak trace")
    p.add_argument("--input", "-i", required=True, help="CSV with columns t_ps,peak_cm")
    p.add_argument("--final-energy", type=float, help="Equilibrium peak position (cm^-1)")
    p.add_argument("--output", "-o", required=True, help="Output S(t) CSV")

    p = sub.add_parser("noise", help="Quantum noise spectrum from Re Y(omega) (CSV)")
    p.add_argument("--input", "-i", required=True, help="CSV with columns omega_radps,re_y")
    p.add_argument("--temperature-K", dest="temperature", type=float, required=True,
                   help="Temperature (K)")
    _add_output(p)
    return parser


# Output

def _emit_text(args: argparse.Namespace, text: str) -> None:
    if args.output:
        write_text(args.output, text)
    else:
        sys.stdout.write(text)


def _emit_table(args: argparse.Namespace, columns) -> None:
    if args.output:
        write_table(args.output, columns)
    else:
        sys.stdout.write(format_table(columns))


def _emit_model(args: argparse.Namespace, document) -> None:
    if args.output:
        write_json(args.output, document)
    else:
        sys.stdout.write(document.model_dump_json(indent=2) + "\n")


def _emit_json(args: argparse.Namespace, document) -> None:
    _emit_text(args, json.dumps(document, indent=2) + "\n")


# Helpers

def _model_args(args: argparse.Namespace):
    return dict(preset=args.preset, omega_c=args.omega_c, s=args.s,
                delta_s=args.delta_s, omega_ph=args.omega_ph)


def _has_model_args(args: argparse.Namespace) -> bool:
    return any(v is not None for v in _model_args(args).values())


def _load_response(args: argparse.Namespace) -> SampledResponse:
    data = ingest_csv(args.input)
    return data.normalized() if args.normalize else data


def _omega_grid(args: argparse.Namespace, data: Optional[SampledResponse] = None,
                omega_c: Optional[float] = None) -> Optional[np.ndarray]:
    lo, hi = args.omega_min, args.omega_max
    if (lo is None) != (hi is None):
        raise UsageError("--omega-min and --omega-max must be given together")
    if lo is not None:
        if not 0 < lo < hi:
            raise UsageError("the frequency window needs 0 < --omega-min < --omega-max")
        return np.geomspace(lo, hi, args.omega_points or get_solver_config().omega_points)
    if data is None and omega_c is None:
        return None
    grid = default_omega_grid(omega_c=omega_c, points=args.omega_points, data=data)
    return grid if data is None else refine_omega_grid(grid, data.t_max)


def _time_grid(args: argparse.Namespace, t_max: float) -> np.ndarray:
    if args.npoints < 2:
        raise UsageError("--npoints must be >= 2")
    if not t_max > 0:
        raise UsageError("--tmax-ps must be > 0")
    return np.linspace(0.0, t_max, args.npoints)


def _line_shape(args: argparse.Namespace) -> LineShapeSeries:
    ctx = PhysicalContext(temperature=args.temperature)
    t_grid = _time_grid(args, args.tmax_ps or DEFAULT_LINESHAPE_TMAX)
    if args.input:
        if _has_model_args(args):
            raise UsageError("give either --input or model parameters, not both")
        if args.method == "closed":
            raise UsageError("the closed form needs sub-Ohmic parameters, not a tabulated density")
        return g_numeric(ingest_spectral_csv(args.input, args.lam), ctx, t_grid)
    params = resolve_subohmic(**_model_args(args))
    method = args.method or ("closed" if 0 < params.s < 1 else "numeric")
    if method == "closed":
        return g_subohmic_closed(params, ctx, t_grid)
    return g_numeric(params, ctx, t_grid)


# Subcommands

def cmd_presets(args: argparse.Namespace) -> None:
    entries = [entry.model_dump(mode="json") for entry in list_presets()]
    _emit_json(args, entries)


def cmd_synth(args: argparse.Namespace) -> None:
    if args.preset is not None:
        if any(v is not None for v in (args.omega_c, args.s, args.delta_s, args.omega_ph)):
            raise UsageError("give either --preset or explicit model parameters, not both")
        source = get_preset(args.preset)
    else:
        source = resolve_model(**_model_args(args))
    response = synthesize(source, t_max=args.tmax_ps, n_points=args.npoints,
                          noise=args.noise, seed=args.seed, b0=args.b0)
    _emit_table(args, response_columns(response))


def cmd_fit(args: argparse.Namespace) -> None:
    options = load_fit_options(args.options)
    result = fit_model(args.model, _load_response(args), options)
    if not result.converged:
        logger.warning("Fit did not meet the convergence criteria: %s", result.message)
    _emit_model(args, result)


def cmd_compare(args: argparse.Namespace) -> None:
    options = load_fit_options(args.options)
    _emit_model(args, compare_models(_load_response(args), options, tuple(args.models)))


def cmd_invert(args: argparse.Namespace) -> None:
    if args.lam is not None and args.lambda_arb is not None:
        raise UsageError("--lambda and --lambda-arb are mutually exclusive")
    if args.lam is None and args.lambda_arb is None:
        raise UsageError(
            "--lambda is required (the reorganization energy comes from measurement); "
            "use --lambda-arb 1 for a shape-only J"
        )
    lam = args.lam if args.lam is not None else args.lambda_arb
    data = _load_response(args)
    omegas = _omega_grid(args, data=data, omega_c=args.omega_c)
    tail = fit_tail(data, args.tail)
    spectral = invert_density(data, lam, omegas, tail)
    _emit_table(args, spectral_columns(spectral))


def cmd_forward(args: argparse.Namespace) -> None:
    if args.input:
        if _has_model_args(args):
            raise UsageError("give either --input or model parameters, not both")
        if args.tmax_ps is None:
            raise UsageError("--tmax-ps is required with a tabulated density")
        source = ingest_spectral_csv(args.input)
        t_max = args.tmax_ps
    else:
        source = resolve_model(**_model_args(args))
        t_max = args.tmax_ps or default_t_max(source)
    response = forward_stokes(source, _time_grid(args, t_max))
    _emit_table(args, response_columns(response))


def cmd_lineshape(args: argparse.Namespace) -> None:
    _emit_table(args, lineshape_columns(_line_shape(args)))


def cmd_spectrum(args: argparse.Namespace) -> None:
    g = _line_shape(args)
    omegas = None
    if args.omega_min is not None or args.omega_max is not None:
        if args.omega_min is None or args.omega_max is None or not args.omega_min < args.omega_max:
            raise UsageError("the spectrum window needs --omega-min < --omega-max")
        omegas = np.linspace(args.omega_min, args.omega_max, args.omega_points or 1001)
    spectrum = spectrum_from_g(g, args.omega_eg, args.kind, omegas)
    _emit_table(args, spectrum_columns(spectrum))


def cmd_hr(args: argparse.Namespace) -> None:
    params: SubOhmicParams = resolve_subohmic(**_model_args(args))
    report = huang_rhys(params)
    document = report.model_dump()
    document.update(
        regime=params.regime.value,
        reorganization_energy=reorganization_energy(params),
        params=params.model_dump(),
    )
    _emit_json(args, document)


def cmd_normalize(args: argparse.Namespace) -> None:
    times, peaks = read_peak_shift_csv(args.input)
    response, lam = stokes_from_peak_shift(times, peaks, args.final_energy, source=args.input)
    write_table(args.output, response_columns(response))
    sys.stdout.write(json.dumps({"reorganization_energy": lam, "unit": "hbar rad/ps"}, indent=2) + "\n")


def cmd_noise(args: argparse.Namespace) -> None:
    omegas, re_y = read_noise_input_csv(args.input)
    spectrum = fdt_noise_spectrum(re_y, PhysicalContext(temperature=args.temperature), omegas)
    _emit_table(args, spectrum_columns(spectrum))


COMMANDS = {
    "presets": cmd_presets,
    "synth": cmd_synth,
    "fit": cmd_fit,
    "compare": cmd_compare,
    "invert": cmd_invert,
    "forward": cmd_forward,
    "lineshape": cmd_lineshape,
    "spectrum": cmd_spectrum,
    "hr": cmd_hr,
    "normalize": cmd_normalize,
    "noise": cmd_noise,
}


def run_command(argv: Sequence[str]) -> int:
    """Run one subcommand; returns the process exit status."""
    try:
        args = build_parser().parse_args(list(argv))
        if args.log_level:
            logging.getLogger().setLevel(args.log_level)
        COMMANDS[args.command](args)
    except UsageError as e:
        sys.stderr.write(e.to_json() + "\n")
        return 2
    except AnalysisError as e:
        sys.stderr.write(e.to_json() + "\n")
        return 1
    except SystemExit as e:
        # --help
        return int(e.code or 0)
    return 0


def main(argv: Optional[List[str]] = None) -> None:
    logging.basicConfig(
        level=get_solver_config().log_level.value,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        stream=sys.stderr,
    )
    sys.exit(run_command(sys.argv[1:] if argv is None else argv))


if __name__ == "__main__":
    main()
