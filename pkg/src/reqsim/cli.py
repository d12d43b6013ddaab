"""Command-line front end: sweeps, gate inspection, and optimization runs.

Configuration can come from an INI file (``--config`` or the
``REQSIM_CONFIG`` environment variable) with flags taking precedence.
Every CSV gets a sidecar ``<output>.meta`` recording the effective
configuration, so identical inputs reproduce identical bytes.
"""

from __future__ import annotations

import argparse
import configparser
import os
import sys

import numpy as np

from . import __version__
from .dynamics import IntegrationError, IntegratorConfig
from .gates import (
    LeakageError,
    cnot_program,
    phase_gate_program,
    program_listing,
    rotation_program,
)
from .optimizer import ObjectiveSpec, OptimizerConfig, optimize
from .pulses import NAIVE_AREAS_DEG, NAIVE_PHASES_DEG, standard_pulses
from .sweeps import (
    CNOT_1D_GRID_DEFAULT,
    CNOT_2D_GRID_DEFAULT,
    KIND_CNOT_1D,
    KIND_CNOT_2D,
    SINGLE_GRID_DEFAULT,
    SweepSpec,
    cnot_sweep,
    excitation_profile,
    write_csv,
)

__all__ = ["main", "ConfigError"]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4

_COMMON_KEYS = {"rel_tol", "abs_tol", "workers", "output"}
_SECTION_KEYS = {
    "common": _COMMON_KEYS,
    "sweep": {"pulse", "min", "max", "points"},
    "cnot": {"pulses", "mode", "min", "max", "points", "dipole", "theta"},
    "optimize": {"areas", "phases", "max_evals", "restarts", "seed", "tol"},
    "bloch": {"pulse", "detuning", "samples"},
    "program": {"gate", "pulses", "theta", "phi"},
}

BLOCH_COLUMNS = ("time_us", "sx", "sy", "sz")
OPTIMIZE_COLUMNS = (
    "evaluation",
    "score",
    "area1_deg",
    "area2_deg",
    "area3_deg",
    "phase1_deg",
    "phase2_deg",
    "phase3_deg",
)


class ConfigError(Exception):
    """Malformed configuration or command line."""


def _load_config(path: str | None) -> dict[str, dict[str, str]]:
    if path is None:
        path = os.environ.get("REQSIM_CONFIG") or None
    if path is None:
        return {}
    parser = configparser.ConfigParser()
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"bad config file {path}: {exc}") from exc
    sections: dict[str, dict[str, str]] = {}
    for section in parser.sections():
        if section not in _SECTION_KEYS:
            raise ConfigError(f"unknown config section [{section}]")
        known = _SECTION_KEYS[section]
        values = dict(parser.items(section))
        unknown = set(values) - known
        if unknown:
            raise ConfigError(
                f"unknown key(s) in [{section}]: {', '.join(sorted(unknown))}"
            )
        sections[section] = values
    return sections


class _Options:
    """Flag-over-config-over-default resolution for one subcommand."""

    def __init__(self, args: argparse.Namespace, config: dict, section: str):
        self._args = args
        self._layers = [config.get(section, {}), config.get("common", {})]
        self.effective: dict[str, str] = {}

    def get(self, key: str, default, convert=str):
        value = getattr(self._args, key, None)
        if value is None:
            for layer in self._layers:
                if key in layer:
                    value = layer[key]
                    break
        if value is None:
            value = default
        if value is None:
            self.effective[key] = ""
            return None
        try:
            converted = convert(value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad value for {key}: {value!r}") from exc
        self.effective[key] = str(converted)
        return converted


def _float_tuple(text) -> tuple[float, ...]:
    if isinstance(text, tuple):
        return text
    return tuple(float(part) for part in str(text).split(","))


def _integrator(opts: _Options) -> IntegratorConfig | None:
    rel = opts.get("rel_tol", None, float)
    abs_ = opts.get("abs_tol", None, float)
    if rel is None and abs_ is None:
        return None
    base = IntegratorConfig()
    return IntegratorConfig(
        rel_tol=base.rel_tol if rel is None else rel,
        abs_tol=base.abs_tol if abs_ is None else abs_,
    )


def _require_output(opts: _Options) -> str:
    output = opts.get("output", None, str)
    if not output:
        raise ConfigError("an output path is required (-o/--output)")
    return output


def _write_outputs(rows_or_result, output: str, command: str, opts: _Options, columns=None) -> None:
    try:
        write_csv(rows_or_result, output, columns)
        meta = configparser.ConfigParser()
        meta["run"] = dict(
            sorted({**opts.effective, "command": command, "version": __version__}.items())
        )
        with open(output + ".meta", "w") as fh:
            meta.write(fh)
    except OSError as exc:
        raise _IOFailure(str(exc)) from exc


class _IOFailure(Exception):
    pass


def _known_pulse(name: str) -> str:
    if name not in standard_pulses():
        raise ConfigError(
            f"unknown pulse {name!r}; available: {', '.join(standard_pulses())}"
        )
    return name


def _cmd_sweep(args, config) -> int:
    opts = _Options(args, config, "sweep")
    pulse = _known_pulse(opts.get("pulse", "gauss-opt", str))
    lo = opts.get("min", SINGLE_GRID_DEFAULT[0], float)
    hi = opts.get("max", SINGLE_GRID_DEFAULT[1], float)
    points = opts.get("points", SINGLE_GRID_DEFAULT[2], int)
    workers = opts.get("workers", os.cpu_count() or 1, int)
    cfg = _integrator(opts)
    output = _require_output(opts)
    result = excitation_profile(pulse, (lo, hi, points), cfg=cfg, workers=workers)
    _write_outputs(result, output, "sweep", opts)
    return EXIT_OK


def _cmd_cnot(args, config) -> int:
    opts = _Options(args, config, "cnot")
    pulse = _known_pulse(opts.get("pulses", "gauss-opt", str))
    mode = opts.get("mode", "1d", str)
    if mode not in ("1d", "2d"):
        raise ConfigError(f"mode must be 1d or 2d, got {mode!r}")
    default = CNOT_1D_GRID_DEFAULT if mode == "1d" else CNOT_2D_GRID_DEFAULT
    lo = opts.get("min", default[0], float)
    hi = opts.get("max", default[1], float)
    points = opts.get("points", default[2], int)
    dipole = opts.get("dipole", None, float)
    theta = opts.get("theta", 180.0, float)
    workers = opts.get("workers", os.cpu_count() or 1, int)
    cfg = _integrator(opts)
    output = _require_output(opts)
    kind = KIND_CNOT_1D if mode == "1d" else KIND_CNOT_2D
    axes = ((lo, hi, points),) if mode == "1d" else ((lo, hi, points), (lo, hi, points))
    kwargs = {} if dipole is None else {"dipole_shift_mhz": dipole}
    spec = SweepSpec(
        kind=kind, pulse=pulse, axes=axes, theta_deg=theta, integrator=cfg, **kwargs
    )
    result = cnot_sweep(spec, workers=workers)
    _write_outputs(result, output, "cnot", opts)
    return EXIT_OK


def _cmd_optimize(args, config) -> int:
    opts = _Options(args, config, "optimize")
    areas = opts.get("areas", NAIVE_AREAS_DEG, _float_tuple)
    phases = opts.get("phases", NAIVE_PHASES_DEG, _float_tuple)
    if len(areas) != 3 or len(phases) != 3:
        raise ConfigError("areas and phases each need three comma-separated values")
    max_evals = opts.get("max_evals", 6000, int)
    restarts = opts.get("restarts", 5, int)
    seed = opts.get("seed", 0, int)
    tol = opts.get("tol", 1e-10, float)
    output = _require_output(opts)
    cfg = OptimizerConfig(
        initial_guess=tuple(zip(areas, phases)),
        max_evaluations=max_evals,
        objective_tol=tol,
        restarts=restarts,
        seed=seed,
    )
    try:
        result = optimize(cfg, ObjectiveSpec())
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    rows = np.array([[e, s, *params] for e, s, params in result.trace])
    _write_outputs(rows, output, "optimize", opts, columns=OPTIMIZE_COLUMNS)
    a1, a2, a3, p1, p2, p3 = result.params
    print(f"best score {result.score:.6e} after {result.evaluations} evaluations")
    print(f"areas  {a1:.2f} {a2:.2f} {a3:.2f} deg")
    print(f"phases {p1:.2f} {p2:.2f} {p3:.2f} deg")
    print(f"converged: {'yes' if result.converged else 'no (budget exhausted)'}")
    return EXIT_OK


def _cmd_bloch(args, config) -> int:
    from .sweeps import bloch_trajectory

    opts = _Options(args, config, "bloch")
    pulse = _known_pulse(opts.get("pulse", "sech-default", str))
    detuning = opts.get("detuning", 0.0, float)
    samples = opts.get("samples", 201, int)
    cfg = _integrator(opts)
    output = _require_output(opts)
    if samples < 2:
        raise ConfigError("samples must be >= 2")
    rows = bloch_trajectory(pulse, detuning, samples=samples, cfg=cfg)
    _write_outputs(rows, output, "bloch", opts, columns=BLOCH_COLUMNS)
    return EXIT_OK


def _cmd_program(args, config) -> int:
    opts = _Options(args, config, "program")
    gate = opts.get("gate", "cnot", str)
    pulse = _known_pulse(opts.get("pulses", "gauss-opt", str))
    theta = opts.get("theta", 180.0, float)
    phi = opts.get("phi", 0.0, float)
    if gate == "cnot":
        program = cnot_program(pulse, theta_deg=theta)
    elif gate == "rotation":
        program = rotation_program(theta, phi, pulse)
    elif gate == "phase":
        program = phase_gate_program(theta, phi, pulse)
    else:
        raise ConfigError(f"gate must be cnot, rotation, or phase, got {gate!r}")
    print(program_listing(program))
    return EXIT_OK


def _cmd_catalog(args, config) -> int:
    for name, pulse in standard_pulses().items():
        kind = type(pulse.shape).__name__
        start, end = pulse.window
        print(f"{name:<18s} {kind:<20s} {end - start:g} us")
    return EXIT_OK


_COMMANDS = {
    "sweep": _cmd_sweep,
    "cnot": _cmd_cnot,
    "optimize": _cmd_optimize,
    "bloch": _cmd_bloch,
    "program": _cmd_program,
    "catalog": _cmd_catalog,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reqsim",
        description="Pulse, sweep, and gate simulations for frequency-addressed ion qubits.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="INI config file (default: $REQSIM_CONFIG)")
        p.add_argument("--rel-tol", dest="rel_tol", type=float)
        p.add_argument("--abs-tol", dest="abs_tol", type=float)
        p.add_argument("--workers", type=int)
        p.add_argument("-o", "--output")

    p = sub.add_parser("sweep", help="single-pulse excitation profile")
    common(p)
    p.add_argument("--pulse")
    p.add_argument("--min", type=float)
    p.add_argument("--max", type=float)
    p.add_argument("--points", type=int)

    p = sub.add_parser("cnot", help="12-pulse conditional-gate detuning sweep")
    common(p)
    p.add_argument("--pulses")
    p.add_argument("--mode", choices=("1d", "2d"))
    p.add_argument("--min", type=float)
    p.add_argument("--max", type=float)
    p.add_argument("--points", type=int)
    p.add_argument("--dipole", type=float)
    p.add_argument("--theta", type=float)

    p = sub.add_parser("optimize", help="composite parameter search")
    common(p)
    p.add_argument("--areas")
    p.add_argument("--phases")
    p.add_argument("--max-evals", dest="max_evals", type=int)
    p.add_argument("--restarts", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--tol", type=float)

    p = sub.add_parser("bloch", help="Bloch-vector time series for one detuning")
    common(p)
    p.add_argument("--pulse")
    p.add_argument("--detuning", type=float)
    p.add_argument("--samples", type=int)

    p = sub.add_parser("program", help="print a gate step listing")
    common(p)
    p.add_argument("--gate")
    p.add_argument("--pulses")
    p.add_argument("--theta", type=float)
    p.add_argument("--phi", type=float)

    p = sub.add_parser("catalog", help="list named pulses")
    p.add_argument("--config", help="INI config file (default: $REQSIM_CONFIG)")

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        config = _load_config(getattr(args, "config", None))
        return _COMMANDS[args.command](args, config)
    except (ConfigError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (IntegrationError, LeakageError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except _IOFailure as exc:
        print(f"i/o failure: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
