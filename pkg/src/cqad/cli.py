"""Command-line entry point.

    cqad <subcommand> --config PATH [--out PATH] [--threads N]

Exit codes: 0 success, 2 configuration error, 3 solver error,
4 Fock truncation not certified (results are still written).
"""

from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from .config import EXPERIMENTS, RunConfig, load_config
from .csvout import emit_csv
from .device import qubit_frequency
from .dressed import transition_lines
from .errors import ConfigError, SolverError
from .secular import secular_spectrum
from .steady_state import default_probe_grid, spectrum
from .sweeps import anticrossing_map, default_flux_grid, stark_scan, temperature_series

log = logging.getLogger("cqad")

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_UNCERTIFIED = 0, 2, 3, 4


def _probe_grid(cfg: RunConfig) -> np.ndarray:
    g = cfg.grids
    if "probe_start" in g:
        return np.linspace(g["probe_start"], g["probe_stop"], g["probe_points"])
    return default_probe_grid(cfg.device)


def _qubit(cfg: RunConfig) -> float:
    if "qubit_freq" in cfg.grids:
        return cfg.grids["qubit_freq"]
    if "flux" in cfg.grids:
        return qubit_frequency(cfg.grids["flux"], cfg.device)
    return cfg.device.omega_r


def run(cfg: RunConfig, threads: int = 1):
    """Execute the configured experiment and return its result object."""
    p, g = cfg.device, cfg.grids
    if cfg.experiment == "dressed":
        return transition_lines(g["n_max"], g.get("omega", p.omega_r), p.g)
    if cfg.experiment == "spectrum":
        return spectrum(p, _qubit(cfg), _probe_grid(cfg), threads=threads)
    if cfg.experiment == "secular":
        return secular_spectrum(p, _qubit(cfg), _probe_grid(cfg), n_max=g.get("n_max", 64))
    if cfg.experiment == "anticrossing":
        if "flux_start" in g:
            fluxes = np.linspace(g["flux_start"], g["flux_stop"], g["flux_points"])
        else:
            fluxes = default_flux_grid(p)
        return anticrossing_map(p, fluxes, _probe_grid(cfg), threads=threads)
    if cfg.experiment == "tempsweep":
        return temperature_series(p, g["temperature"], _probe_grid(cfg), threads=threads)
    if cfg.experiment == "stark":
        powers = np.linspace(g["power_start"], g["power_stop"], g["power_points"])
        drive = None
        if "drive_start" in g:
            drive = np.linspace(g["drive_start"], g["drive_stop"], g["drive_points"])
        return stark_scan(p, g["qubit_freq"], powers, drive, g.get("extinction", 1.0))
    raise ConfigError(f"unknown experiment {cfg.experiment!r}", key="experiment")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cqad", description="Steady-state spectroscopy of a thermal qubit-acoustic resonator."
    )
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True, help="key = value configuration file")
        sp.add_argument("--out", default=None, help="output CSV path (default: config 'output' or stdout)")
        sp.add_argument("--threads", type=int, default=1, help="concurrent grid points")
        sp.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = load_config(args.config, args.experiment)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.threads < 1:
        print("config error: --threads must be >= 1", file=sys.stderr)
        return EXIT_CONFIG

    try:
        result = run(cfg, threads=args.threads)
    except SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    out = args.out if args.out is not None else cfg.output_path
    certified = emit_csv(result, out, schema=cfg.experiment)
    if not certified:
        log.warning("Fock truncation not certified")
        return EXIT_UNCERTIFIED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
