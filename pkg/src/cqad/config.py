"""Flat ``key = value`` run configuration.

Units are fixed by key: frequencies and rates in MHz, temperature in mK,
power in dBm, flux in flux quanta. ``#`` starts a comment. Unknown keys,
duplicates and keys that do not apply to the chosen experiment are errors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields

from .device import DeviceParams
from .errors import ConfigError

__all__ = ["EXPERIMENTS", "RunConfig", "parse_config", "serialize_config", "load_config"]

EXPERIMENTS = ("dressed", "spectrum", "secular", "anticrossing", "tempsweep", "stark")

# key -> (kind, constraint); kind is float/int/auto-int/auto-float/float-list/str.
_DEVICE_KEYS = {
    "omega_r": ("float", "pos"),
    "g": ("float", "nonneg"),
    "kappa": ("float", "pos"),
    "gamma_q": ("float", "pos"),
    "e_c": ("float", "pos"),
    "e_j_max": ("float", "pos"),
    "transmon_levels": ("int", (2, 10)),
    "fock_cutoff": ("auto-int", (4, None)),
    "epsilon": ("auto-float", "pos"),
    "temperature": ("float", "nonneg"),
}

_PROBE = {
    "probe_start": ("float", "pos"),
    "probe_stop": ("float", "pos"),
    "probe_points": ("int", (1, None)),
}
_QUBIT = {"qubit_freq": ("float", "pos"), "flux": ("float", None)}

_GRID_KEYS = {
    "dressed": {"n_max": ("int", (1, None)), "omega": ("float", "pos")},
    "spectrum": {**_PROBE, **_QUBIT},
    "secular": {**_PROBE, **_QUBIT, "n_max": ("int", (2, None))},
    "anticrossing": {
        **_PROBE,
        "flux_start": ("float", None),
        "flux_stop": ("float", None),
        "flux_points": ("int", (1, None)),
    },
    "tempsweep": {**_PROBE},
    "stark": {
        "qubit_freq": ("float", "pos"),
        "power_start": ("float", None),
        "power_stop": ("float", None),
        "power_points": ("int", (1, None)),
        "drive_start": ("float", "pos"),
        "drive_stop": ("float", "pos"),
        "drive_points": ("int", (2, None)),
        "extinction": ("float", "nonneg"),
    },
}

_REQUIRED = {
    "dressed": ("n_max",),
    "spectrum": ("temperature",),
    "secular": ("temperature",),
    "anticrossing": ("temperature",),
    "tempsweep": ("temperature",),
    "stark": ("qubit_freq", "power_start", "power_stop", "power_points"),
}

# Device keys that an experiment does not use.
_UNUSED_DEVICE = {
    "dressed": {"kappa", "gamma_q", "e_c", "e_j_max", "transmon_levels", "fock_cutoff", "epsilon", "temperature"},
    "secular": {"transmon_levels", "fock_cutoff", "epsilon"},
    "stark": {"transmon_levels", "fock_cutoff", "epsilon", "temperature", "e_c", "e_j_max"},
}

_GROUPS = (
    ("probe_start", "probe_stop", "probe_points"),
    ("flux_start", "flux_stop", "flux_points"),
    ("drive_start", "drive_stop", "drive_points"),
)


@dataclass(frozen=True)
class RunConfig:
    experiment: str
    device: DeviceParams
    grids: dict = field(default_factory=dict)
    output_path: str | None = None


def _number(key, raw, kind, line):
    try:
        if kind in ("int", "auto-int"):
            if kind == "auto-int" and raw == "auto":
                return None
            return int(raw)
        if kind == "auto-float" and raw == "auto":
            return None
        if kind == "float-list":
            return tuple(_number(key, r.strip(), "float", line) for r in raw.split(","))
        value = float(raw)
    except ValueError:
        raise ConfigError(f"not a valid {kind.replace('-', ' ')}: {raw!r}", key=key, line=line) from None
    if not math.isfinite(value):
        raise ConfigError(f"value must be finite, got {raw!r}", key=key, line=line)
    return value


def _check_range(key, value, constraint, line):
    if value is None or constraint is None:
        return
    values = value if isinstance(value, tuple) else (value,)
    for v in values:
        if constraint == "pos" and not v > 0:
            raise ConfigError(f"must be > 0, got {v}", key=key, line=line)
        if constraint == "nonneg" and not v >= 0:
            raise ConfigError(f"must be >= 0, got {v}", key=key, line=line)
        if isinstance(constraint, tuple):
            lo, hi = constraint
            if (lo is not None and v < lo) or (hi is not None and v > hi):
                raise ConfigError(f"out of range [{lo}, {hi}]: {v}", key=key, line=line)


def parse_config(text: str, experiment: str | None = None) -> RunConfig:
    """Parse and validate a configuration document.

    ``experiment`` (e.g. the CLI subcommand) is used when the document has no
    ``experiment`` key and must agree with it otherwise.
    """
    entries: dict[str, tuple[str, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"expected 'key = value', got {body!r}", line=lineno)
        key, value = (s.strip() for s in body.split("=", 1))
        if not key:
            raise ConfigError("empty key", line=lineno)
        if key in entries:
            raise ConfigError("duplicate key", key=key, line=lineno)
        entries[key] = (value, lineno)

    if "experiment" in entries:
        value, lineno = entries.pop("experiment")
        if value not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {value!r}", key="experiment", line=lineno)
        if experiment is not None and experiment != value:
            raise ConfigError(
                f"config is for {value!r} but {experiment!r} was requested", key="experiment", line=lineno
            )
        experiment = value
    if experiment is None:
        raise ConfigError("missing required key", key="experiment")
    if experiment not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {experiment!r}", key="experiment")

    output = None
    if "output" in entries:
        output = entries.pop("output")[0]

    device_spec = {k: v for k, v in _DEVICE_KEYS.items() if k not in _UNUSED_DEVICE.get(experiment, ())}
    if experiment == "tempsweep":
        device_spec["temperature"] = ("float-list", "nonneg")
    grid_spec = _GRID_KEYS[experiment]

    device, grids = {}, {}
    for key, (value, lineno) in entries.items():
        if key in device_spec:
            kind, constraint = device_spec[key]
            target = device
        elif key in grid_spec:
            kind, constraint = grid_spec[key]
            target = grids
        else:
            raise ConfigError(f"unknown key for experiment {experiment!r}", key=key, line=lineno)
        number = _number(key, value, kind, lineno)
        _check_range(key, number, constraint, lineno)
        target[key] = number

    for key in _REQUIRED[experiment]:
        if key not in device and key not in grids:
            raise ConfigError(f"missing required key for experiment {experiment!r}", key=key)
    for group in _GROUPS:
        present = [k for k in group if k in grids]
        if present and len(present) != len(group):
            missing = next(k for k in group if k not in grids)
            raise ConfigError(f"incomplete grid, also needs {', '.join(group)}", key=missing)
    if "qubit_freq" in grids and "flux" in grids and experiment != "stark":
        raise ConfigError("give either qubit_freq or flux, not both", key="flux", line=entries["flux"][1])

    if experiment == "tempsweep":
        temps = device.pop("temperature")
        grids["temperature"] = temps
        device["temperature"] = temps[0]
    try:
        params = DeviceParams(**device)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return RunConfig(experiment, params, grids, output)


def _fmt(value) -> str:
    if value is None:
        return "auto"
    if isinstance(value, tuple):
        return ", ".join(_fmt(v) for v in value)
    return repr(value)


def serialize_config(config: RunConfig) -> str:
    """Inverse of :func:`parse_config` (floats use ``repr`` so they round-trip)."""
    lines = [f"experiment = {config.experiment}"]
    unused = _UNUSED_DEVICE.get(config.experiment, set())
    for f in fields(DeviceParams):
        if f.name in unused:
            continue
        if config.experiment == "tempsweep" and f.name == "temperature":
            continue
        lines.append(f"{f.name} = {_fmt(getattr(config.device, f.name))}")
    for key, value in config.grids.items():
        lines.append(f"{key} = {_fmt(value)}")
    if config.output_path is not None:
        lines.append(f"output = {config.output_path}")
    return "\n".join(lines) + "\n"


def load_config(path, experiment: str | None = None) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), experiment)
