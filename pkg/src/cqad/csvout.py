"""Deterministic CSV emission for every result type."""

from __future__ import annotations

import contextlib
import math
import sys

import numpy as np

from .dressed import TransitionLine
from .steady_state import SpectrumResult
from .sweeps import AnticrossingMap, StarkScan

__all__ = ["SCHEMAS", "emit_csv", "format_number", "UNCERTIFIED_MARK"]

SCHEMAS = {
    "spectrum": ("probe_mhz", "re_t", "im_t", "abs_t", "arg_t"),
    "secular": ("probe_mhz", "re_t", "im_t", "abs_t", "arg_t"),
    "tempsweep": ("temperature_mk", "probe_mhz", "re_t", "im_t", "abs_t", "arg_t"),
    "anticrossing": ("flux_phi0", "probe_mhz", "abs_t", "arg_t"),
    "dressed": ("n", "kind", "freq_mhz", "amplitude"),
    "stark": ("power_dbm", "phonon_number", "drive_mhz", "abs_r"),
}

UNCERTIFIED_MARK = "# truncation_certified = false"


def format_number(x) -> str:
    """12 significant digits, C-locale formatting, no negative zero."""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if x == 0.0:
        return "0"
    if math.isnan(x):
        return "nan"
    return format(x, ".12g")


def _complex_cols(t: complex) -> list[str]:
    return [format_number(t.real), format_number(t.imag), format_number(abs(t)), format_number(np.angle(t))]


def _rows(result, schema):
    if schema in ("spectrum", "secular"):
        for wp, t in zip(result.probe_frequencies, result.t_values):
            yield [format_number(wp), *_complex_cols(complex(t))]
    elif schema == "tempsweep":
        for res in result:
            temp = format_number(res.params_snapshot.temperature)
            for wp, t in zip(res.probe_frequencies, res.t_values):
                yield [temp, format_number(wp), *_complex_cols(complex(t))]
    elif schema == "anticrossing":
        for flux, row in zip(result.flux_grid, result.t_grid):
            f = format_number(flux)
            for wp, t in zip(result.probe_grid, row):
                yield [f, format_number(wp), format_number(abs(t)), format_number(np.angle(t))]
    elif schema == "dressed":
        for line in result:
            yield [str(line.n), line.kind, format_number(line.frequency), format_number(line.relative_amplitude)]
    elif schema == "stark":
        for p, n, row in zip(result.power_grid, result.phonon_numbers, result.qubit_response):
            for wd, r in zip(result.drive_frequencies, row):
                yield [format_number(p), format_number(n), format_number(wd), format_number(r)]


def _infer(result) -> str:
    if isinstance(result, SpectrumResult):
        return "spectrum"
    if isinstance(result, AnticrossingMap):
        return "anticrossing"
    if isinstance(result, StarkScan):
        return "stark"
    if isinstance(result, (list, tuple)) and result:
        if all(isinstance(r, TransitionLine) for r in result):
            return "dressed"
        if all(isinstance(r, SpectrumResult) for r in result):
            return "tempsweep"
    raise TypeError(f"cannot infer a CSV schema for {type(result).__name__}; pass schema=")


def _certified(result, schema) -> bool:
    if schema in ("spectrum", "secular", "anticrossing"):
        return bool(result.truncation_certified)
    if schema == "tempsweep":
        return all(r.truncation_certified for r in result)
    return True


def emit_csv(result, path=None, schema: str | None = None) -> bool:
    """Write ``result`` as CSV to ``path`` (stdout for ``None`` or ``"-"``).

    Uncertified truncation is flagged in a trailing comment line. Returns the
    certification status.
    """
    schema = schema or _infer(result)
    if schema not in SCHEMAS:
        raise ValueError(f"unknown schema {schema!r}")
    certified = _certified(result, schema)
    with contextlib.ExitStack() as stack:
        if path is None or str(path) == "-":
            out = sys.stdout
        else:
            out = stack.enter_context(open(path, "w", encoding="ascii", newline="\n"))
        out.write(",".join(SCHEMAS[schema]) + "\n")
        for row in _rows(result, schema):
            out.write(",".join(row) + "\n")
        if not certified:
            out.write(UNCERTIFIED_MARK + "\n")
    return certified
