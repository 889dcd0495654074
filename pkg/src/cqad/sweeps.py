"""Experiment drivers: anticrossing maps, temperature series, Stark scans."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .device import (
    DeviceParams,
    qubit_frequency,
    resonance_flux,
    stark_lamb_shift,
)
from .errors import DispersiveInvalidError, SolverError
from .steady_state import (
    SpectrumResult,
    default_probe_grid,
    find_peaks,
    resolve_cutoff,
    spectrum,
)

__all__ = [
    "P_REF_DBM",
    "AnticrossingMap",
    "StarkScan",
    "phonon_from_power",
    "stark_scan",
    "default_flux_grid",
    "anticrossing_map",
    "temperature_series",
    "peak_splitting",
    "map_splittings",
    "SERIES_TEMPERATURES",
]

# Drive power giving one phonon on average in the resonator.
P_REF_DBM = -134.0

SERIES_TEMPERATURES = (16.5, 50.5, 98.5, 149.0, 200.0, 254.0, 349.0)


@dataclass(frozen=True, eq=False)
class AnticrossingMap:
    flux_grid: np.ndarray
    probe_grid: np.ndarray
    t_grid: np.ndarray  # shape (len(flux_grid), len(probe_grid))
    temperature: float
    qubit_frequencies: np.ndarray
    truncation_certified: bool
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.t_grid.shape != (len(self.flux_grid), len(self.probe_grid)):
            raise ValueError("t_grid shape does not match the grids")

    def row(self, i: int, params: DeviceParams) -> SpectrumResult:
        return SpectrumResult(
            self.probe_grid, self.t_grid[i], params, float(self.qubit_frequencies[i]),
            self.truncation_certified,
        )


@dataclass(frozen=True, eq=False)
class StarkScan:
    power_grid: np.ndarray
    drive_frequencies: np.ndarray
    qubit_response: np.ndarray  # |r|, shape (len(power_grid), len(drive_frequencies))
    phonon_numbers: np.ndarray
    shifted_frequencies: np.ndarray
    detuning: float

    def __post_init__(self):
        if np.any(np.diff(self.phonon_numbers) <= 0):
            raise ValueError("phonon numbers must increase strictly with power")


def phonon_from_power(power_dbm):
    """Mean phonon number, one decade per 10 dB from one phonon at -134 dBm."""
    return 10.0 ** ((np.asarray(power_dbm, dtype=float) - P_REF_DBM) / 10.0)


def stark_scan(
    params: DeviceParams,
    qubit_freq: float,
    power_grid,
    drive_frequencies=None,
    extinction: float = 1.0,
) -> StarkScan:
    """Dispersive qubit reflection vs resonator drive power.

    The dip is a phenomenological Lorentzian of half-width ``gamma_q / 2``
    centred on ``w_a + (2 n + 1) g^2 / Delta``.
    """
    detuning = qubit_freq - params.omega_r
    if detuning == 0:
        raise DispersiveInvalidError("Stark scan needs a detuned qubit")
    powers = np.asarray(power_grid, dtype=float)
    n = phonon_from_power(powers)
    shifted = np.array([qubit_freq + stark_lamb_shift(k, detuning, params.g) for k in n])
    half = 0.5 * params.gamma_q
    if drive_frequencies is None:
        lo, hi = min(shifted.min(), qubit_freq) - 10 * half, max(shifted.max(), qubit_freq) + 10 * half
        drive_frequencies = np.linspace(lo, hi, 801)
    wd = np.asarray(drive_frequencies, dtype=float)
    r = 1.0 - extinction * half / (1j * (wd[None, :] - shifted[:, None]) + half)
    return StarkScan(powers, wd, np.abs(r), n, shifted, detuning)


def default_flux_grid(params: DeviceParams, window: float = 120.0, points: int = 81) -> np.ndarray:
    """Fluxes on the (0, 0.5) branch where ``|w_a - w_r| <= window``."""
    lo = resonance_flux(params.omega_r + window, params)
    hi = resonance_flux(params.omega_r - window, params)
    return np.linspace(lo, hi, points)


def anticrossing_map(
    params: DeviceParams,
    flux_grid=None,
    probe_grid=None,
    temperature: float | None = None,
    *,
    threads: int = 1,
    method: str = "auto",
) -> AnticrossingMap:
    """Transmission map over flux and probe frequency.

    The Fock cutoff is resolved once at resonance and shared by all rows.
    """
    if temperature is not None:
        params = params.replace(temperature=temperature)
    fluxes = default_flux_grid(params) if flux_grid is None else np.asarray(flux_grid, dtype=float)
    probes = default_probe_grid(params) if probe_grid is None else np.asarray(probe_grid, dtype=float)
    if fluxes.size == 0 or probes.size == 0:
        raise ValueError("flux and probe grids must be nonempty")
    if params.fock_cutoff is None:
        params, _ = resolve_cutoff(params, params.omega_r, params.omega_r, method)

    rows, freqs, diags, certified = [], [], [], True
    for flux in fluxes:
        wa = qubit_frequency(float(flux), params)
        try:
            res = spectrum(params, wa, probes, threads=threads, method=method)
        except SolverError as exc:
            raise type(exc)(str(exc), probe=exc.probe, flux=float(flux)) from exc
        rows.append(res.t_values)
        freqs.append(wa)
        diags.append(res.diagnostics)
        certified &= res.truncation_certified
    return AnticrossingMap(
        fluxes, probes, np.array(rows), params.temperature, np.array(freqs), certified,
        _merge_diagnostics(diags),
    )


def _merge_diagnostics(diags: list[dict]) -> dict:
    if not diags:
        return {}
    out = {"points": sum(d["points"] for d in diags)}
    for key in ("max_residual", "max_hermiticity_defect", "max_trace_error", "max_iterations"):
        out[key] = max(d[key] for d in diags)
    out["min_eigenvalue"] = min(d["min_eigenvalue"] for d in diags)
    out["methods"] = sorted({m for d in diags for m in d["methods"]})
    return out


def temperature_series(
    params: DeviceParams,
    temps=SERIES_TEMPERATURES,
    probe_grid=None,
    *,
    threads: int = 1,
    method: str = "auto",
) -> list[SpectrumResult]:
    """Resonant spectra, one per temperature, each with its own certified cutoff."""
    wa = qubit_frequency(resonance_flux(params.omega_r, params), params)
    probes = default_probe_grid(params) if probe_grid is None else probe_grid
    return [
        spectrum(params.replace(temperature=float(T)), wa, probes, threads=threads, method=method)
        for T in temps
    ]


def peak_splitting(result: SpectrumResult, prominence: float = 0.05) -> float:
    """Distance between the outermost peaks; NaN with fewer than two."""
    peaks = find_peaks(result, prominence)
    if len(peaks) < 2:
        return math.nan
    return peaks[-1][0] - peaks[0][0]


def map_splittings(amap: AnticrossingMap, params: DeviceParams, prominence: float = 0.05) -> np.ndarray:
    return np.array([peak_splitting(amap.row(i, params), prominence) for i in range(len(amap.flux_grid))])
