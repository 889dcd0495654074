"""Secular-approximation transmission of the resonant two-level JC model.

Independent closed-form check on the numerical master-equation solver:
dressed-basis rate equations give the populations, each probe-driven
coherence is a single Lorentzian, and ``<a>`` is their weighted sum.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .device import DeviceParams, bose_einstein
from .errors import PopulationConvergenceError
from .steady_state import SpectrumResult, _check_grid

__all__ = [
    "SecularRates",
    "SecularState",
    "secular_rates",
    "secular_populations",
    "secular_linewidths",
    "secular_state",
    "secular_transmission",
    "secular_spectrum",
]

TAIL = 1e-10
POPULATION_TAIL = 1e-12
MAX_LEVELS = 10_000


@dataclass(frozen=True)
class SecularRates:
    """Dressed-ladder transition rates (MHz).

    ``gamma_up[n]`` is the rate from ``|n,+->`` up to ``|n+1,+->`` and
    ``gamma_down[n]`` the rate down to ``|n-1,+->``; entries that the ladder
    does not define (``gamma_up[0]``, ``gamma_down[0:2]``) are NaN, their
    roles being played by ``gamma_g1`` and ``gamma_1g``.
    """

    gamma_g1: float
    gamma_1g: float
    gamma_up: np.ndarray
    gamma_down: np.ndarray
    gamma_q: float
    kappa: float
    n_th: float
    n_th_qubit: float

    @property
    def n_max(self) -> int:
        return len(self.gamma_up) - 1

    def up(self, n):
        """``gamma_{n,n+1}`` for ``n >= 1``."""
        n = np.asarray(n, dtype=float)
        return 0.25 * self.gamma_q * self.n_th_qubit + 0.25 * self.kappa * self.n_th * (2 * n + 1)

    def down(self, n):
        """``gamma_{n,n-1}`` for ``n >= 2``."""
        n = np.asarray(n, dtype=float)
        return 0.25 * self.gamma_q * (self.n_th_qubit + 1) + 0.25 * self.kappa * (self.n_th + 1) * (
            2 * n - 1
        )

    def extended(self, n_max: int) -> SecularRates:
        return _rates(self.gamma_q, self.kappa, self.n_th, self.n_th_qubit, n_max)


@dataclass(frozen=True)
class SecularState:
    rho_g: float
    rho_n: np.ndarray  # rho_n[n-1] is the population of each of |n,+> and |n,->
    beta: float
    alpha: np.ndarray  # alpha[n-1] is alpha_n

    @property
    def total(self) -> float:
        return self.rho_g + 2.0 * float(self.rho_n.sum())


def _rates(gamma_q, kappa, n_th, n_q, n_max) -> SecularRates:
    proto = SecularRates(0.0, 0.0, np.empty(0), np.empty(0), gamma_q, kappa, n_th, n_q)
    n = np.arange(n_max + 1)
    up = proto.up(n)
    down = proto.down(n)
    up[0] = np.nan
    down[:2] = np.nan
    return SecularRates(
        gamma_g1=0.5 * gamma_q * n_q + 0.5 * kappa * n_th,
        gamma_1g=0.5 * gamma_q * (n_q + 1) + 0.5 * kappa * (n_th + 1),
        gamma_up=up,
        gamma_down=down,
        gamma_q=gamma_q,
        kappa=kappa,
        n_th=n_th,
        n_th_qubit=n_q,
    )


def secular_rates(params: DeviceParams, qubit_freq: float, n_max: int) -> SecularRates:
    if n_max < 2:
        raise ValueError(f"n_max must be >= 2, got {n_max}")
    n_th = bose_einstein(params.omega_r, params.temperature)
    n_q = bose_einstein(qubit_freq, params.temperature)
    return _rates(params.gamma_q, params.kappa, n_th, n_q, n_max)


def _ladder(rates: SecularRates, n_max: int) -> np.ndarray:
    """Unnormalized populations ``rho_n / rho_g`` for n = 1..n_max."""
    ratios = np.empty(n_max)
    ratios[0] = rates.gamma_g1 / rates.gamma_1g
    if n_max > 1:
        n = np.arange(1, n_max)
        ratios[1:] = rates.up(n) / rates.down(n + 1)
    return np.cumprod(ratios)


def secular_populations(rates: SecularRates, n_max: int) -> tuple[float, np.ndarray]:
    """Steady-state ``(rho_g, rho_n)`` from detailed balance on the ladder.

    ``n_max`` is doubled until the last population is below 1e-12, up to
    10^4 levels.
    """
    while True:
        rel = _ladder(rates, n_max)
        if rel[-1] < POPULATION_TAIL * max(1.0, rel.max()) or rel[-1] == 0:
            break
        if n_max >= MAX_LEVELS:
            raise PopulationConvergenceError(
                f"population tail {rel[-1]:.3g} not converged at {MAX_LEVELS} levels"
            )
        n_max = min(2 * n_max, MAX_LEVELS)
    rho_g = 1.0 / (1.0 + 2.0 * rel.sum())
    return rho_g, rho_g * rel


def secular_linewidths(rates: SecularRates, n_max: int) -> tuple[float, np.ndarray]:
    """Coherence decay rates ``beta`` and ``alpha_n`` (n = 1..n_max)."""
    if rates.n_max < n_max + 2:
        rates = rates.extended(n_max + 2)
    beta = 0.5 * rates.gamma_1g + rates.up(1) + rates.gamma_g1
    n = np.arange(1, n_max + 1)
    alpha = rates.down(n + 1) + rates.up(n + 1) + rates.up(n) + rates.down(n)
    alpha[0] = rates.down(2) + rates.up(2) + rates.up(1) + 0.5 * rates.gamma_1g
    return float(beta), alpha


def secular_state(params: DeviceParams, qubit_freq: float, n_max: int = 64) -> SecularState:
    rates = secular_rates(params, qubit_freq, n_max)
    rho_g, rho_n = secular_populations(rates, n_max)
    beta, alpha = secular_linewidths(rates, len(rho_n))
    return SecularState(rho_g, rho_n, beta, alpha)


def _response(state: SecularState, omega: float, g: float, kappa: float, probes: np.ndarray) -> np.ndarray:
    """``t(w_p)`` as a sum of Lorentzians.

    Drive matrix elements follow from ``H_p = eps (a + a^dag) / 2``:
    ``eps / (2 sqrt 2)`` on the vacuum doublet and ``C eps / 4`` on the ladder,
    where ``C = sqrt(n+1) + s_eta s_xi sqrt(n)``. The probe detuning enters
    the coherence denominators because the response oscillates at ``w_p``.
    """
    wp = np.asarray(probes, dtype=float)[:, None]
    t = np.zeros(wp.shape[0], dtype=np.complex128)

    pops = np.concatenate(([state.rho_g], state.rho_n, [0.0]))
    vac = 0.25 * kappa * (pops[0] - pops[1])
    for s in (1.0, -1.0):
        t += vac / (1j * (omega + s * g - wp[:, 0]) + state.beta)

    # Keep terms while the lower level is still populated.
    keep = int(np.searchsorted(-state.rho_n, -TAIL))
    if keep == 0:
        return t
    n = np.arange(1, keep + 1, dtype=float)
    diff = pops[1 : keep + 1] - pops[2 : keep + 2]
    alpha = state.alpha[:keep]
    for s_eta in (1.0, -1.0):
        for s_xi in (1.0, -1.0):
            c = np.sqrt(n + 1) + s_eta * s_xi * np.sqrt(n)
            freq = omega + s_eta * np.sqrt(n + 1) * g - s_xi * np.sqrt(n) * g
            weight = 0.125 * kappa * c * c * diff
            t += np.sum(weight / (1j * (freq - wp) + alpha), axis=1)
    return t


def _check_resonant(params: DeviceParams, qubit_freq: float) -> None:
    if abs(qubit_freq - params.omega_r) > 0.01 * params.g:
        warnings.warn(
            "secular transmission assumes w_a = w_r; detuning "
            f"{qubit_freq - params.omega_r:g} MHz is ignored",
            stacklevel=3,
        )


def secular_transmission(params: DeviceParams, qubit_freq: float, probe: float, n_max: int = 64) -> complex:
    """Secular-approximation ``t = i kappa <a>_ss / eps`` at one probe frequency."""
    _check_resonant(params, qubit_freq)
    state = secular_state(params, qubit_freq, n_max)
    return complex(_response(state, params.omega_r, params.g, params.kappa, np.array([probe]))[0])


def secular_spectrum(params: DeviceParams, qubit_freq: float, probe_grid, n_max: int = 64) -> SpectrumResult:
    """Secular ``t`` on a grid, packaged like a numerical spectrum."""
    grid = _check_grid(probe_grid)
    _check_resonant(params, qubit_freq)
    state = secular_state(params, qubit_freq, n_max)
    t = _response(state, params.omega_r, params.g, params.kappa, grid)
    diag = {
        "rho_g": state.rho_g,
        "levels": len(state.rho_n),
        "beta": state.beta,
        "population_sum": state.total,
    }
    return SpectrumResult(grid, t, params, float(qubit_freq), math.isclose(state.total, 1.0), diag)
