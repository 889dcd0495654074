"""Device physics of the transmon / SAW-resonator system.

Every frequency and rate is a *linear* frequency in MHz (the ``2*pi`` of the
angular quantities is dropped). The master equation is homogeneous in the
rates, so steady states and transmission are unchanged by that scaling.
Temperatures are in mK and flux in units of the flux quantum.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import brentq

from .core_algebra import Operator, annihilation, identity, number, tensor
from .errors import DegenerateQubitError, DispersiveInvalidError, InvalidDimensionError

__all__ = [
    "H_OVER_KB",
    "DeviceParams",
    "FrameSpec",
    "LAB_FRAME",
    "DEFAULT_PARAMS",
    "josephson_energy",
    "qubit_frequency",
    "resonance_flux",
    "bose_einstein",
    "crossover_temperature",
    "stark_lamb_shift",
    "transmon_lowering",
    "cavity_lowering",
    "excitation_number",
    "build_hamiltonian",
    "build_probe",
]

# h / k_B in mK per MHz (47.9924 mK/GHz).
H_OVER_KB = 47.9924e-3

MAX_TRANSMON_LEVELS = 10


@dataclass(frozen=True)
class DeviceParams:
    omega_r: float = 3162.0
    g: float = 18.5
    kappa: float = 1.56
    gamma_q: float = 10.48
    e_c: float = 160.0
    e_j_max: float = 22880.0
    transmon_levels: int = 5
    # None selects the adaptive cutoff of steady_state.resolve_cutoff.
    fock_cutoff: int | None = None
    # None selects the weak-probe default kappa / 20.
    epsilon: float | None = None
    temperature: float = 16.5

    def __post_init__(self):
        for name in ("omega_r", "e_c", "e_j_max"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)}")
        # Zero couplings/rates are allowed for limiting-case checks.
        for name in ("g", "kappa", "gamma_q", "temperature"):
            if not getattr(self, name) >= 0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)}")
        if self.epsilon is not None and not self.epsilon >= 0:
            raise ValueError(f"epsilon must be >= 0, got {self.epsilon}")
        if not 2 <= self.transmon_levels <= MAX_TRANSMON_LEVELS:
            raise InvalidDimensionError(
                f"transmon_levels must be in [2, {MAX_TRANSMON_LEVELS}], "
                f"got {self.transmon_levels}"
            )
        if self.fock_cutoff is not None and self.fock_cutoff < 2:
            raise InvalidDimensionError(f"fock_cutoff must be >= 2, got {self.fock_cutoff}")

    @property
    def probe_strength(self) -> float:
        return self.kappa / 20.0 if self.epsilon is None else self.epsilon

    def replace(self, **changes) -> DeviceParams:
        return replace(self, **changes)


DEFAULT_PARAMS = DeviceParams()


@dataclass(frozen=True)
class FrameSpec:
    """Rotating frame; ``probe_frequency=None`` is the lab frame."""

    probe_frequency: float | None = field(default=None)

    def __post_init__(self):
        if self.probe_frequency is not None and not self.probe_frequency > 0:
            raise ValueError("probe_frequency must be > 0")


LAB_FRAME = FrameSpec()


def josephson_energy(flux: float, params: DeviceParams = DEFAULT_PARAMS) -> float:
    """SQUID Josephson energy ``E_J,max |cos(pi flux)|`` in MHz."""
    return params.e_j_max * abs(math.cos(math.pi * flux))


def qubit_frequency(flux: float, params: DeviceParams = DEFAULT_PARAMS) -> float:
    """Transmon 0-1 frequency ``sqrt(8 E_C E_J) - E_C`` in MHz."""
    ej = josephson_energy(flux, params)
    # cos(pi/2) is ~6e-17, not zero; treat anything that small as the node.
    if ej <= 1e-12 * params.e_j_max:
        raise DegenerateQubitError(f"E_J vanishes at flux={flux}")
    return math.sqrt(8.0 * params.e_c * ej) - params.e_c


def resonance_flux(
    target: float | None = None, params: DeviceParams = DEFAULT_PARAMS, xtol: float = 1e-6
) -> float:
    """Flux in (0, 0.5) where ``qubit_frequency`` equals ``target``.

    Defaults to the resonator frequency. The frequency is monotone on that
    branch, so a bracketing root finder is sufficient.
    """
    target = params.omega_r if target is None else target
    lo, hi = 0.0, 0.5 - 1e-9
    f_lo = qubit_frequency(lo, params) - target
    f_hi = qubit_frequency(hi, params) - target
    if f_lo * f_hi > 0:
        raise ValueError(f"target {target} MHz outside the tunable range")
    return brentq(lambda x: qubit_frequency(x, params) - target, lo, hi, xtol=xtol)


def bose_einstein(freq: float, temperature: float) -> float:
    """Mean thermal occupation at ``freq`` (MHz) and ``temperature`` (mK)."""
    if freq <= 0:
        raise ValueError(f"freq must be > 0, got {freq}")
    if temperature < 0:
        raise ValueError(f"temperature must be >= 0, got {temperature}")
    if temperature == 0:
        return 0.0
    x = H_OVER_KB * freq / temperature
    if x > 700.0:
        return 0.0  # exp(x) would overflow; the occupation is below 1e-304
    return 1.0 / math.expm1(x)


def crossover_temperature(freq: float) -> float:
    """``h freq / k_B`` in mK."""
    if freq <= 0:
        raise ValueError(f"freq must be > 0, got {freq}")
    return H_OVER_KB * freq


def stark_lamb_shift(n: float, detuning: float, g: float = DEFAULT_PARAMS.g) -> float:
    """Dispersive qubit shift ``(2 n + 1) g^2 / detuning`` (Stark + Lamb)."""
    if detuning == 0:
        raise DispersiveInvalidError("detuning is zero; the dispersive shift diverges")
    if abs(detuning) < 10 * g:
        warnings.warn(
            f"|detuning| = {abs(detuning):g} MHz < 10 g; dispersive formula unreliable",
            stacklevel=2,
        )
    chi = g * g / detuning
    return 2.0 * n * chi + chi


def transmon_lowering(params: DeviceParams) -> Operator:
    """``sum_l sqrt(l) |l-1><l|`` on the transmon, identity on the resonator."""
    return tensor(annihilation(params.transmon_levels), identity(_cutoff(params)))


def cavity_lowering(params: DeviceParams) -> Operator:
    return tensor(identity(params.transmon_levels), annihilation(_cutoff(params)))


def excitation_number(params: DeviceParams) -> Operator:
    """``a^dag a + sum_l l |l><l|``."""
    levels, nf = params.transmon_levels, _cutoff(params)
    return tensor(number(levels), identity(nf)) + tensor(identity(levels), number(nf))


def _cutoff(params: DeviceParams) -> int:
    if params.fock_cutoff is None:
        raise InvalidDimensionError(
            "fock_cutoff is unresolved; call steady_state.resolve_cutoff first"
        )
    return params.fock_cutoff


def build_hamiltonian(
    params: DeviceParams, qubit_freq: float, frame: FrameSpec | None = None
) -> Operator:
    """RWA ladder Hamiltonian ``H / hbar`` (MHz) on transmon x Fock.

    Transmon levels follow the Duffing ladder ``l w_a - (E_C/2) l (l-1)``,
    coupling is ``g (b a^dag + b^dag a)`` with ``<l|b|l+1> = sqrt(l+1)``.
    In a probe frame the term ``w_p N_exc`` is subtracted.
    """
    levels, nf = params.transmon_levels, _cutoff(params)
    ell = np.arange(levels, dtype=float)
    transmon = np.diag(ell * qubit_freq - 0.5 * params.e_c * ell * (ell - 1.0))
    if frame is not None and frame.probe_frequency is not None:
        transmon = transmon - frame.probe_frequency * np.diag(ell)
        w_res = params.omega_r - frame.probe_frequency
    else:
        w_res = params.omega_r

    b = annihilation(levels)
    a = annihilation(nf)
    h = tensor(Operator(b.space, transmon), identity(nf))
    h = h + w_res * tensor(identity(levels), number(nf))
    h = h + params.g * (tensor(b, a.dag()) + tensor(b.dag(), a))
    return h


def build_probe(params: DeviceParams) -> Operator:
    """Probe drive ``(eps / 2)(a^dag + a)`` on the resonator."""
    a = cavity_lowering(params)
    return 0.5 * params.probe_strength * (a + a.dag())
