"""Steady-state transmission spectroscopy of a thermal transmon / SAW-resonator system."""

from .core_algebra import HilbertSpace, Operator, annihilation, expectation, identity, tensor
from .device import (
    DEFAULT_PARAMS,
    DeviceParams,
    FrameSpec,
    bose_einstein,
    build_hamiltonian,
    build_probe,
    crossover_temperature,
    josephson_energy,
    qubit_frequency,
    resonance_flux,
    stark_lamb_shift,
)
from .dressed import dressed_energies, mixing_angle, transition_lines
from .lindblad import Liouvillian, build_liouvillian, dissipator, qubit_collapse
from .secular import secular_spectrum, secular_transmission
from .steady_state import (
    DensityMatrix,
    SpectrumResult,
    certify_truncation,
    find_peaks,
    solve_steady_state,
    spectrum,
    transmission,
)
from .sweeps import anticrossing_map, phonon_from_power, stark_scan, temperature_series

__version__ = "0.1.0"
