"""Thermal Lindblad Liouvillian as a sparse superoperator.

Vectorization is column stacking: ``vec(rho)[i + D*j] = rho[i, j]`` so that
``vec(A rho B) = (B^T kron A) vec(rho)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .core_algebra import HilbertSpace, Operator
from .device import (
    DeviceParams,
    FrameSpec,
    bose_einstein,
    build_hamiltonian,
    build_probe,
    cavity_lowering,
    excitation_number,
    transmon_lowering,
)
from .errors import InvalidDimensionError

__all__ = [
    "Liouvillian",
    "LiouvillianBuilder",
    "vec",
    "unvec",
    "spre",
    "spost",
    "commutator_super",
    "dissipator",
    "qubit_collapse",
    "build_liouvillian",
]

ZERO_DROP = 1e-15


def vec(rho) -> np.ndarray:
    return np.asarray(getattr(rho, "entries", rho)).reshape(-1, order="F")


def unvec(v: np.ndarray) -> np.ndarray:
    d = int(round(np.sqrt(v.size)))
    if d * d != v.size:
        raise InvalidDimensionError(f"vector of length {v.size} is not a vectorized square")
    return np.asarray(v).reshape(d, d, order="F")


def _csr(op) -> sp.csr_matrix:
    m = getattr(op, "entries", op)
    return sp.csr_matrix(m, dtype=np.complex128)


def spre(op) -> sp.csr_matrix:
    """Superoperator of ``rho -> op @ rho``."""
    m = _csr(op)
    return sp.kron(sp.identity(m.shape[0], format="csr"), m, format="csr")


def spost(op) -> sp.csr_matrix:
    """Superoperator of ``rho -> rho @ op``."""
    m = _csr(op)
    return sp.kron(m.T, sp.identity(m.shape[0], format="csr"), format="csr")


def commutator_super(h) -> sp.csr_matrix:
    """Superoperator of ``rho -> -i [h, rho]``."""
    return (-1j * (spre(h) - spost(h))).tocsr()


def dissipator(op, rate: float) -> sp.csr_matrix:
    """``(rate / 2) (2 o rho o^dag - o^dag o rho - rho o^dag o)`` as a superoperator."""
    if rate < 0:
        raise ValueError(f"dissipator rate must be >= 0, got {rate}")
    o = _csr(op)
    dim = o.shape[0]
    if rate == 0:
        return sp.csr_matrix((dim * dim, dim * dim), dtype=np.complex128)
    odo = (o.conj().T @ o).tocsr()
    jump = sp.kron(o.conj(), o, format="csr")
    return (0.5 * rate * (2.0 * jump - spre(odo) - spost(odo))).tocsr()


def qubit_collapse(params: DeviceParams) -> Operator:
    """Summed transmon lowering ``sum_l sqrt(l) |l-1><l|`` (x identity)."""
    return transmon_lowering(params)


def _drop_small(m: sp.csr_matrix) -> sp.csr_matrix:
    m = m.tocsr()
    m.data[np.abs(m.data) < ZERO_DROP] = 0
    m.eliminate_zeros()
    m.sort_indices()
    return m


@dataclass(frozen=True, eq=False)
class Liouvillian:
    """Sparse generator ``d vec(rho)/dt = matrix @ vec(rho)`` (MHz).

    ``sectors[p]`` is the excitation-number difference ``N_i - N_j`` of the
    vectorized element ``p = i + D*j``. Without the probe the matrix is block
    diagonal in it; the probe couples neighbouring sectors only.
    """

    space: HilbertSpace
    matrix: sp.csr_matrix
    probe_frequency: float
    sectors: np.ndarray | None = None

    @property
    def dim(self) -> int:
        return self.space.total_dim

    def apply(self, rho) -> np.ndarray:
        return unvec(self.matrix @ vec(rho))


class LiouvillianBuilder:
    """Assembles Liouvillians for one device point at many probe frequencies.

    The rotating frame only adds ``-i [-w_p N_exc, rho]``, which is diagonal
    (``i w_p k`` on sector ``k``), so the expensive part is assembled once.
    """

    def __init__(self, params: DeviceParams, qubit_freq: float):
        self.params = params
        self.qubit_freq = qubit_freq
        self.reference = params.omega_r
        h = build_hamiltonian(params, qubit_freq, FrameSpec(self.reference))
        h = h + build_probe(params)
        self.space = h.space

        a = cavity_lowering(params)
        s = qubit_collapse(params)
        n_th = bose_einstein(params.omega_r, params.temperature)
        n_q = bose_einstein(qubit_freq, params.temperature)
        k, g = params.kappa, params.gamma_q
        base = (
            commutator_super(h)
            + dissipator(a, k * (n_th + 1.0))
            + dissipator(a.dag(), k * n_th)
            + dissipator(s, g * (n_q + 1.0))
            + dissipator(s.dag(), g * n_q)
        )
        self.n_th = n_th
        self.n_th_qubit = n_q
        self.base = _drop_small(base)

        n_exc = np.real(np.diag(excitation_number(params).entries))
        self.sectors = np.rint(np.subtract.outer(n_exc, n_exc)).astype(np.int64).reshape(
            -1, order="F"
        )

    def at(self, probe_frequency: float) -> Liouvillian:
        if not probe_frequency > 0:
            raise ValueError(f"probe_frequency must be > 0, got {probe_frequency}")
        shift = 1j * (probe_frequency - self.reference) * self.sectors
        m = _drop_small(self.base + sp.diags(shift, format="csr"))
        return Liouvillian(self.space, m, float(probe_frequency), self.sectors)


def build_liouvillian(params: DeviceParams, qubit_freq: float, probe_frequency: float) -> Liouvillian:
    """Full thermal Liouvillian in the frame rotating at ``probe_frequency``."""
    return LiouvillianBuilder(params, qubit_freq).at(probe_frequency)
