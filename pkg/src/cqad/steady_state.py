"""Steady-state solves, transmission spectra and Fock-truncation certification."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.signal
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .core_algebra import HilbertSpace, expectation
from .device import DeviceParams, bose_einstein, cavity_lowering
from .errors import (
    ConvergenceError,
    InvalidDimensionError,
    NonUniqueSteadyStateError,
    SolverError,
    UndefinedTransmissionError,
)
from .lindblad import Liouvillian, LiouvillianBuilder, unvec

__all__ = [
    "DensityMatrix",
    "SpectrumResult",
    "SolveInfo",
    "solve_steady_state",
    "transmission",
    "spectrum",
    "default_cutoff",
    "resolve_cutoff",
    "certify_truncation",
    "find_peaks",
    "default_probe_grid",
]

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = -1e-8
RESIDUAL_TOL = 1e-8
CONDITION_LIMIT = 1e14
CERTIFY_STEP = 5
CERTIFY_DT = 1e-4
CERTIFY_TAIL = 1e-6
MAX_CUTOFF = 120


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    space: HilbertSpace
    entries: np.ndarray

    def __post_init__(self):
        m = np.array(self.entries, dtype=np.complex128)
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def trace(self) -> complex:
        return complex(np.trace(self.entries))

    def hermiticity_defect(self) -> float:
        return float(np.max(np.abs(self.entries - self.entries.conj().T)))

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(0.5 * (self.entries + self.entries.conj().T))[0])

    def violations(self) -> list[str]:
        out = []
        if self.hermiticity_defect() > HERMITIAN_TOL:
            out.append(f"hermiticity defect {self.hermiticity_defect():.3g}")
        if abs(self.trace - 1) > TRACE_TOL:
            out.append(f"trace {self.trace:.12g}")
        lam = self.min_eigenvalue()
        if lam < PSD_TOL:
            out.append(f"min eigenvalue {lam:.3g}")
        return out

    def fock_populations(self) -> np.ndarray:
        """Resonator populations (transmon traced out)."""
        levels, nf = self.space.factor_dims
        return np.real(np.diag(self.entries)).reshape(levels, nf).sum(axis=0)

    def transmon_populations(self) -> np.ndarray:
        levels, nf = self.space.factor_dims
        return np.real(np.diag(self.entries)).reshape(levels, nf).sum(axis=1)


@dataclass(frozen=True)
class SolveInfo:
    method: str
    iterations: int
    residual: float
    hermiticity_defect: float
    trace_error: float
    min_eigenvalue: float


@dataclass(frozen=True, eq=False)
class SpectrumResult:
    probe_frequencies: np.ndarray
    t_values: np.ndarray
    params_snapshot: DeviceParams
    qubit_freq: float
    truncation_certified: bool
    # Worst-case state diagnostics over the grid.
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.probe_frequencies) != len(self.t_values):
            raise ValueError("probe_frequencies and t_values differ in length")

    @property
    def abs_t(self) -> np.ndarray:
        return np.abs(self.t_values)


def _constrained_system(L: Liouvillian) -> tuple[sp.csr_matrix, np.ndarray]:
    """Replace the ``rho_00`` equation by ``Tr(rho) = 1``."""
    d = L.dim
    n = d * d
    keep = np.ones(n)
    keep[0] = 0.0
    trace_row = sp.csr_matrix(
        (np.ones(d), (np.zeros(d, dtype=np.int64), np.arange(d) * (d + 1))), shape=(n, n)
    )
    m = (sp.diags(keep, format="csr") @ L.matrix + trace_row).tocsr()
    rhs = np.zeros(n, dtype=np.complex128)
    rhs[0] = 1.0
    return m, rhs


def _factor(m: sp.csc_matrix, what: str):
    """Sparse LU that also rejects numerically singular matrices.

    SuperLU only reports exact zero pivots and is not rank revealing, so the
    condition number is bounded from below with one extra solve against a
    fixed pseudo-random vector. Unique steady states sit far below the limit
    (1e3 to 1e9 in practice); degenerate ones far above it (> 1e20).
    """
    try:
        lu = spla.splu(m)
    except RuntimeError as exc:  # SuperLU: "Factor is exactly singular"
        raise NonUniqueSteadyStateError(f"{what} is singular: {exc}") from exc
    probe = np.random.default_rng(0).standard_normal(m.shape[0]).astype(np.complex128)
    y = lu.solve(probe)
    cond = spla.norm(m, 1) * np.abs(y).sum() / np.abs(probe).sum()
    if not np.isfinite(cond) or cond > CONDITION_LIMIT:
        raise NonUniqueSteadyStateError(f"{what} is numerically singular (condition >= {cond:.2g})")
    return lu


def _solve_direct(m: sp.csr_matrix, rhs: np.ndarray) -> tuple[np.ndarray, int]:
    return _factor(m.tocsc(), "trace-constrained system").solve(rhs), 0


def _solve_sectors(m: sp.csr_matrix, rhs: np.ndarray, sectors: np.ndarray) -> tuple[np.ndarray, int]:
    """GMRES on the constrained system, preconditioned by its sector-diagonal part.

    The preconditioner is the exact LU of the probe-free blocks, so for a weak
    probe GMRES converges in a handful of iterations.
    """
    order = np.argsort(sectors, kind="stable")
    inverse = np.empty_like(order)
    inverse[order] = np.arange(order.size)
    mp = m[order][:, order].tocoo()
    s = sectors[order]
    same = s[mp.row] == s[mp.col]
    block = sp.csc_matrix((mp.data[same], (mp.row[same], mp.col[same])), shape=mp.shape)
    full = mp.tocsr()
    lu = _factor(block, "sector block")
    pre = spla.LinearOperator(full.shape, matvec=lu.solve, dtype=np.complex128)
    count = [0]

    def tick(_):
        count[0] += 1

    xp, info = spla.gmres(
        full,
        rhs[order],
        x0=lu.solve(rhs[order]),
        rtol=1e-14,
        atol=0.0,
        restart=40,
        maxiter=20,
        M=pre,
        callback=tick,
        callback_type="pr_norm",
    )
    if info != 0:
        raise ConvergenceError(f"GMRES did not converge (info={info})")
    return xp[inverse], count[0]


def solve_steady_state(L: Liouvillian, method: str = "auto") -> tuple[DensityMatrix, SolveInfo]:
    """Unique unit-trace null vector of ``L``.

    ``method`` is ``"direct"`` (sparse LU of the trace-constrained system),
    ``"sectors"`` (preconditioned GMRES on the same system) or ``"auto"``
    (sectors when sector labels are available, falling back to direct).
    Returns the symmetrized state and solve diagnostics.
    """
    if method not in ("auto", "direct", "sectors"):
        raise ValueError(f"unknown method {method!r}")
    m, rhs = _constrained_system(L)
    used = method
    if method == "direct" or (method == "auto" and L.sectors is None):
        x, iters = _solve_direct(m, rhs)
        used = "direct"
    elif method == "sectors":
        if L.sectors is None:
            raise ValueError("Liouvillian carries no sector labels")
        x, iters = _solve_sectors(m, rhs, L.sectors)
    else:
        try:
            x, iters = _solve_sectors(m, rhs, L.sectors)
            used = "sectors"
        except SolverError:
            x, iters = _solve_direct(m, rhs)
            used = "direct"

    if not np.all(np.isfinite(x)):
        raise NonUniqueSteadyStateError("solution is not finite; steady state is not unique")
    raw = unvec(x)
    herm = float(np.max(np.abs(raw - raw.conj().T)))
    rho = DensityMatrix(L.space, 0.5 * (raw + raw.conj().T))

    scale = np.linalg.norm(L.matrix.data)
    residual = float(np.linalg.norm(L.matrix @ rho.entries.reshape(-1, order="F")))
    if residual > RESIDUAL_TOL * scale:
        raise ConvergenceError(f"residual {residual:.3g} exceeds {RESIDUAL_TOL:g} * ||L||")
    info = SolveInfo(
        method=used,
        iterations=iters,
        residual=residual,
        hermiticity_defect=herm,
        trace_error=abs(rho.trace - 1.0),
        min_eigenvalue=rho.min_eigenvalue(),
    )
    return rho, info


def transmission(rho: DensityMatrix, params: DeviceParams) -> complex:
    """``t = i kappa <a>_ss / epsilon``."""
    eps = params.probe_strength
    if eps == 0:
        raise UndefinedTransmissionError("transmission is undefined for epsilon = 0")
    a = cavity_lowering(params.replace(fock_cutoff=rho.space.factor_dims[1]))
    return 1j * params.kappa * expectation(a, rho) / eps


def default_cutoff(params: DeviceParams) -> int:
    """``max(10, ceil(8 n_th + 8))`` at the resonator frequency."""
    n_th = bose_einstein(params.omega_r, params.temperature)
    return max(10, math.ceil(8.0 * n_th + 8.0))


def default_probe_grid(params: DeviceParams, half_span: float = 60.0, points: int = 401) -> np.ndarray:
    return np.linspace(params.omega_r - half_span, params.omega_r + half_span, points)


def _point(builder: LiouvillianBuilder, params: DeviceParams, probe: float, method: str):
    try:
        rho, info = solve_steady_state(builder.at(probe), method=method)
    except SolverError as exc:
        raise type(exc)(str(exc), probe=probe) from exc
    return transmission(rho, params), rho, info


def certify_truncation(
    params: DeviceParams, probe: float, qubit_freq: float | None = None, method: str = "auto"
) -> bool:
    """Check that ``fock_cutoff`` is converged at one probe frequency.

    Re-solves at ``fock_cutoff + 5``; certified when ``|t|`` moves by less
    than 1e-4 and the two highest Fock populations are each below 1e-6.
    """
    if params.fock_cutoff is None or params.fock_cutoff < 4:
        raise InvalidDimensionError("certification needs fock_cutoff >= 4")
    qubit_freq = params.omega_r if qubit_freq is None else qubit_freq
    bigger = params.replace(fock_cutoff=params.fock_cutoff + CERTIFY_STEP)
    try:
        t0, rho, _ = _point(LiouvillianBuilder(params, qubit_freq), params, probe, method)
        t1, _, _ = _point(LiouvillianBuilder(bigger, qubit_freq), bigger, probe, method)
    except SolverError:
        return False
    tail = rho.fock_populations()[-2:]
    return bool(abs(abs(t0) - abs(t1)) < CERTIFY_DT and np.all(tail < CERTIFY_TAIL))


def resolve_cutoff(
    params: DeviceParams, qubit_freq: float, probe: float | None = None, method: str = "auto"
) -> tuple[DeviceParams, bool]:
    """Fix ``fock_cutoff`` if unset: heuristic start, grown until certified.

    An explicit cutoff is kept and only certified.
    """
    probe = params.omega_r if probe is None else probe
    if params.fock_cutoff is not None:
        return params, certify_truncation(params, probe, qubit_freq, method)
    cutoff = default_cutoff(params)
    while True:
        trial = params.replace(fock_cutoff=cutoff)
        if certify_truncation(trial, probe, qubit_freq, method):
            return trial, True
        if cutoff + CERTIFY_STEP > MAX_CUTOFF:
            return trial, False
        cutoff += CERTIFY_STEP


def _check_grid(probe_grid) -> np.ndarray:
    grid = np.asarray(probe_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("probe_grid must be a nonempty 1-D sequence")
    if grid.size > 1 and np.any(np.diff(grid) <= 0):
        raise ValueError("probe_grid must be strictly increasing")
    return grid


def _sweep(params, qubit_freq, grid, threads, method):
    builder = LiouvillianBuilder(params, qubit_freq)
    task = lambda wp: _point(builder, params, float(wp), method)  # noqa: E731
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(task, grid))
    else:
        results = [task(wp) for wp in grid]
    t = np.array([r[0] for r in results], dtype=np.complex128)
    infos = [r[2] for r in results]
    diag = {
        "points": len(infos),
        "max_residual": max(i.residual for i in infos),
        "max_hermiticity_defect": max(i.hermiticity_defect for i in infos),
        "max_trace_error": max(i.trace_error for i in infos),
        "min_eigenvalue": min(i.min_eigenvalue for i in infos),
        "max_iterations": max(i.iterations for i in infos),
        "methods": sorted({i.method for i in infos}),
    }
    return t, diag


def spectrum(
    params: DeviceParams,
    qubit_freq: float,
    probe_grid,
    *,
    threads: int = 1,
    certify: bool = True,
    method: str = "auto",
) -> SpectrumResult:
    """Steady-state transmission over ``probe_grid``.

    With ``fock_cutoff=None`` the cutoff is chosen by :func:`resolve_cutoff`
    and grown further if the final check at the spectral maximum fails.
    """
    grid = _check_grid(probe_grid)
    auto = params.fock_cutoff is None
    if auto:
        center = float(grid[np.argmin(np.abs(grid - params.omega_r))])
        params, _ = resolve_cutoff(params, qubit_freq, center, method)
    while True:
        t, diag = _sweep(params, qubit_freq, grid, threads, method)
        certified = False
        if certify:
            peak = float(grid[int(np.argmax(np.abs(t)))])
            certified = certify_truncation(params, peak, qubit_freq, method)
        if certified or not auto or params.fock_cutoff + CERTIFY_STEP > MAX_CUTOFF:
            break
        params = params.replace(fock_cutoff=params.fock_cutoff + CERTIFY_STEP)
    return SpectrumResult(grid, t, params, float(qubit_freq), certified, diag)


def _vertex(x, y) -> tuple[float, float]:
    """Vertex of the parabola through three points."""
    (x0, x1, x2), (y0, y1, y2) = x, y
    d01, d12, d02 = x0 - x1, x1 - x2, x0 - x2
    a = (y0 / (d01 * d02)) - (y1 / (d01 * d12)) + (y2 / (d02 * d12))
    b = (y1 - y0) / (x1 - x0) - a * (x0 + x1)
    if a >= 0:
        return float(x1), float(y1)
    xv = -b / (2 * a)
    c = y1 - a * x1 * x1 - b * x1
    return float(xv), float(a * xv * xv + b * xv + c)


def find_peaks(spectrum_result, prominence: float = 0.05, frequencies=None) -> list[tuple[float, float]]:
    """Local maxima of ``|t|`` with prominence >= ``prominence * max|t|``.

    Accepts a :class:`SpectrumResult` or a sample array plus ``frequencies``.
    Positions and heights are refined with a three-point parabola.
    """
    if prominence <= 0:
        raise ValueError("prominence must be > 0")
    if isinstance(spectrum_result, SpectrumResult):
        x = spectrum_result.probe_frequencies
        y = spectrum_result.abs_t
    else:
        y = np.abs(np.asarray(spectrum_result))
        x = np.arange(y.size, dtype=float) if frequencies is None else np.asarray(frequencies, float)
    if y.size < 3 or not np.any(y > 0):
        return []
    idx, _ = scipy.signal.find_peaks(y, prominence=prominence * float(y.max()))
    return [_vertex(x[i - 1 : i + 2], y[i - 1 : i + 2]) for i in idx]
