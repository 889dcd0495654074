"""Dense operator algebra on a labeled tensor-product Hilbert space.

The joint space is ordered transmon first, Fock second, so the basis index of
``|l, n>`` is ``l * fock_dim + n``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from math import prod

import numpy as np

from .errors import DimensionMismatchError, InvalidDimensionError

__all__ = [
    "HilbertSpace",
    "Operator",
    "annihilation",
    "creation",
    "identity",
    "number",
    "projector",
    "tensor",
    "expectation",
]


@dataclass(frozen=True)
class HilbertSpace:
    factor_dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.factor_dims)
        if not dims:
            raise InvalidDimensionError("a Hilbert space needs at least one factor")
        for d in dims:
            if d < 2:
                raise InvalidDimensionError(f"factor dimension {d} < 2")
        object.__setattr__(self, "factor_dims", dims)

    @property
    def total_dim(self) -> int:
        return prod(self.factor_dims)

    def __mul__(self, other: HilbertSpace) -> HilbertSpace:
        return HilbertSpace(self.factor_dims + other.factor_dims)


@dataclass(frozen=True, eq=False)
class Operator:
    """Square complex matrix acting on ``space``.

    ``entries`` is stored as a read-only complex128 array so operators can be
    shared freely.
    """

    space: HilbertSpace
    entries: np.ndarray

    def __post_init__(self):
        m = np.array(self.entries, dtype=np.complex128)
        n = self.space.total_dim
        if m.shape != (n, n):
            raise DimensionMismatchError(
                f"entries shape {m.shape} does not match space dimension {n}"
            )
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.space.total_dim

    def dag(self) -> Operator:
        return Operator(self.space, self.entries.conj().T)

    def _check(self, other: Operator) -> None:
        if other.space != self.space:
            raise DimensionMismatchError(
                f"space mismatch: {self.space.factor_dims} vs {other.space.factor_dims}"
            )

    def __matmul__(self, other: Operator) -> Operator:
        self._check(other)
        return Operator(self.space, self.entries @ other.entries)

    def __add__(self, other: Operator) -> Operator:
        self._check(other)
        return Operator(self.space, self.entries + other.entries)

    def __sub__(self, other: Operator) -> Operator:
        self._check(other)
        return Operator(self.space, self.entries - other.entries)

    def __neg__(self) -> Operator:
        return Operator(self.space, -self.entries)

    def __mul__(self, scalar) -> Operator:
        if isinstance(scalar, Operator):
            return NotImplemented
        return Operator(self.space, complex(scalar) * self.entries)

    __rmul__ = __mul__

    def commutator(self, other: Operator) -> Operator:
        return self @ other - other @ self

    def is_hermitian(self, atol: float = 1e-12) -> bool:
        return bool(np.allclose(self.entries, self.entries.conj().T, rtol=0, atol=atol))

    def __repr__(self) -> str:
        return f"Operator(dims={self.space.factor_dims})"


def annihilation(fock_dim: int) -> Operator:
    """Truncated bosonic lowering operator, ``<n-1|a|n> = sqrt(n)``."""
    if fock_dim < 2:
        raise InvalidDimensionError(f"fock_dim must be >= 2, got {fock_dim}")
    m = np.diag(np.sqrt(np.arange(1, fock_dim, dtype=float)), k=1)
    return Operator(HilbertSpace((fock_dim,)), m)


def creation(fock_dim: int) -> Operator:
    return annihilation(fock_dim).dag()


def number(fock_dim: int) -> Operator:
    a = annihilation(fock_dim)
    return a.dag() @ a


def identity(dim: int) -> Operator:
    return Operator(HilbertSpace((dim,)), np.eye(dim))


def projector(dim: int, k: int) -> Operator:
    """``|k><k|`` on a single factor of dimension ``dim``."""
    m = np.zeros((dim, dim))
    m[k, k] = 1.0
    return Operator(HilbertSpace((dim,)), m)


def tensor(*ops: Operator) -> Operator:
    """Kronecker product; factor dimensions are concatenated in order."""
    if not ops:
        raise ValueError("tensor() needs at least one operand")
    space = reduce(lambda s, o: s * o.space, ops[1:], ops[0].space)
    entries = reduce(np.kron, (o.entries for o in ops))
    return Operator(space, entries)


def expectation(op: Operator, rho) -> complex:
    """``Tr(op @ rho)``; ``rho`` is any object with ``space`` and ``entries``."""
    space = getattr(rho, "space", None)
    if space is not None and space != op.space:
        raise DimensionMismatchError(
            f"space mismatch: {op.space.factor_dims} vs {space.factor_dims}"
        )
    r = np.asarray(getattr(rho, "entries", rho))
    if r.shape != op.entries.shape:
        raise DimensionMismatchError(f"shape mismatch: {op.entries.shape} vs {r.shape}")
    # Tr(AB) = sum_ij A_ij B_ji without forming the product.
    return complex(np.einsum("ij,ji->", op.entries, r))
