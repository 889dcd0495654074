"""Closed-form Jaynes-Cummings dressed-state analytics."""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "DressedLevel",
    "TransitionLine",
    "dressed_energies",
    "dressed_levels",
    "mixing_angle",
    "transition_lines",
    "VACUUM_AMPLITUDE",
]

# <g,0| a |1,+-> = 1/sqrt(2); stored as 2x that so that, like the ladder lines,
# the matrix element is amplitude / 2.
VACUUM_AMPLITUDE = math.sqrt(2.0)


@dataclass(frozen=True)
class DressedLevel:
    n: int
    branch: str  # "+" or "-"
    energy: float


@dataclass(frozen=True)
class TransitionLine:
    n: int
    kind: str  # "vacuum+", "vacuum-", "1", "2", "3", "4"
    frequency: float
    relative_amplitude: float


def dressed_energies(n: int, omega_r: float, delta: float, g: float) -> tuple[float, float]:
    """Return ``(E_plus, E_minus)`` of the ``n``-excitation doublet."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    center = omega_r * (n - 0.5)
    half = 0.5 * math.sqrt(delta * delta + 4.0 * g * g * n)
    return center + half, center - half


def dressed_levels(n: int, omega_r: float, delta: float, g: float) -> tuple[DressedLevel, DressedLevel]:
    e_plus, e_minus = dressed_energies(n, omega_r, delta, g)
    return DressedLevel(n, "+", e_plus), DressedLevel(n, "-", e_minus)


def mixing_angle(n: int, delta: float, g: float) -> float:
    """Mixing angle with ``tan(2 theta) = 2 g sqrt(n) / delta``."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return 0.5 * math.atan2(2.0 * g * math.sqrt(n), delta)


def transition_lines(n_max: int, omega: float, g: float) -> list[TransitionLine]:
    """Resonant (``w_a = w_r = omega``) transition ladder up to ``n_max``.

    Kinds 1/2 are the inner pair ``omega +- g(sqrt(n+1) - sqrt(n))`` and carry
    amplitude ``sqrt(n+1) + sqrt(n)``; kinds 3/4 are the outer pair
    ``omega +- g(sqrt(n+1) + sqrt(n))`` with ``sqrt(n+1) - sqrt(n)``.
    """
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    lines = [
        TransitionLine(0, "vacuum+", omega + g, VACUUM_AMPLITUDE),
        TransitionLine(0, "vacuum-", omega - g, VACUUM_AMPLITUDE),
    ]
    for n in range(1, n_max + 1):
        s1, s0 = math.sqrt(n + 1), math.sqrt(n)
        diff, summ = s1 - s0, s1 + s0
        lines += [
            TransitionLine(n, "1", omega + g * diff, summ),
            TransitionLine(n, "2", omega - g * diff, summ),
            TransitionLine(n, "3", omega + g * summ, diff),
            TransitionLine(n, "4", omega - g * summ, diff),
        ]
    return lines
