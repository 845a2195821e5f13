"""Hybrid photon-polarization / electron-spin amplitude state.

The state is four complex amplitudes indexed ``amp[pol, spin]`` plus the
probability already swallowed by the two detectors. Amplitudes are never
renormalized during evolution; lost probability shows up either in a
detector tally or (for a lossy cavity) nowhere at all.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Polarization",
    "Spin",
    "Detector",
    "SpinState",
    "HybridState",
    "make_initial",
    "spr_rotate",
    "phase_flip_R",
    "absorb",
    "norm2",
    "overlap",
    "keep_polarization",
    "combine",
    "NORM_TOL",
    "CONSERVATION_TOL",
]

NORM_TOL = 1e-9
CONSERVATION_TOL = 1e-12


class Polarization(enum.IntEnum):
    L = 0
    R = 1


class Spin(enum.IntEnum):
    UP = 0
    DOWN = 1


class Detector(enum.Enum):
    D1 = "d1"
    D2 = "d2"


@dataclass(frozen=True)
class SpinState:
    """Electron spin ``alpha|up> + beta|down>``."""

    alpha: complex
    beta: complex

    def __post_init__(self):
        n = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if abs(n - 1.0) > NORM_TOL:
            raise ValueError(f"spin state not normalized: |alpha|^2 + |beta|^2 = {n!r}")

    @classmethod
    def from_angle(cls, xi: float) -> "SpinState":
        return cls(math.cos(xi), math.sin(xi))


@dataclass(frozen=True, eq=False)
class HybridState:
    amp: np.ndarray = field(default_factory=lambda: np.zeros((2, 2), dtype=complex))
    absorbed_d1: float = 0.0
    absorbed_d2: float = 0.0

    def __post_init__(self):
        a = np.asarray(self.amp, dtype=complex)
        if a.shape != (2, 2):
            raise ValueError(f"amplitude array must have shape (2, 2), got {a.shape}")
        a.flags.writeable = False
        object.__setattr__(self, "amp", a)

    def __getitem__(self, key: tuple[Polarization, Spin]) -> complex:
        pol, spin = key
        return complex(self.amp[pol, spin])

    @property
    def total(self) -> float:
        """Surviving norm plus both detector tallies."""
        return norm2(self) + self.absorbed_d1 + self.absorbed_d2

    def replace(self, amp=None, absorbed_d1=None, absorbed_d2=None) -> "HybridState":
        return HybridState(
            self.amp if amp is None else amp,
            self.absorbed_d1 if absorbed_d1 is None else absorbed_d1,
            self.absorbed_d2 if absorbed_d2 is None else absorbed_d2,
        )

    def __repr__(self):
        cells = ", ".join(
            f"{p.name}{'↑' if s is Spin.UP else '↓'}={self.amp[p, s]:.6g}"
            for p in Polarization
            for s in Spin
        )
        return f"HybridState({cells}, d1={self.absorbed_d1:.6g}, d2={self.absorbed_d2:.6g})"


def make_initial(photon_pol: Polarization, spin: SpinState) -> HybridState:
    amp = np.zeros((2, 2), dtype=complex)
    amp[photon_pol, Spin.UP] = spin.alpha
    amp[photon_pol, Spin.DOWN] = spin.beta
    return HybridState(amp)


def _rotation(angle: float) -> np.ndarray:
    # rows/cols ordered (L, R): L -> cos L + sin R,  R -> cos R - sin L
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s], [s, c]])


def spr_rotate(state: HybridState, angle: float) -> HybridState:
    """Rotate the polarization by ``angle`` in the {L, R} plane, spin untouched."""
    return state.replace(amp=_rotation(angle) @ state.amp)


_FLIP_R = np.array([[1.0], [-1.0]])


def phase_flip_R(state: HybridState) -> HybridState:
    return state.replace(amp=state.amp * _FLIP_R)


def absorb(state: HybridState, pol: Polarization, detector: Detector) -> HybridState:
    """Move the whole ``pol`` row into a detector tally."""
    row = state.amp[pol]
    p = float(np.vdot(row, row).real)
    amp = state.amp.copy()
    amp[pol] = 0
    if detector is Detector.D1:
        return HybridState(amp, state.absorbed_d1 + p, state.absorbed_d2)
    return HybridState(amp, state.absorbed_d1, state.absorbed_d2 + p)


def norm2(state: HybridState) -> float:
    return float(np.vdot(state.amp, state.amp).real)


def overlap(a: HybridState, b: HybridState) -> complex:
    return complex(np.vdot(a.amp, b.amp))


def keep_polarization(state: HybridState, pol: Polarization, keep_counters: bool = True) -> HybridState:
    """Project onto one polarization row (a c-PBS output port)."""
    amp = np.zeros((2, 2), dtype=complex)
    amp[pol] = state.amp[pol]
    if keep_counters:
        return HybridState(amp, state.absorbed_d1, state.absorbed_d2)
    return HybridState(amp)


def combine(a: HybridState, b: HybridState) -> HybridState:
    """Recombine two interferometer arms: amplitudes and tallies both add."""
    return HybridState(
        a.amp + b.amp,
        a.absorbed_d1 + b.absorbed_d1,
        a.absorbed_d2 + b.absorbed_d2,
    )
