"""Quantum-dot spin in a double-sided microcavity as a photon scattering map.

All rates are in units of the cavity field decay rate (``kappa = 1`` by
default) and the cavity and trion transitions are taken to share the
resonance frequency ``omega0``; only the photon detuning from it enters.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np

from .state import HybridState, Polarization, Spin

__all__ = [
    "Direction",
    "CavityParams",
    "ScatteringCoeffs",
    "ScatterTerm",
    "ideal_scatter",
    "coefficients",
    "realistic_scatter",
    "IdealCavity",
    "RealisticCavity",
    "scatter_arm",
]


class Direction(enum.Enum):
    ALONG_Z = "along"
    AGAINST_Z = "against"

    def flipped(self) -> "Direction":
        return Direction.AGAINST_Z if self is Direction.ALONG_Z else Direction.ALONG_Z


class ScatterTerm(NamedTuple):
    amplitude: complex
    polarization: Polarization
    direction: Direction


@dataclass(frozen=True)
class CavityParams:
    g: float
    kappa_s: float
    gamma: float
    kappa: float = 1.0
    detuning: float = 0.0  # omega - omega0

    def __post_init__(self):
        if self.g < 0:
            raise ValueError(f"g must be >= 0, got {self.g}")
        if self.kappa <= 0:
            raise ValueError(f"kappa must be > 0, got {self.kappa}")
        if self.kappa_s < 0:
            raise ValueError(f"kappa_s must be >= 0, got {self.kappa_s}")
        if self.gamma <= 0:
            raise ValueError(f"gamma must be > 0, got {self.gamma}")


@dataclass(frozen=True)
class ScatteringCoeffs:
    r: complex
    t: complex
    r0: complex
    t0: complex


def _flip(pol: Polarization) -> Polarization:
    return Polarization.R if pol is Polarization.L else Polarization.L


def _couples(pol: Polarization, direction: Direction, spin: Spin) -> bool:
    # photon angular momentum +1 for R along z and L against z; that photon
    # drives the spin-up trion transition, the -1 photon the spin-down one
    plus_one = (pol is Polarization.R) == (direction is Direction.ALONG_Z)
    return plus_one == (spin is Spin.UP)


def ideal_scatter(pol: Polarization, direction: Direction, spin: Spin) -> list[ScatterTerm]:
    """Ideal coupled-reflect / uncoupled-transmit rule.

    A coupled photon is reflected with polarization and direction flipped;
    an uncoupled one is transmitted unchanged but picks up a sign.
    """
    if _couples(pol, direction, spin):
        return [ScatterTerm(1.0 + 0j, _flip(pol), direction.flipped())]
    return [ScatterTerm(-1.0 + 0j, pol, direction)]


def coefficients(params: CavityParams) -> ScatteringCoeffs:
    """Weak-excitation reflection/transmission of the loaded and empty cavity."""
    k, ks, gam, g = params.kappa, params.kappa_s, params.gamma, params.g
    d = params.detuning
    dip = -1j * d + gam / 2          # i(omega_X - omega) + gamma/2
    side = -1j * d + ks / 2          # i(omega_c - omega) + kappa_s/2
    full = -1j * d + k + ks / 2      # i(omega_c - omega) + kappa + kappa_s/2
    denom = dip * full + g * g
    r = (dip * side + g * g) / denom
    t = -k * dip / denom
    r0 = side / full
    t0 = -k / full
    return ScatteringCoeffs(complex(r), complex(t), complex(r0), complex(t0))


def realistic_scatter(
    pol: Polarization,
    direction: Direction,
    spin: Spin,
    coeffs: ScatteringCoeffs,
    phase_faithful: bool = False,
) -> list[ScatterTerm]:
    """Two-term lossy scattering rule.

    By default the coefficients enter as magnitudes with fixed signs,
    ``+|r|, +|t|`` for a coupled photon and ``-|t0|, -|r0|`` for an
    uncoupled one. With ``phase_faithful`` the complex coefficients are
    used as they are: ``r, t`` and ``t0, r0``.
    Zero-amplitude terms are dropped.
    """
    if _couples(pol, direction, spin):
        if phase_faithful:
            refl, trans = coeffs.r, coeffs.t
        else:
            refl, trans = abs(coeffs.r), abs(coeffs.t)
    else:
        if phase_faithful:
            refl, trans = coeffs.r0, coeffs.t0
        else:
            refl, trans = -abs(coeffs.r0), -abs(coeffs.t0)
    terms = [
        ScatterTerm(complex(refl), _flip(pol), direction.flipped()),
        ScatterTerm(complex(trans), pol, direction),
    ]
    return [term for term in terms if term.amplitude != 0]


class _CavityMode:
    def scatter(self, pol: Polarization, direction: Direction, spin: Spin) -> list[ScatterTerm]:
        raise NotImplementedError

    @cached_property
    def transfer(self) -> np.ndarray:
        """``T[pol_out, pol_in, spin]`` for photons entering along z.

        Output direction is dropped: the reflected (flipped) polarization is
        routed away by the polarizing beam splitter, so polarization alone
        identifies the port.
        """
        T = np.zeros((2, 2, 2), dtype=complex)
        for pol_in in Polarization:
            for spin in Spin:
                for term in self.scatter(pol_in, Direction.ALONG_Z, spin):
                    T[term.polarization, pol_in, spin] += term.amplitude
        T.flags.writeable = False
        return T


@dataclass(frozen=True)
class IdealCavity(_CavityMode):
    def scatter(self, pol, direction, spin):
        return ideal_scatter(pol, direction, spin)


@dataclass(frozen=True)
class RealisticCavity(_CavityMode):
    params: CavityParams
    phase_faithful: bool = False

    @cached_property
    def coeffs(self) -> ScatteringCoeffs:
        return coefficients(self.params)

    def scatter(self, pol, direction, spin):
        return realistic_scatter(pol, direction, spin, self.coeffs, self.phase_faithful)


def scatter_arm(state: HybridState, cavity: _CavityMode) -> HybridState:
    """Send every photon component of ``state`` into the cavity along z."""
    amp = np.einsum("ois,is->os", cavity.transfer, state.amp)
    return state.replace(amp=amp)
