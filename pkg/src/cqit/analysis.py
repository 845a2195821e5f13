"""Derived quantities: success probabilities, rotator-error fidelity, final spin read-out."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .cavity import CavityParams, RealisticCavity
from .interferometer import cos_power, exact_recursion_run, recursion_run, run_inner
from .state import HybridState, Polarization, Spin, SpinState, make_initial, norm2

__all__ = [
    "entanglement_probability",
    "FidelityReport",
    "average_fidelity",
    "realistic_success_probability",
    "MeasurementOutcome",
    "complete_transfer",
]

L, R = Polarization.L, Polarization.R
UP, DOWN = Spin.UP, Spin.DOWN


def entanglement_probability(alpha: complex, beta: complex, N: int) -> float:
    """Success probability of N error-free inner cycles started from ``|L>``."""
    return abs(alpha) ** 2 * cos_power(math.pi / (2 * N), 2 * N) + abs(beta) ** 2


@dataclass(frozen=True)
class FidelityReport:
    s1: float
    s2: float
    M: int
    N: int
    avg_fidelity: float
    quad_points: int
    normalized: bool = True

    @property
    def s(self) -> float:
        return self.s1


def _fidelity_integrand(ideal, real, xi: np.ndarray, normalized: bool) -> np.ndarray:
    a2, b2 = np.cos(xi) ** 2, np.sin(xi) ** 2
    ov = a2 * (ideal.x * real.x + ideal.z * real.z) + b2 * (ideal.y * real.y + ideal.w * real.w)
    f = ov * ov
    if normalized:
        n_ideal = a2 * (ideal.x ** 2 + ideal.z ** 2) + b2 * (ideal.y ** 2 + ideal.w ** 2)
        n_real = a2 * (real.x ** 2 + real.z ** 2) + b2 * (real.y ** 2 + real.w ** 2)
        f = f / (n_ideal * n_real)
    return f


def average_fidelity(
    M: int,
    N: int,
    s1: float,
    s2: Optional[float] = None,
    quad_points: int = 256,
    normalized: bool = True,
    exact: bool = False,
    tol: float = 1e-9,
    max_points: int = 1 << 20,
) -> FidelityReport:
    """Average of ``|<psi|psi'>|^2`` over spin inputs ``(cos xi, sin xi)``.

    ``psi`` is the error-free output and ``psi'`` the output with both
    rotators over-rotated by ``s * angle / cycles``. Both come from the
    recursion (``exact=True`` uses the four-term one). The periodic
    trapezoid rule is doubled from ``quad_points`` until successive
    estimates agree within ``tol``.
    """
    if quad_points < 64:
        raise ValueError(f"quad_points must be >= 64, got {quad_points}")
    if s2 is None:
        s2 = s1
    run = exact_recursion_run if exact else recursion_run
    ideal = run(M, N)[-1]
    real = run(M, N, s1, s2)[-1]

    def estimate(n):
        xi = 2 * np.pi * np.arange(n) / n
        return float(np.mean(_fidelity_integrand(ideal, real, xi, normalized)))

    n = quad_points
    value = estimate(n)
    while n < max_points:
        finer = estimate(2 * n)
        n *= 2
        converged = abs(finer - value) < tol
        value = finer
        if converged:
            break
    return FidelityReport(s1, s2, M, N, value, n, normalized)


def realistic_success_probability(
    N: int,
    params: CavityParams,
    alpha: complex = 2 ** -0.5,
    beta: complex = 2 ** -0.5,
    phase_faithful: bool = False,
) -> float:
    """Weight left on ``|L,up>`` and ``|R,down>`` after N lossy inner cycles."""
    cavity = RealisticCavity(params, phase_faithful)
    state = run_inner(make_initial(L, SpinState(alpha, beta)), N, math.pi / (2 * N), cavity)
    return abs(state[L, UP]) ** 2 + abs(state[R, DOWN]) ** 2


@dataclass(frozen=True)
class MeasurementOutcome:
    spin_result: Spin
    photon_state: np.ndarray  # amplitudes over (L, R), normalized
    probability: float
    correction_needed: bool

    @property
    def corrected_photon(self) -> np.ndarray:
        if not self.correction_needed:
            return self.photon_state
        return self.photon_state * np.array([1.0, -1.0])


_SQ = 2 ** -0.5


def complete_transfer(state: HybridState, tol: float = 1e-6) -> list[MeasurementOutcome]:
    """Hadamard on the spin, then measure it in {up, down}.

    ``state`` should be of the form ``beta|R,down> - alpha|L,up>``. It is
    normalized first, and any weight elsewhere above ``tol`` is an error.
    Weight below ``tol`` is projected away. The global sign of that form is
    divided out, so the down outcome carries ``alpha|L> + beta|R>`` and the
    up outcome ``alpha|L> - beta|R>``.
    """
    n = norm2(state)
    if n == 0.0:
        raise ValueError("cannot complete transfer from an empty state")
    stray = (abs(state[L, DOWN]) ** 2 + abs(state[R, UP]) ** 2) / n
    if stray > tol:
        raise ValueError(f"state has weight {stray:.3g} outside span{{|L,up>, |R,down>}}")
    alpha = -state[L, UP] / math.sqrt(n)
    beta = state[R, DOWN] / math.sqrt(n)
    # -alpha L (up + down)/sqrt2 + beta R (up - down)/sqrt2
    branches = {
        UP: -_SQ * np.array([-alpha, beta]),
        DOWN: -_SQ * np.array([-alpha, -beta]),
    }
    total = abs(alpha) ** 2 + abs(beta) ** 2
    outcomes = []
    for spin, vec in branches.items():
        p = float(np.vdot(vec, vec).real) / total
        photon = vec / math.sqrt(p * total) if p > 0 else vec
        outcomes.append(MeasurementOutcome(spin, photon, p, spin is UP))
    return outcomes
