"""Inner and outer Michelson cycles, the nested protocol, and its recursions.

Arm routing is procedural. Each polarizing beam splitter is a
``keep_polarization`` split into two ``HybridState`` arms; the arms evolve
separately and are recombined with ``combine``. Detector tallies travel
with whichever arm holds them, so the probability ledger stays exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

from .cavity import IdealCavity, RealisticCavity, scatter_arm
from .state import (
    Detector,
    HybridState,
    Polarization,
    Spin,
    SpinState,
    absorb,
    combine,
    keep_polarization,
    make_initial,
    norm2,
    overlap,
    phase_flip_R,
    spr_rotate,
)

__all__ = [
    "CavityMode",
    "ProtocolConfig",
    "RecursionPoint",
    "RunResult",
    "cos_power",
    "inner_cycle",
    "run_inner",
    "outer_cycle",
    "run_protocol",
    "readout",
    "target_state",
    "recursion_step",
    "recursion_run",
    "exact_recursion_step",
    "exact_recursion_run",
]

CavityMode = Union[IdealCavity, RealisticCavity]

L, R = Polarization.L, Polarization.R
UP, DOWN = Spin.UP, Spin.DOWN


def cos_power(angle: float, n: int) -> float:
    """``cos(angle) ** n`` evaluated in log space."""
    c = math.cos(angle)
    if c == 0.0:
        return 0.0
    sign = -1.0 if (c < 0 and n % 2) else 1.0
    if c > 0.5:
        # log1p keeps the precision that 1 - cos loses for small angles
        log_c = math.log1p(-2.0 * math.sin(angle / 2) ** 2)
    else:
        log_c = math.log(abs(c))
    return sign * math.exp(n * log_c)


@dataclass(frozen=True)
class ProtocolConfig:
    M: int
    N: int
    s1: float = 0.0
    s2: float = 0.0
    spin: SpinState = field(default_factory=lambda: SpinState(2 ** -0.5, 2 ** -0.5))
    cavity: CavityMode = field(default_factory=IdealCavity)

    def __post_init__(self):
        if int(self.M) != self.M or self.M < 1:
            raise ValueError(f"M must be a positive integer, got {self.M!r}")
        if int(self.N) != self.N or self.N < 1:
            raise ValueError(f"N must be a positive integer, got {self.N!r}")

    @property
    def vartheta(self) -> float:
        return math.pi / (2 * self.M)

    @property
    def theta(self) -> float:
        return math.pi / (2 * self.N)

    @property
    def outer_angle(self) -> float:
        """Outer rotation actually applied, including the rotator error."""
        return self.vartheta + self.s1 * self.vartheta / self.M

    @property
    def inner_angle(self) -> float:
        return self.theta + self.s2 * self.theta / self.N


@dataclass(frozen=True)
class RecursionPoint:
    """Coefficients of ``alpha x|R,up> + beta y|R,down> - alpha z|L,up>``.

    ``w`` is the coefficient of ``beta|L,down>``. It stays zero for
    error-free rotators and in the three-term recursion; only the exact
    recursion (and the state-vector simulation) fills it.
    """

    x: float
    y: float
    z: float
    w: float = 0.0


@dataclass
class RunResult:
    final: HybridState
    success_prob: float
    d1: float
    d2: float
    target_fidelity: float
    history: list[HybridState] = field(default_factory=list, repr=False)

    @property
    def leaked(self) -> float:
        """Probability lost without reaching a detector (lossy cavity only)."""
        return 1.0 - self.success_prob - self.d1 - self.d2


def inner_cycle(state: HybridState, theta: float, cavity: CavityMode) -> HybridState:
    """One round trip of the inner interferometer.

    rotate -> split (L stays home, R goes to the cavity) -> scatter ->
    the L light coming off the cavity goes to D2 -> phase flip on R ->
    recombine.
    """
    rotated = spr_rotate(state, theta)
    home = keep_polarization(rotated, L)
    remote = keep_polarization(rotated, R, keep_counters=False)
    remote = scatter_arm(remote, cavity)
    remote = absorb(remote, L, Detector.D2)
    remote = phase_flip_R(remote)
    return combine(home, remote)


def run_inner(
    state: HybridState,
    N: int,
    theta: float,
    cavity: CavityMode,
    on_cycle: Optional[Callable[[HybridState], None]] = None,
) -> HybridState:
    for _ in range(N):
        state = inner_cycle(state, theta, cavity)
        if on_cycle is not None:
            on_cycle(state)
    return state


def outer_cycle(
    state: HybridState,
    vartheta: float,
    N: int,
    theta: float,
    cavity: CavityMode,
    on_cycle: Optional[Callable[[HybridState, HybridState], None]] = None,
) -> HybridState:
    """One outer round trip; ``on_cycle(parked, inner)`` fires after each inner cycle."""
    rotated = spr_rotate(state, vartheta)
    parked = keep_polarization(rotated, R, keep_counters=False)
    inner = keep_polarization(rotated, L)
    hook = None if on_cycle is None else (lambda s: on_cycle(parked, s))
    inner = run_inner(inner, N, theta, cavity, on_cycle=hook)
    inner = absorb(inner, R, Detector.D1)
    return combine(parked, inner)


def target_state(spin: SpinState) -> HybridState:
    """Ideal output ``beta|R,down> - alpha|L,up>``."""
    amp = [[0, 0], [0, 0]]
    amp[L][UP] = -spin.alpha
    amp[R][DOWN] = spin.beta
    return HybridState(amp)


def _fidelity(a: HybridState, b: HybridState) -> float:
    na, nb = norm2(a), norm2(b)
    if na == 0.0 or nb == 0.0:
        return 0.0
    return abs(overlap(a, b)) ** 2 / (na * nb)


def run_protocol(
    config: ProtocolConfig,
    on_cycle: Optional[Callable[[HybridState, HybridState], None]] = None,
) -> RunResult:
    state = make_initial(R, config.spin)
    vartheta, theta = config.outer_angle, config.inner_angle
    history = []
    for _ in range(config.M):
        state = outer_cycle(state, vartheta, config.N, theta, config.cavity, on_cycle)
        history.append(state)
    return RunResult(
        final=state,
        success_prob=norm2(state),
        d1=state.absorbed_d1,
        d2=state.absorbed_d2,
        target_fidelity=_fidelity(target_state(config.spin), state),
        history=history,
    )


def readout(state: HybridState, spin: SpinState) -> RecursionPoint:
    """Read (x, y, z, w) off a protocol state; NaN where the spin amplitude is zero."""

    def ratio(num, den):
        return (num / den).real if den != 0 else math.nan

    return RecursionPoint(
        x=ratio(state[R, UP], spin.alpha),
        y=ratio(state[R, DOWN], spin.beta),
        z=ratio(-state[L, UP], spin.alpha),
        w=ratio(state[L, DOWN], spin.beta),
    )


def recursion_step(prev: RecursionPoint, vartheta: float, N: int, theta_inner: float) -> RecursionPoint:
    c, s = math.cos(vartheta), math.sin(vartheta)
    return RecursionPoint(
        x=prev.x * c - prev.z * s,
        y=prev.y * c,
        z=(prev.x * s + prev.z * c) * cos_power(theta_inner, N),
    )


def _angles(M: int, N: int, s1: float, s2: float) -> tuple[float, float]:
    vartheta = math.pi / (2 * M)
    theta = math.pi / (2 * N)
    return vartheta + s1 * vartheta / M, theta + s2 * theta / N


def recursion_run(M: int, N: int, s1: float = 0.0, s2: float = 0.0) -> list[RecursionPoint]:
    """Three-term recursion from ``(x, y, z) = (1, 1, 0)``; entry ``m - 1`` is outer step m.

    Rotator errors just replace both angles by their shifted values. For
    nonzero ``s2`` that drops the ``|L,down>`` light the inner loop
    returns; ``exact_recursion_run`` keeps it.
    """
    vartheta, theta = _angles(M, N, s1, s2)
    point = RecursionPoint(1.0, 1.0, 0.0)
    out = []
    for _ in range(M):
        point = recursion_step(point, vartheta, N, theta)
        out.append(point)
    return out


def exact_recursion_step(prev: RecursionPoint, vartheta: float, N: int, theta_inner: float) -> RecursionPoint:
    c, s = math.cos(vartheta), math.sin(vartheta)
    # N inner cycles: |L,up> only survives on the home arm, |L,down> is
    # rotated by N*theta_inner and its R part goes to D1
    up_gain = cos_power(theta_inner, N)
    down_gain = math.cos(N * theta_inner)
    return RecursionPoint(
        x=prev.x * c - prev.z * s,
        y=prev.y * c + prev.w * s,
        z=(prev.x * s + prev.z * c) * up_gain,
        w=(prev.w * c - prev.y * s) * down_gain,
    )


def exact_recursion_run(M: int, N: int, s1: float = 0.0, s2: float = 0.0) -> list[RecursionPoint]:
    vartheta, theta = _angles(M, N, s1, s2)
    point = RecursionPoint(1.0, 1.0, 0.0, 0.0)
    out = []
    for _ in range(M):
        point = exact_recursion_step(point, vartheta, N, theta)
        out.append(point)
    return out
