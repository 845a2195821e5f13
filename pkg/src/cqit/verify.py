"""Self-check suite run by ``cqit verify``.

Every check returns ``(ok, detail)``. Details are formatted with fixed
precision so that repeated runs print identical bytes.
"""

from __future__ import annotations

import math
import random

from . import interferometer
from .analysis import average_fidelity, complete_transfer, entanglement_probability, realistic_success_probability
from .cavity import CavityParams, IdealCavity, coefficients
from .interferometer import ProtocolConfig, cos_power, readout, run_inner, run_protocol, target_state
from .state import CONSERVATION_TOL, Polarization, SpinState, make_initial, norm2

M_GRID = (1, 2, 3, 4, 5, 10, 30)
N_GRID = (1, 2, 3, 4, 5, 50, 300, 2000)

# realistic inner-loop success at kappa_s = 0.01, g = 3, gamma = 0.1, N = 300
REALISTIC_ANCHOR = 0.634946520034641


def _max_readout_gap(M, N, s, oracle):
    spin = SpinState(2 ** -0.5, 2 ** -0.5)
    res = run_protocol(ProtocolConfig(M, N, s, s, spin))
    gap = 0.0
    for state, ref in zip(res.history, oracle(M, N, s, s)):
        got = readout(state, spin)
        gap = max(gap, abs(got.x - ref.x), abs(got.y - ref.y), abs(got.z - ref.z), abs(got.w - ref.w))
    return gap


def check_recursion_anchor():
    pt = interferometer.recursion_run(30, 2000)[-1]
    ok = round(pt.x, 4) == 0.0059 and round(pt.z, 4) == 0.9905
    ok = ok and abs(pt.y - cos_power(math.pi / 60, 30)) < 1e-12
    return ok, f"x={pt.x:.4f} y={pt.y:.4f} z={pt.z:.4f}"


def check_oracle_equivalence():
    gap = max(_max_readout_gap(M, N, 0.0, interferometer.recursion_run) for M in M_GRID for N in N_GRID)
    return gap < 1e-12, f"max gap {gap:.1e} over {len(M_GRID) * len(N_GRID)} (M, N) at s=0"


def check_error_oracle():
    gap = max(
        _max_readout_gap(M, N, s, interferometer.exact_recursion_run)
        for s in (0.5, 1.0, 2.0)
        for M in M_GRID
        for N in N_GRID
    )
    return gap < 1e-12, f"max gap {gap:.1e} for s in {{0.5, 1, 2}} against the four-term recursion"


def check_conservation():
    worst = 0.0
    for M, N in ((7, 300), (30, 50), (3, 2000)):

        def watch(parked, inner):
            nonlocal worst
            total = norm2(parked) + inner.total
            worst = max(worst, abs(total - 1.0))

        run_protocol(ProtocolConfig(M, N, spin=SpinState(0.6, 0.8)), on_cycle=watch)
    return worst < CONSERVATION_TOL, f"max ledger error {worst:.1e}"


def check_inner_closed_form():
    rng = random.Random(7)
    gap = 0.0
    for N in (1, 2, 10, 300, 2000):
        for _ in range(3):
            xi = rng.uniform(0, 2 * math.pi)
            spin = SpinState.from_angle(xi)
            out = run_inner(make_initial(Polarization.L, spin), N, math.pi / (2 * N), IdealCavity())
            gap = max(gap, abs(norm2(out) - entanglement_probability(spin.alpha, spin.beta, N)))
    return gap < 1e-12, f"max gap {gap:.1e}"


def check_realistic_anchor():
    p = realistic_success_probability(300, CavityParams(g=3.0, kappa_s=0.01, gamma=0.1))
    ok = abs(p - 0.63) <= 0.05 and abs(p - REALISTIC_ANCHOR) <= 1e-9
    return ok, f"P={p:.9f}"


def check_fidelity_trend():
    ok = True
    parts = []
    for M, N in ((15, 500), (30, 2000)):
        values = [average_fidelity(M, N, s).avg_fidelity for s in (0, 2, 4, 6, 8, 10)]
        ok = ok and abs(values[0] - 1.0) < 1e-12
        ok = ok and all(b < a for a, b in zip(values, values[1:]))
        parts.append(f"({M},{N}): F(10)={values[-1]:.6f}")
    return ok, " ".join(parts)


def check_cavity_limits():
    c = coefficients(CavityParams(g=0.0, kappa_s=0.05, gamma=0.1, detuning=0.3))
    ok = abs(c.r - c.r0) < 1e-15 and abs(c.t - c.t0) < 1e-15
    c = coefficients(CavityParams(g=3.0, kappa_s=0.0, gamma=0.1))
    ok = ok and abs(abs(c.r0) ** 2 + abs(c.t0) ** 2 - 1.0) < 1e-12
    ok = ok and c.t0 == -1 and c.r0 == 0
    return ok, f"t0={c.t0.real:.1f} r0={c.r0.real:.1f}"


def check_transfer_completion():
    rng = random.Random(11)
    gap = 0.0
    for _ in range(20):
        spin = SpinState.from_angle(rng.uniform(0, 2 * math.pi))
        outcomes = complete_transfer(target_state(spin))
        gap = max(gap, abs(sum(o.probability for o in outcomes) - 1.0))
        for o in outcomes:
            gap = max(gap, abs(o.probability - 0.5))
            fid = abs(o.corrected_photon[0] * spin.alpha.conjugate() + o.corrected_photon[1] * spin.beta.conjugate())
            gap = max(gap, abs(fid - 1.0))
    return gap < 1e-12, f"max gap {gap:.1e} over 20 spins"


CHECKS = [
    ("recursion-anchor", check_recursion_anchor),
    ("oracle-equivalence", check_oracle_equivalence),
    ("error-model-oracle", check_error_oracle),
    ("conservation", check_conservation),
    ("inner-closed-form", check_inner_closed_form),
    ("realistic-anchor", check_realistic_anchor),
    ("fidelity-trend", check_fidelity_trend),
    ("cavity-limits", check_cavity_limits),
    ("transfer-completion", check_transfer_completion),
]


def run_checks(out) -> bool:
    all_ok = True
    for name, fn in CHECKS:
        try:
            ok, detail = fn()
        except Exception as exc:  # a crashing check is a failing check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        all_ok = all_ok and ok
        out.write(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}\n")
    out.write(f"{'all checks passed' if all_ok else 'verification FAILED'}\n")
    return all_ok
