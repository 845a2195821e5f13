"""Acceptance criteria, each checked at its stated tolerance.

Every test records a PASS/FAIL line through the ``criterion`` fixture before
asserting, so the terminal summary lists all of them even when some fail.
"""

import math
import subprocess
import sys
import time

import numpy as np
import pytest

from cqit.analysis import average_fidelity, complete_transfer, realistic_success_probability
from cqit.cavity import CavityParams, IdealCavity, coefficients
from cqit.interferometer import (
    ProtocolConfig,
    readout,
    recursion_run,
    run_inner,
    run_protocol,
    target_state,
)
from cqit.state import Polarization, SpinState, make_initial, norm2

H = 2 ** -0.5
M_GRID = (1, 2, 3, 4, 5, 10, 30)
N_GRID = (1, 2, 3, 4, 5, 50, 300, 2000)
RNG_SEED = 20240611


def random_spin(rng):
    a = rng.normal(size=2) + 1j * rng.normal(size=2)
    a /= np.linalg.norm(a)
    return SpinState(complex(a[0]), complex(a[1]))


# -- 1. recursion anchor -----------------------------------------------------------


@pytest.mark.parametrize("name,want", [("x", 0.0059), ("y", 0.9994), ("z", 0.9905)])
def test_c1_recursion_anchor(criterion, name, want):
    got = round(getattr(recursion_run(30, 2000)[-1], name), 4)
    ok = criterion(f"C1 recursion anchor {name}", got == want, f"{name}={got:.4f}, expected {want}")
    assert ok


def test_c1_recursion_runtime(criterion):
    recursion_run(30, 2000)
    times = []
    for _ in range(5):
        t0 = time.perf_counter()
        recursion_run(30, 2000)
        times.append(time.perf_counter() - t0)
    t = sorted(times)[2]
    assert criterion("C1 recursion runtime", t < 0.010, f"median {t * 1e3:.3f} ms < 10 ms")


# -- 2. oracle equivalence -----------------------------------------------------------


def _grid_gap(s):
    spin = SpinState(H, H)
    worst, where = 0.0, None
    for M in M_GRID:
        for N in N_GRID:
            hist = run_protocol(ProtocolConfig(M, N, s, s, spin)).history
            ref = recursion_run(M, N, s, s)
            assert len(hist) == len(ref) == M
            for m, (state, r) in enumerate(zip(hist, ref), start=1):
                got = readout(state, spin)
                gap = max(abs(got.x - r.x), abs(got.y - r.y), abs(got.z - r.z))
                if not gap <= worst:
                    worst, where = gap, (M, N, m)
    return worst, where


@pytest.mark.parametrize("s", [0, 1, 2])
def test_c2_oracle_equivalence(criterion, s):
    gap, (M, N, m) = _grid_gap(float(s))
    ok = criterion(f"C2 oracle equivalence s={s}", gap <= 1e-12,
                   f"max |state - recursion| = {gap:.2e} (at M={M}, N={N}, m={m}), tol 1e-12")
    assert ok


def test_c2_runtime(criterion):
    t0 = time.perf_counter()
    for s in (0.0, 1.0, 2.0):
        _grid_gap(s)
    t = time.perf_counter() - t0
    assert criterion("C2 oracle equivalence runtime", t < 30, f"{t:.2f} s < 30 s")


# -- 3. inner closed form ---------------------------------------------------------------


@pytest.mark.parametrize("N", [1, 2, 10, 300, 2000])
def test_c3_inner_closed_form(criterion, N):
    rng = np.random.default_rng(RNG_SEED + N)
    worst = 0.0
    for _ in range(5):
        spin = random_spin(rng)
        out = run_inner(make_initial(Polarization.L, spin), N, math.pi / (2 * N), IdealCavity())
        want = abs(spin.alpha) ** 2 * math.cos(math.pi / (2 * N)) ** (2 * N) + abs(spin.beta) ** 2
        worst = max(worst, abs(norm2(out) - want))
    assert criterion(f"C3 inner closed form N={N}", worst <= 1e-12, f"max error {worst:.2e}, tol 1e-12")


# -- 4. conservation -----------------------------------------------------------------


def test_c4_conservation(criterion):
    rng = np.random.default_rng(RNG_SEED)
    worst, cycles, configs = 0.0, 0, []
    for _ in range(3):
        M = int(rng.integers(1, 101))
        N = int(rng.integers(1, 10 ** 5 // M + 1))
        s1, s2 = (float(v) for v in rng.uniform(0, 3, size=2))
        configs.append((M, N))
        count = 0

        def watch(parked, inner):
            nonlocal worst, count
            count += 1
            worst = max(worst, abs(norm2(parked) + inner.total - 1))

        res = run_protocol(ProtocolConfig(M, N, s1, s2, random_spin(rng)), on_cycle=watch)
        assert count == M * N
        cycles += count
        worst = max(worst, abs(res.success_prob + res.d1 + res.d2 - 1))
    ok = criterion("C4 conservation", worst <= 1e-12,
                   f"max drift {worst:.2e} over {cycles} cycles, configs (M, N) = {configs}")
    assert ok


# -- 5. realistic anchor ----------------------------------------------------------------

REALISTIC_ANCHOR = 0.634946520034641


def test_c5_realistic_anchor(criterion):
    p = realistic_success_probability(300, CavityParams(g=3.0, kappa_s=0.01, gamma=0.1))
    ok1 = criterion("C5 realistic anchor 0.63 +- 0.05", abs(p - 0.63) <= 0.05, f"P = {p:.9f}")
    ok2 = criterion("C5 realistic regression +- 1e-9", abs(p - REALISTIC_ANCHOR) <= 1e-9,
                    f"P = {p:.12f}, frozen {REALISTIC_ANCHOR:.12f}")
    assert ok1 and ok2


# -- 6. fidelity trend ----------------------------------------------------------------------


@pytest.mark.parametrize("M,N", [(15, 500), (30, 2000)])
def test_c6_fidelity_trend(criterion, M, N):
    vals = [average_fidelity(M, N, s).avg_fidelity for s in (0, 2, 4, 6, 8, 10)]
    ok = abs(vals[0] - 1) <= 1e-12 and all(b < a for a, b in zip(vals, vals[1:]))
    shown = ", ".join(f"{v:.6f}" for v in vals)
    assert criterion(f"C6 fidelity trend M={M} N={N}", ok, f"F(s=0,2,..,10) = {shown}")


# -- 7. cavity coefficient limits -------------------------------------------------------------


def test_c7_cavity_limits(criterion):
    rng = np.random.default_rng(RNG_SEED)
    worst_g0 = 0.0
    for _ in range(50):
        ks, gam, det = rng.uniform(0, 1), rng.uniform(1e-3, 2), rng.uniform(-5, 5)
        c = coefficients(CavityParams(g=0.0, kappa_s=ks, gamma=gam, detuning=det))
        worst_g0 = max(worst_g0, abs(c.r - c.r0), abs(c.t - c.t0))
    c = coefficients(CavityParams(g=3.0, kappa_s=0.0, gamma=0.1))
    closure = abs(abs(c.r0) ** 2 + abs(c.t0) ** 2 - 1)
    ok1 = criterion("C7 g=0 reduces to empty cavity", worst_g0 <= 1e-15, f"max gap {worst_g0:.1e}, tol 1e-15")
    ok2 = criterion("C7 empty-cavity closure", closure <= 1e-12, f"| |r0|^2 + |t0|^2 - 1 | = {closure:.1e}")
    ok3 = criterion("C7 lossless resonance values", c.t0 == -1 and c.r0 == 0, f"t0={c.t0}, r0={c.r0}")
    assert ok1 and ok2 and ok3


# -- 8. transfer completion ---------------------------------------------------------------------


def test_c8_transfer_completion(criterion):
    rng = np.random.default_rng(RNG_SEED)
    worst = 0.0
    for _ in range(20):
        spin = random_spin(rng)
        outs = complete_transfer(target_state(spin))
        want = np.array([spin.alpha, spin.beta])
        assert len(outs) == 2
        for o in outs:
            worst = max(worst, abs(o.probability - 0.5), abs(abs(np.vdot(want, o.corrected_photon)) - 1))
    assert criterion("C8 transfer completion", worst <= 1e-12, f"max error {worst:.1e} over 20 inputs, tol 1e-12")


# -- 9. CLI determinism ----------------------------------------------------------------------------

SWEEP_SPEC = """\
target = single
grid.M = 1 9 5
grid.s = 0 2 5
N = 60
"""


def test_c9_cli_determinism(criterion, tmp_path):
    spec = tmp_path / "det.spec"
    spec.write_text(SWEEP_SPEC)
    outputs = []
    for i, jobs in enumerate(["1", "1", "1", "8"]):
        out = tmp_path / f"run{i}.csv"
        proc = subprocess.run([sys.executable, "-m", "cqit", "sweep", str(spec), "--out", str(out), "--jobs", jobs],
                              capture_output=True)
        assert proc.returncode == 0, proc.stderr
        outputs.append(out.read_bytes())
    runs_same = len(set(outputs[:3])) == 1
    jobs_same = outputs[0] == outputs[3]
    ok1 = criterion("C9 sweep identical across 3 runs", runs_same, f"{len(outputs[0])} bytes each")
    ok2 = criterion("C9 sweep identical for --jobs 1 and 8", jobs_same, f"{len(outputs[3])} bytes")
    assert ok1 and ok2


# -- verify runtime -----------------------------------------------------------------------------------


def test_verify_runtime(criterion):
    t0 = time.perf_counter()
    proc = subprocess.run([sys.executable, "-m", "cqit", "verify"], capture_output=True, text=True)
    t = time.perf_counter() - t0
    ok = criterion("verify completes under 60 s", proc.returncode == 0 and t < 60,
                   f"exit {proc.returncode} in {t:.1f} s")
    assert ok, proc.stdout
