"""Grid sweeps behind the recursion, fidelity and lossy-cavity curves.

A sweep spec is a flat ``key = value`` file::

    target = fig6
    grid.kappa_s = 0 0.2 21
    grid.g = 0 5 11 linear
    gamma = 0.1
    N = 300

Grid axes iterate in the order they are declared, the first axis
slowest. Output is CSV with 9 significant digits.
"""

from __future__ import annotations

import csv
import io
import itertools
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .analysis import average_fidelity, realistic_success_probability
from .cavity import CavityParams
from .config import PARAM_TYPES, ConfigError, apply_s_alias, build_config, parse_lines, parse_value
from .interferometer import readout, recursion_run, run_protocol

__all__ = [
    "TARGETS",
    "Grid",
    "SweepSpec",
    "parse_sweep",
    "evaluate_point",
    "run_sweep",
    "render_csv",
    "write_atomic",
    "format_number",
    "max_workers",
]

_SQ = 2 ** -0.5

WORKER_CAP_ENV = "CQIT_MAX_WORKERS"


@dataclass(frozen=True)
class Target:
    defaults: dict
    outputs: tuple


TARGETS = {
    "fig4": Target({"M": 30, "N": 2000, "s1": 0.0, "s2": 0.0}, ("x", "y", "z")),
    "fig5": Target(
        {"M": 30, "N": 2000, "s1": 0.0, "s2": 0.0, "quad_points": 256},
        ("avg_fidelity", "quad_points_used"),
    ),
    "fig6": Target(
        {
            "N": 300,
            "g": 3.0,
            "kappa_s": 0.01,
            "gamma": 0.1,
            "detuning": 0.0,
            "alpha": _SQ,
            "beta": _SQ,
        },
        ("success_prob",),
    ),
    "single": Target(
        {
            "M": 30,
            "N": 2000,
            "s1": 0.0,
            "s2": 0.0,
            "alpha": _SQ,
            "beta": _SQ,
            "cavity": "ideal",
            "g": 3.0,
            "kappa_s": 0.0,
            "gamma": 0.1,
            "detuning": 0.0,
        },
        ("success_prob", "d1", "d2", "leaked", "target_fidelity", "x", "y", "z"),
    ),
}


@dataclass(frozen=True)
class Grid:
    name: str
    values: tuple

    @classmethod
    def parse(cls, name: str, raw: str, line: Optional[int] = None) -> "Grid":
        parts = raw.replace(",", " ").split()
        if len(parts) not in (3, 4):
            raise ConfigError(f"grid.{name} needs 'start stop count [linear|log]'", line)
        scale = parts[3].lower() if len(parts) == 4 else "linear"
        if scale not in ("linear", "log"):
            raise ConfigError(f"grid.{name}: scale must be linear or log, got {parts[3]!r}", line)
        try:
            start, stop = float(parts[0]), float(parts[1])
            count = int(parts[2])
        except ValueError:
            raise ConfigError(f"grid.{name}: bad numbers in {raw!r}", line) from None
        if count < 2:
            raise ConfigError(f"grid.{name}: swept axes need at least 2 points, got {count}", line)
        if scale == "log":
            if start <= 0 or stop <= 0:
                raise ConfigError(f"grid.{name}: log grid needs positive bounds", line)
            pts = np.geomspace(start, stop, count)
        else:
            pts = np.linspace(start, stop, count)
        kind = PARAM_TYPES[name]
        if kind is int:
            values = tuple(int(round(v)) for v in pts)
            if len(set(values)) != len(values):
                raise ConfigError(f"grid.{name}: integer rounding produced repeated points", line)
        else:
            values = tuple(float(v) for v in pts)
        return cls(name, values)


@dataclass
class SweepSpec:
    target: str
    axes: list = field(default_factory=list)
    fixed: dict = field(default_factory=dict)
    out: Optional[str] = None

    def points(self):
        names = [g.name for g in self.axes]
        for combo in itertools.product(*(g.values for g in self.axes)):
            yield dict(zip(names, combo))

    @property
    def header(self) -> list:
        return [g.name for g in self.axes] + list(TARGETS[self.target].outputs)


def parse_sweep(text: str) -> SweepSpec:
    entries = parse_lines(text)
    target = None
    for lineno, key, raw in entries:
        if key == "target":
            target = raw.lower()
            if target not in TARGETS:
                raise ConfigError(f"unknown target {raw!r} (choose from {', '.join(TARGETS)})", lineno)
    if target is None:
        raise ConfigError("missing 'target'")
    allowed = set(TARGETS[target].defaults)
    if {"s1", "s2"} <= allowed:
        allowed.add("s")
    spec = SweepSpec(target)
    used = {}
    for lineno, key, raw in entries:
        if key == "target":
            continue
        if key == "out":
            spec.out = raw
            continue
        name = key[len("grid."):] if key.startswith("grid.") else key
        if name not in allowed:
            raise ConfigError(f"unknown key {key!r} for target {target}", lineno)
        if name in used:
            raise ConfigError(f"{name!r} given twice (first on line {used[name]})", lineno)
        used[name] = lineno
        if key.startswith("grid."):
            spec.axes.append(Grid.parse(name, raw, lineno))
        else:
            spec.fixed[name] = parse_value(name, raw, lineno)
    if "s" in used and ("s1" in used or "s2" in used):
        raise ConfigError("give either 's' or 's1'/'s2', not both")
    if not spec.axes:
        raise ConfigError("a sweep needs at least one grid.<name> axis")
    return spec


def evaluate_point(target: str, params: dict, phase_faithful: bool = False,
                   unnormalized_fidelity: bool = False) -> tuple:
    p = dict(TARGETS[target].defaults)
    p.update(apply_s_alias(params))
    if target == "fig4":
        pt = recursion_run(p["M"], p["N"], p["s1"], p["s2"])[-1]
        return (pt.x, pt.y, pt.z)
    if target == "fig5":
        rep = average_fidelity(p["M"], p["N"], p["s1"], p["s2"], quad_points=p["quad_points"],
                               normalized=not unnormalized_fidelity)
        return (rep.avg_fidelity, rep.quad_points)
    if target == "fig6":
        params_ = CavityParams(g=p["g"], kappa_s=p["kappa_s"], gamma=p["gamma"], detuning=p["detuning"])
        return (realistic_success_probability(p["N"], params_, p["alpha"], p["beta"], phase_faithful),)
    config = build_config(p, phase_faithful)
    res = run_protocol(config)
    pt = readout(res.final, config.spin)
    return (res.success_prob, res.d1, res.d2, res.leaked, res.target_fidelity, pt.x, pt.y, pt.z)


def _evaluate_star(args):
    return evaluate_point(*args)


def max_workers(requested: int) -> int:
    cap = os.environ.get(WORKER_CAP_ENV)
    n = max(1, requested)
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            pass
    return n


def run_sweep(spec: SweepSpec, jobs: int = 1, phase_faithful: bool = False,
              unnormalized_fidelity: bool = False) -> list:
    """Evaluate every grid point; rows come back in grid order whatever ``jobs`` is."""
    points = list(spec.points())
    fixed = dict(spec.fixed)
    tasks = [(spec.target, {**fixed, **pt}, phase_faithful, unnormalized_fidelity) for pt in points]
    workers = min(max_workers(jobs), len(tasks))
    if workers <= 1:
        results = [_evaluate_star(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_evaluate_star, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    return [tuple(pt[g.name] for g in spec.axes) + tuple(res) for pt, res in zip(points, results)]


def format_number(v, digits: int = 9) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, complex):
        if v.imag != 0:
            return f"{format(v.real, f'.{digits}g')}{format(v.imag, f'+.{digits}g')}j"
        v = v.real
    return format(float(v), f".{digits}g")


def render_csv(header: list, rows: list) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_number(v) for v in row])
    return buf.getvalue()


def write_atomic(path: str, text: str) -> None:
    """Write via a temp file in the same directory, then rename into place."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".sweep-", suffix=".tmp", dir=directory)
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
