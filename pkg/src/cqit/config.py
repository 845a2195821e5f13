"""Flat ``key = value`` config files for single runs and sweeps."""

from __future__ import annotations

import math

from .cavity import CavityParams, IdealCavity, RealisticCavity
from .interferometer import ProtocolConfig
from .state import SpinState

__all__ = [
    "ConfigError",
    "parse_lines",
    "parse_value",
    "PARAM_TYPES",
    "SINGLE_DEFAULTS",
    "parse_single",
    "build_config",
]


class ConfigError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


PARAM_TYPES = {
    "M": int,
    "N": int,
    "s": float,
    "s1": float,
    "s2": float,
    "alpha": complex,
    "beta": complex,
    "cavity": str,
    "g": float,
    "kappa_s": float,
    "gamma": float,
    "detuning": float,
    "quad_points": int,
}

_SQ = 2 ** -0.5

SINGLE_DEFAULTS = {
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
}


def parse_lines(text: str) -> list[tuple[int, str, str]]:
    """Return ``(line_number, key, raw_value)`` triples; '#' starts a comment."""
    out = []
    seen = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {line!r}", lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError("empty key", lineno)
        if key in seen:
            raise ConfigError(f"duplicate key {key!r} (first on line {seen[key]})", lineno)
        seen[key] = lineno
        out.append((lineno, key, value))
    return out


def parse_value(key: str, raw: str, line: int | None = None):
    kind = PARAM_TYPES[key]
    try:
        if kind is int:
            f = float(raw)
            if not f.is_integer():
                raise ValueError
            return int(f)
        if kind is float:
            v = float(raw)
            if not math.isfinite(v):
                raise ValueError
            return v
        if kind is complex:
            v = complex(raw.replace(" ", ""))
            return v.real if v.imag == 0 else v
        value = raw.lower()
        if key == "cavity" and value not in ("ideal", "realistic"):
            raise ValueError
        return value
    except ValueError:
        raise ConfigError(f"bad value {raw!r} for {key!r}", line) from None


def apply_s_alias(params: dict) -> dict:
    params = dict(params)
    if "s" in params:
        params["s1"] = params["s2"] = params.pop("s")
    return params


def parse_single(text: str) -> dict:
    """Parse a single-run config into a parameter dict (defaults filled in)."""
    params = dict(SINGLE_DEFAULTS)
    given = {}
    for lineno, key, raw in parse_lines(text):
        if key not in SINGLE_DEFAULTS and key != "s":
            raise ConfigError(f"unknown key {key!r}", lineno)
        given[key] = parse_value(key, raw, lineno)
    if "s" in given and ("s1" in given or "s2" in given):
        raise ConfigError("give either 's' or 's1'/'s2', not both")
    params.update(apply_s_alias(given))
    return params


def build_config(params: dict, phase_faithful: bool = False) -> ProtocolConfig:
    """Turn a parameter dict into a ``ProtocolConfig``; raises ValueError on invariant violations."""
    if params["cavity"] == "realistic":
        cavity = RealisticCavity(
            CavityParams(
                g=params["g"],
                kappa_s=params["kappa_s"],
                gamma=params["gamma"],
                detuning=params["detuning"],
            ),
            phase_faithful,
        )
    else:
        cavity = IdealCavity()
    return ProtocolConfig(
        M=params["M"],
        N=params["N"],
        s1=params["s1"],
        s2=params["s2"],
        spin=SpinState(params["alpha"], params["beta"]),
        cavity=cavity,
    )
