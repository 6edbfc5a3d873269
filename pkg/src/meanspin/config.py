"""Flat key-value run configuration.

Grammar: one `key = value` pair per line, `#` starts a comment, blank lines
ignored.  Keys are dotted and must appear in the registry below (plus the
open `tol.*` family for per-check tolerance overrides).  Values are typed
and bounds-checked at parse time; unknown keys are rejected by name.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict

COMMANDS = ("verify-algebra", "verify-pt", "verify-fw", "simulate-dirac",
            "simulate-llg", "compare", "sweep")

FIELD_KIND_CHOICES = ("zero", "uniform_B", "uniform_E", "harmonic_B")


class ConfigError(ValueError):
    pass


def _even_int(key, raw):
    v = _int(key, raw)
    if v % 2 != 0 or v < 8:
        raise ConfigError(f"{key}: must be an even integer >= 8, got {raw}")
    return v


def _int(key, raw):
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{key}: expected integer, got {raw!r}") from None


def _float(key, raw):
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"{key}: expected number, got {raw!r}") from None


def _pos_float(key, raw):
    v = _float(key, raw)
    if v <= 0:
        raise ConfigError(f"{key}: must be positive, got {raw}")
    return v


def _nonneg_float(key, raw):
    v = _float(key, raw)
    if v < 0:
        raise ConfigError(f"{key}: must be non-negative, got {raw}")
    return v


def _nonzero_float(key, raw):
    v = _float(key, raw)
    if v == 0:
        raise ConfigError(f"{key}: must be nonzero")
    return v


def _kind(key, raw):
    if raw not in FIELD_KIND_CHOICES:
        raise ConfigError(f"{key}: must be one of {FIELD_KIND_CHOICES}, got {raw!r}")
    return raw


def _str(key, raw):
    return raw


def _mass_list(key, raw):
    try:
        vals = [float(tok) for tok in raw.split(",") if tok.strip()]
    except ValueError:
        raise ConfigError(f"{key}: expected comma-separated numbers") from None
    if len(vals) < 2 or any(v <= 0 for v in vals):
        raise ConfigError(f"{key}: need at least two positive masses")
    return vals


_REGISTRY = {
    "grid.n": (_even_int, 64),
    "grid.length": (_pos_float, 20.0),
    "physical.m": (_pos_float, 32.0),
    "physical.c": (_pos_float, 4.0),
    "physical.e": (_nonzero_float, -1.0),
    "field.kind": (_kind, "zero"),
    "field.B0": (_float, 1.0),
    "field.E0": (_float, 0.0),
    "field.omega": (_nonneg_float, 0.0),
    "run.t0": (_float, 0.0),
    "run.t1": (_float, 1.0),
    "run.dt": (_pos_float, 1e-3),
    "run.seed": (_int, 0),
    "run.store_every": (_int, 1),
    "output.dir": (_str, "meanspin_out"),
    "llg.alpha_g": (_nonneg_float, 0.0),
    "llg.chi_m": (_nonzero_float, 1.0),
    "llg.M_s": (_pos_float, 1.0),
    "llg.theta0": (_float, 1.5707963267948966),
    "llg.vx": (_float, 0.0),
    "llg.vy": (_float, 0.0),
    "llg.vz": (_float, 0.0),
    "sweep.masses": (_mass_list, [8.0, 16.0, 32.0, 64.0]),
    "spin.ux": (_float, 1.0),
    "spin.uy": (_float, 0.0),
    "spin.uz": (_float, 0.0),
}

# Default per-check tolerances, overridable through tol.<name> keys.
DEFAULT_TOLERANCES = {
    "clifford": 1e-13,
    "pt_conjugation": 1e-13,
    "pseudo_pt_residual": 1e-12,
    "free_meanspin_commutator": 1e-12,
    "order_slope_window": 0.3,
    "pt_norm_drift": 1e-8,
    "llg_norm_drift": 1e-12,
    "llg_frequency_rel": 1e-3,
    "closure_equivalence": 1e-9,
    "bridge_frequency_rel": 1e-2,
    "maxwell_faraday": 1e-10,
    "bracket_analytic": 1e-12,
    "bracket_fd": 1e-8,
}


@dataclass
class RunConfig:
    command: str = ""
    values: Dict = field(default_factory=dict)
    tolerances: Dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.values[key]

    def tol(self, name: str) -> float:
        return self.tolerances.get(name, DEFAULT_TOLERANCES[name])


def parse_config(text: str, command: str = "") -> RunConfig:
    if command and command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}; choose from {COMMANDS}")
    values = {k: default for k, (_, default) in _REGISTRY.items()}
    tolerances: Dict[str, float] = {}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {raw_line!r}")
        key, raw = (part.strip() for part in line.split("=", 1))
        if key.startswith("tol."):
            name = key[4:]
            if name not in DEFAULT_TOLERANCES:
                raise ConfigError(f"{key}: unknown tolerance name")
            tolerances[name] = _pos_float(key, raw)
            continue
        if key not in _REGISTRY:
            raise ConfigError(f"unknown key {key!r}")
        parser, _ = _REGISTRY[key]
        values[key] = parser(key, raw)
    cfg = RunConfig(command=command, values=values, tolerances=tolerances)
    if cfg["run.t1"] <= cfg["run.t0"]:
        raise ConfigError("run.t1: must exceed run.t0")
    return cfg
