"""Run configuration: flat key=value files plus command-line overrides."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field, fields

MODES = ("operator_test", "homogeneous", "ap", "imex_reference", "limit",
         "eps_sweep", "dt_refinement", "selftest")
ICS = ("IC1", "IC2", "gaussian_v", "custom_file")

#: fields that must be given explicitly for each mode (beyond defaults)
REQUIRED = {
    "operator_test": (),
    "homogeneous": ("s",),
    "ap": ("s", "eps", "dt", "T"),
    "imex_reference": ("s", "dt", "T"),
    "limit": ("s", "dt", "T"),
    "eps_sweep": ("s", "dt", "T"),
    "dt_refinement": ("s", "eps"),
    "selftest": (),
}


class ConfigError(ValueError):
    """Invalid or missing configuration value; message names the key."""


@dataclass
class RunConfig:
    mode: str
    s: float | None = None
    eps: float | None = None
    gamma: float = 1.0
    N_v: int = 128
    N_x: int = 100
    L_v: float = 3.0
    L_x: float = math.pi
    l_lim: int = 300
    dt: float | None = None
    T: float | None = None
    ic: str = "IC1"
    ic_file: str | None = None
    delta: float = 1e-6
    output_dir: str = "out"
    cache_dir: str | None = None
    eps_list: tuple = (1e-1, 1e-2, 1e-3, 1e-5)
    dt_list: tuple = (0.025, 0.0125, 0.00625, 0.003125, 0.0015625)

    def validate(self) -> "RunConfig":
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        for key in REQUIRED[self.mode]:
            if getattr(self, key) is None:
                raise ConfigError(f"mode={self.mode} requires the field {key!r}")
        if self.s is not None and not 0.0 < self.s < 1.0:
            raise ConfigError("s must lie in (0,1)")
        if self.eps is not None and not self.eps > 0:
            raise ConfigError("eps must be positive")
        if not self.gamma >= 0:
            raise ConfigError("gamma must be nonnegative")
        for key in ("N_v", "N_x"):
            val = getattr(self, key)
            if val < 2 or val % 2 != 0:
                raise ConfigError(f"{key} must be an even integer >= 2, got {val}")
        for key in ("L_v", "L_x"):
            if not getattr(self, key) > 0:
                raise ConfigError(f"{key} must be positive")
        if self.l_lim < 1:
            raise ConfigError("l_lim must be a positive integer")
        if self.dt is not None and not self.dt > 0:
            raise ConfigError("dt must be positive")
        if self.T is not None and not self.T > 0:
            raise ConfigError("T must be positive")
        if self.ic not in ICS:
            raise ConfigError(f"ic must be one of {ICS}, got {self.ic!r}")
        if self.ic == "custom_file" and not self.ic_file:
            raise ConfigError("ic=custom_file requires the field 'ic_file'")
        if not self.delta > 0:
            raise ConfigError("delta must be positive")
        if any(e <= 0 for e in self.eps_list):
            raise ConfigError("eps_list entries must be positive")
        if any(d <= 0 for d in self.dt_list):
            raise ConfigError("dt_list entries must be positive")
        return self


_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}
_INT_KEYS = {"N_v", "N_x", "l_lim"}
_FLOAT_KEYS = {"s", "eps", "gamma", "L_v", "L_x", "dt", "T", "delta"}
_LIST_KEYS = {"eps_list", "dt_list"}
_STR_KEYS = {"mode", "ic", "ic_file", "output_dir", "cache_dir"}


def _convert(key: str, raw: str):
    if key in _INT_KEYS:
        return int(raw)
    if key in _FLOAT_KEYS:
        return float(raw)
    if key in _LIST_KEYS:
        return tuple(float(x) for x in raw.replace(",", " ").split())
    return raw


def parse_config_file(path: str) -> dict:
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            k, v = (part.strip() for part in line.split("=", 1))
            out[k] = v
    return out


def build_config(mode: str, file_values: dict | None = None,
                 overrides: dict | None = None) -> RunConfig:
    """Merge defaults, config-file values, and overrides into a RunConfig."""
    merged: dict = {"mode": mode}
    for source in (file_values or {}, overrides or {}):
        for key, raw in source.items():
            if raw is None:
                continue
            if key == "mode":
                merged["mode"] = raw if isinstance(raw, str) else str(raw)
                continue
            if key not in _FIELD_TYPES:
                raise ConfigError(f"unknown configuration key {key!r}")
            merged[key] = _convert(key, raw) if isinstance(raw, str) else raw
    try:
        cfg = RunConfig(**merged)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg.validate()
