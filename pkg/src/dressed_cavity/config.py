"""Run configuration: flat ``key = value`` files, named presets and overrides.

Example file::

    # 1 micron cavity, room temperature
    omega_bar     = 4.0e14
    radius_m      = 1e-6
    temperature_K = 300
    temperatures  = 0, 1e2, 1e3, 1e4, 1e5
    radii         = 1e-8:1e-6:50       # start:stop:count, inclusive

Unknown keys are rejected so that typos surface immediately.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from .dynamics import DEFAULT_K, DEFAULT_L, DEFAULT_N_POINTS, DEFAULT_T_MAX_FACTOR
from .errors import ConfigError
from .spectrum import METHODS
from .units import CavityScenario, build_scenario

__all__ = ["RunConfig", "PRESETS", "parse_config_text", "load_config", "resolve_config"]

ELEMENT_KINDS = ("approximate", "exact")


def _float_list(text: str) -> tuple[float, ...]:
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError("range must be start:stop:count")
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        if count < 1:
            raise ValueError("range count must be >= 1")
        return tuple(float(v) for v in np.linspace(start, stop, count))
    items = [p.strip() for p in text.split(",") if p.strip()]
    if not items:
        raise ValueError("empty list")
    return tuple(float(p) for p in items)


def _optional_float(text: str):
    text = text.strip()
    return None if text.lower() in ("", "none", "default") else float(text)


def _choice(options):
    def parse(text: str) -> str:
        text = text.strip()
        if text not in options:
            raise ValueError(f"expected one of {', '.join(options)}")
        return text

    return parse


# key -> parser
_PARSERS = {
    "omega_bar": float,
    "radius_m": float,
    "temperature_K": float,
    "coupling_g": _optional_float,
    "n0_initial": float,
    "K": int,
    "L": int,
    "t_max_factor": float,
    "n_points": int,
    "method": _choice(METHODS),
    "elements": _choice(ELEMENT_KINDS),
    "temperatures": _float_list,
    "radii": _float_list,
    "regime_margin": float,
}

REQUIRED = ("omega_bar", "radius_m")

PRESETS: dict[str, dict[str, str]] = {
    "fig2": {"omega_bar": "4.0e14", "radius_m": "1e-6", "temperature_K": "300"},
    "fig3": {"omega_bar": "4.0e14", "radius_m": "1e-6", "temperature_K": "1e5"},
    "fig4": {"omega_bar": "4.0e14", "radius_m": "1e-6", "temperatures": "0:100000:101"},
}


@dataclass(frozen=True)
class RunConfig:
    omega_bar: float
    radius_m: float
    temperature_K: float = 0.0
    coupling_g: float | None = None
    n0_initial: float = 1.0
    K: int = DEFAULT_K
    L: int = DEFAULT_L
    t_max_factor: float = DEFAULT_T_MAX_FACTOR
    n_points: int = DEFAULT_N_POINTS
    method: str = "hybrid"
    elements: str = "approximate"
    temperatures: tuple[float, ...] | None = None
    radii: tuple[float, ...] | None = None
    regime_margin: float = 10.0

    def scenario(self, radius_m: float | None = None, temperature_K: float | None = None) -> CavityScenario:
        return build_scenario(
            self.omega_bar,
            self.radius_m if radius_m is None else radius_m,
            self.temperature_K if temperature_K is None else temperature_K,
            g=self.coupling_g,
            n0_initial=self.n0_initial,
        )

    @property
    def temperature_list(self) -> tuple[float, ...]:
        return self.temperatures if self.temperatures is not None else (self.temperature_K,)

    @property
    def radius_list(self) -> tuple[float, ...]:
        return self.radii if self.radii is not None else (self.radius_m,)

    def provenance(self) -> str:
        """``key=value`` pairs for every field, defaults included, in a fixed order."""
        parts = []
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, tuple):
                value = ",".join(repr(v) for v in value)
            else:
                value = repr(value) if not isinstance(value, str) else value
            parts.append(f"{f.name}={value}")
        return " ".join(parts)


def parse_config_text(text: str, source: str = "<config>") -> dict[str, str]:
    """Split a config file into raw ``{key: value}`` strings.

    Raises :class:`ConfigError` with the offending line number for malformed
    lines, duplicate keys and unknown keys.
    """
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {line.strip()!r}")
        key, value = (part.strip() for part in stripped.split("=", 1))
        if key not in _PARSERS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in raw:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        raw[key] = value
    return raw


def load_config(path: str | Path) -> dict[str, str]:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config_text(text, str(path))


def _parse_override(item: str) -> tuple[str, str]:
    if "=" not in item:
        raise ConfigError(f"--set expects key=value, got {item!r}")
    key, value = (p.strip() for p in item.split("=", 1))
    if key not in _PARSERS:
        raise ConfigError(f"--set: unknown key {key!r}")
    return key, value


def resolve_config(
    preset: str | None = None,
    config_path: str | Path | None = None,
    overrides: list[str] | None = None,
) -> RunConfig:
    """Merge preset, then config file, then ``key=value`` overrides."""
    raw: dict[str, str] = {}
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r}; choose from {', '.join(PRESETS)}")
        raw.update(PRESETS[preset])
    if config_path is not None:
        raw.update(load_config(config_path))
    for item in overrides or ():
        key, value = _parse_override(item)
        raw[key] = value

    missing = [k for k in REQUIRED if k not in raw]
    if missing:
        raise ConfigError(f"missing required key(s): {', '.join(missing)}")

    values = {}
    for key, text in raw.items():
        try:
            values[key] = _PARSERS[key](text)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key!r}: {text!r} ({exc})") from exc
    for key in ("K", "L", "n_points"):
        if key in values and values[key] < 1:
            raise ConfigError(f"{key} must be >= 1, got {values[key]}")
    for key, value in values.items():
        if isinstance(value, float) and not math.isfinite(value):
            raise ConfigError(f"{key} must be finite, got {value}")
    return RunConfig(**values)
