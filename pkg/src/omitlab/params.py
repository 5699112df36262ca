"""Physical parameters of the two-resonator optomechanical system.

All rate-like quantities (loss rates, coupling, detunings, mechanical
frequency and damping) are stored in s^-1.  Configuration documents give
them in units of 1e6 s^-1, so the MHz numbers quoted for the device map
one-to-one onto stored values (``gamma1: 6.43`` -> 6.43e6 s^-1).
"""

from __future__ import annotations

import dataclasses
import math
import re
from dataclasses import dataclass, field
from typing import Any, Mapping

import yaml

from .errors import ConfigError

HBAR = 1.0545718e-34
TWO_PI = 2.0 * math.pi

#: Rates in configuration documents are multiplied by this.
RATE_UNIT = 1e6

#: Probe amplitude relative to the pump when ``P_in`` is not given.
DEFAULT_PROBE_RATIO = 0.05

CARRIER_CONVENTIONS = ("ordinary", "angular")
_CARRIER_FREQ = 193e12

RATE_KEYS = ("gamma1", "gamma2", "gamma_tip", "J", "omega_c", "omega_m", "Gamma_m", "Delta_L")
SI_KEYS = ("m", "R", "g", "P_L", "P_in")


@dataclass(frozen=True)
class SystemConfig:
    """Constants and rates of the compound system, SI units throughout.

    ``g`` left as ``None`` means the coupling is derived as ``omega_c / R``;
    ``Delta_L`` left as ``None`` pins the pump to the red sideband
    (``Delta_L = omega_m``); ``P_in`` left as ``None`` sets the probe field to
    ``DEFAULT_PROBE_RATIO`` times the pump field.

    ``carrier`` records how the 193 THz optical frequency was read:
    ``"ordinary"`` uses 193e12 s^-1 as is, ``"angular"`` uses 2*pi*193e12.
    It only matters for the default ``omega_c``.
    """

    gamma1: float = 6.43e6
    gamma2: float = 6.43e6
    gamma_tip: float = 0.0
    J: float = 12.86e6
    omega_c: float = _CARRIER_FREQ
    omega_m: float = TWO_PI * 23.4e6
    m: float = 5e-11
    Gamma_m: float = 0.24e6
    R: float = 34.5e-6
    g: float | None = None
    P_L: float = 1e-3
    P_in: float | None = None
    Delta_L: float | None = None
    carrier: str = "ordinary"
    hbar: float = field(default=HBAR, repr=False)

    def __post_init__(self):
        positive = ("gamma1", "gamma2", "omega_c", "omega_m", "m", "Gamma_m", "R")
        for name in positive:
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value)):
                raise ConfigError(f"{name} must be a finite number, got {value!r}", name)
            if value <= 0:
                raise ConfigError(f"{name} must be > 0, got {value!r}", name)
        for name in ("gamma_tip", "J", "P_L", "P_in", "g"):
            value = getattr(self, name)
            if value is None:
                continue
            if not (isinstance(value, (int, float)) and math.isfinite(value)):
                raise ConfigError(f"{name} must be a finite number, got {value!r}", name)
            if value < 0:
                raise ConfigError(f"{name} must be >= 0, got {value!r}", name)
        if self.Delta_L is not None and not math.isfinite(self.Delta_L):
            raise ConfigError(f"Delta_L must be finite, got {self.Delta_L!r}", "Delta_L")
        if self.carrier not in CARRIER_CONVENTIONS:
            raise ConfigError(
                f"carrier must be one of {CARRIER_CONVENTIONS}, got {self.carrier!r}", "carrier"
            )
        if self.hbar != HBAR:
            raise ConfigError("hbar is fixed and cannot be overridden", "hbar")

    @property
    def coupling(self) -> float:
        """Optomechanical coupling g in s^-1 m^-1."""
        return self.omega_c / self.R if self.g is None else self.g

    @property
    def pump_detuning(self) -> float:
        return self.omega_m if self.Delta_L is None else self.Delta_L

    @property
    def gamma_c(self) -> float:
        return self.gamma1

    @property
    def gamma2_total(self) -> float:
        return self.gamma2 + self.gamma_tip

    def replace(self, **changes) -> "SystemConfig":
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class ProbeSetting:
    """Probe frequency expressed both relative to the pump and to the cavity."""

    epsilon: float
    Delta_P: float

    @classmethod
    def from_epsilon(cls, cfg: SystemConfig, epsilon: float) -> "ProbeSetting":
        return cls(epsilon=epsilon, Delta_P=epsilon - cfg.pump_detuning)

    @classmethod
    def from_detuning(cls, cfg: SystemConfig, Delta_P: float) -> "ProbeSetting":
        epsilon = Delta_P + cfg.pump_detuning
        return cls(epsilon=epsilon, Delta_P=epsilon - cfg.pump_detuning)


def figure3_config(**changes) -> SystemConfig:
    """Device parameters of the OMIT figures, with optional overrides."""
    return SystemConfig(**changes)


def drive_amplitudes(cfg: SystemConfig) -> tuple[float, float]:
    """Pump and probe field amplitudes ``(eps_L, eps_P)`` in s^-1 (times sqrt photons).

    Both laser frequencies are replaced by ``omega_c``; the offsets are
    below 1e-6 of the carrier.
    """
    eps_L = math.sqrt(2.0 * cfg.gamma_c * cfg.P_L / (cfg.hbar * cfg.omega_c))
    if cfg.P_in is None:
        eps_P = DEFAULT_PROBE_RATIO * eps_L
    else:
        eps_P = math.sqrt(2.0 * cfg.gamma_c * cfg.P_in / (cfg.hbar * cfg.omega_c))
    return eps_L, eps_P


def probe_power_for_ratio(cfg: SystemConfig, ratio: float) -> float:
    """Probe power giving ``eps_P = ratio * eps_L``."""
    return ratio * ratio * cfg.P_L


# ---------------------------------------------------------------------------
# configuration documents

_ANGULAR_RE = re.compile(r"^\s*2\s*pi\s*\*?\s*(.+)$", re.IGNORECASE)


def _to_float(key, raw):
    if isinstance(raw, bool):
        raise ConfigError(f"{key}: expected a number, got {raw!r}", key)
    if isinstance(raw, (int, float)):
        return float(raw)
    if isinstance(raw, str):
        try:
            return float(raw)
        except ValueError:
            pass
    raise ConfigError(f"{key}: expected a number, got {raw!r}", key)


def parse_rate(key, raw):
    if raw is None:
        return None
    if isinstance(raw, Mapping):
        unknown = set(raw) - {"value", "angular", "unit"}
        if unknown or "value" not in raw:
            raise ConfigError(f"{key}: rate mapping needs 'value' and optional 'angular'/'unit'", key)
        value = _to_float(key, raw["value"])
        angular = raw.get("angular", 1)
        if isinstance(angular, str) and angular.replace(" ", "").lower() == "2pi":
            value *= TWO_PI
        elif angular not in (1, 1.0, None):
            raise ConfigError(f"{key}: angular marker must be '2pi' or 1, got {angular!r}", key)
        unit = str(raw.get("unit", "1e6/s")).replace(" ", "")
        if unit in ("1e6/s", "MHz"):
            return value * RATE_UNIT
        if unit in ("1/s", "si"):
            return value
        raise ConfigError(f"{key}: unknown unit {unit!r}", key)
    if isinstance(raw, str):
        match = _ANGULAR_RE.match(raw)
        if match:
            return TWO_PI * _to_float(key, match.group(1)) * RATE_UNIT
    return _to_float(key, raw) * RATE_UNIT


def parse_value(key: str, raw: Any):
    """Convert one document value into the stored SI value for ``key``."""
    if key == "carrier":
        if raw not in CARRIER_CONVENTIONS:
            raise ConfigError(f"carrier must be one of {CARRIER_CONVENTIONS}, got {raw!r}", key)
        return raw
    if key == "hbar":
        raise ConfigError("hbar is fixed and cannot be overridden", key)
    if key in RATE_KEYS:
        return parse_rate(key, raw)
    if key in SI_KEYS:
        return None if raw is None else _to_float(key, raw)
    raise ConfigError(f"unknown configuration key {key!r}", key)


def config_from_mapping(values: Mapping[str, Any], base: SystemConfig | None = None) -> SystemConfig:
    parsed = {key: parse_value(key, raw) for key, raw in values.items()}
    if base is None:
        carrier = parsed.get("carrier", "ordinary")
        if "omega_c" not in parsed and carrier == "angular":
            parsed["omega_c"] = TWO_PI * _CARRIER_FREQ
        return SystemConfig(**parsed)
    return base.replace(**parsed)


def load_config(text: str) -> SystemConfig:
    """Parse a flat key-value (YAML) document into a validated config.

    Missing keys take the device defaults.  Rates are read in units of
    1e6 s^-1 and may carry a ``2pi`` marker (``omega_m: 2pi*23.4`` or
    ``omega_m: {value: 23.4, angular: 2pi}``).
    """
    try:
        data = yaml.safe_load(text) if text.strip() else {}
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse configuration: {exc}") from exc
    if data is None:
        data = {}
    if not isinstance(data, Mapping):
        raise ConfigError("configuration must be a flat key-value mapping")
    return config_from_mapping(data)


def parse_assignment(text: str) -> tuple[str, Any]:
    """Split a ``key=value`` override as given on the command line."""
    if "=" not in text:
        raise ConfigError(f"override {text!r} is not of the form key=value")
    key, raw = text.split("=", 1)
    key = key.strip()
    try:
        value = yaml.safe_load(raw)
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse override {text!r}: {exc}", key) from exc
    return key, value


def _dump_rate(value: float):
    scaled = value / RATE_UNIT
    if float(repr(scaled)) * RATE_UNIT == value:
        return scaled
    return {"value": value, "unit": "1/s"}


def config_to_mapping(cfg: SystemConfig) -> dict[str, Any]:
    out: dict[str, Any] = {}
    for f in dataclasses.fields(cfg):
        if f.name == "hbar":
            continue
        value = getattr(cfg, f.name)
        if value is None:
            continue
        out[f.name] = _dump_rate(value) if f.name in RATE_KEYS else value
    return out


def dump_config(cfg: SystemConfig) -> str:
    """Serialize ``cfg`` so that ``load_config`` returns an identical value."""
    return yaml.safe_dump(config_to_mapping(cfg), sort_keys=False)


def config_to_si_dict(cfg: SystemConfig) -> dict[str, Any]:
    """Plain SI mapping, used for provenance hashing and JSON output."""
    return {f.name: getattr(cfg, f.name) for f in dataclasses.fields(cfg) if f.name != "hbar"}
