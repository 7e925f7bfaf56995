"""Vehicle configuration files (TOML).

Example::

    dry_mass = "595 g"
    specific_energy = "130 Wh/kg"
    flight_coeff_cT = 6.2e-3      # kg^1.5/W; or power_coeff_cp in W/N^1.5
    gravity = 9.81                # m/s^2, optional

    [rocket]
    exhaust_velocity = "250 m/s"

Quantities with units may be written as a string (``"595 g"``) or as an
inline table (``{ value = 595, unit = "g" }``).
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from typing import Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import DomainError, StagingError
from .model import STANDARD_GRAVITY, EnergySource, RocketParams, VehicleParams
from .units import UnitError, parse_quantity

KNOWN_KEYS = {"dry_mass", "specific_energy", "power_coeff_cp", "flight_coeff_cT", "gravity", "rocket"}
KNOWN_ROCKET_KEYS = {"exhaust_velocity"}


class ConfigError(StagingError):
    def __init__(self, key, message):
        self.key = key
        super().__init__(f"config key {key!r}: {message}")


@dataclass(frozen=True)
class VehicleConfig:
    source: EnergySource
    vehicle: VehicleParams
    rocket: Optional[RocketParams] = None


def _quantity(doc, key, dimension, prefix=""):
    full = prefix + key
    if key not in doc:
        raise ConfigError(full, "missing")
    raw = doc[key]
    if isinstance(raw, dict):
        if set(raw) != {"value", "unit"}:
            raise ConfigError(full, "table form needs exactly 'value' and 'unit'")
        raw = f"{raw['value']} {raw['unit']}"
    elif not isinstance(raw, str):
        raise ConfigError(full, f"needs a unit, e.g. \"{raw} ...\"")
    try:
        value = parse_quantity(raw, dimension)
    except UnitError as exc:
        raise ConfigError(full, str(exc)) from None
    if not (value > 0 and math.isfinite(value)):
        raise ConfigError(full, "must be strictly positive")
    return value


def _number(doc, key):
    raw = doc[key]
    if isinstance(raw, bool) or not isinstance(raw, (int, float)):
        raise ConfigError(key, f"expected a number, got {raw!r}")
    if not (raw > 0 and math.isfinite(raw)):
        raise ConfigError(key, "must be strictly positive")
    return float(raw)


def parse_config(doc) -> VehicleConfig:
    unknown = set(doc) - KNOWN_KEYS
    if unknown:
        raise ConfigError(sorted(unknown)[0], "unknown key")
    dry = _quantity(doc, "dry_mass", "mass")
    eb = _quantity(doc, "specific_energy", "specific_energy")
    gravity = _number(doc, "gravity") if "gravity" in doc else STANDARD_GRAVITY

    has_cp, has_ct = "power_coeff_cp" in doc, "flight_coeff_cT" in doc
    if not (has_cp or has_ct):
        raise ConfigError("power_coeff_cp", "one of power_coeff_cp or flight_coeff_cT is required")
    if has_cp:
        vehicle = VehicleParams(dry, _number(doc, "power_coeff_cp"), gravity)
        if has_ct:
            ct = _number(doc, "flight_coeff_cT")
            if abs(vehicle.flight_coeff - ct) > 1e-9 * ct:
                raise ConfigError("flight_coeff_cT", f"inconsistent with power_coeff_cp (implies {vehicle.flight_coeff!r})")
    else:
        vehicle = VehicleParams.from_flight_coeff(dry, _number(doc, "flight_coeff_cT"), gravity)

    rocket = None
    if "rocket" in doc:
        section = doc["rocket"]
        if not isinstance(section, dict):
            raise ConfigError("rocket", "must be a table")
        unknown = set(section) - KNOWN_ROCKET_KEYS
        if unknown:
            raise ConfigError("rocket." + sorted(unknown)[0], "unknown key")
        rocket = RocketParams(_quantity(section, "exhaust_velocity", "velocity", "rocket."), gravity)
    try:
        return VehicleConfig(EnergySource(eb), vehicle, rocket)
    except DomainError as exc:
        raise ConfigError("?", str(exc)) from None


def load_config(path) -> VehicleConfig:
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError("<file>", f"cannot read {path}: {exc.strerror}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError("<file>", f"malformed TOML in {path}: {exc}") from None
    return parse_config(doc)
