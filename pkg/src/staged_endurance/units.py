"""Parsing and formatting of human-facing quantities.

Only explicit suffixes are accepted; a missing or unknown unit is an error.
"""

import re

from .errors import DomainError

UNITS = {
    "mass": {"g": 1e-3, "kg": 1.0},
    "specific_energy": {"Wh/kg": 3600.0, "J/kg": 1.0},
    "time": {"s": 1.0, "min": 60.0},
    "velocity": {"m/s": 1.0},
}

_QUANTITY = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([A-Za-z/]+)\s*$")


class UnitError(DomainError):
    pass


def parse_quantity(text, dimension):
    """Parse ``"190g"``, ``"22.8 min"``, ``"130 Wh/kg"`` ... into SI units."""
    table = UNITS[dimension]
    m = _QUANTITY.match(str(text))
    if not m:
        raise UnitError(f"cannot parse {text!r} as a {dimension.replace('_', ' ')} with a unit "
                        f"(expected one of: {', '.join(table)})")
    value, unit = float(m.group(1)), m.group(2)
    if unit not in table:
        raise UnitError(f"unknown {dimension.replace('_', ' ')} unit {unit!r} in {text!r} "
                        f"(expected one of: {', '.join(table)})")
    return value * table[unit]


def parse_quantity_list(text, dimension):
    items = [s for s in str(text).split(",") if s.strip()]
    if not items:
        raise UnitError(f"empty list {text!r}")
    return [parse_quantity(s, dimension) for s in items]


def format_grams(kg):
    return f"{kg * 1000.0:.12g} g"


def format_mass_list(masses_kg):
    return ",".join(f"{m * 1000.0:.12g}g" for m in masses_kg)


def format_time(seconds):
    """Full-precision seconds followed by minutes to four significant figures."""
    return f"{seconds!r} s ({seconds / 60.0:.4g} min)"
