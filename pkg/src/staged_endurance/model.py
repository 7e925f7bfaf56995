"""Hover power and flight-time models for staged energy storage.

Everything here works in SI units (kg, J, s, W, m/s^2). Flight times share a
common structure: ``e_b * c_T * objective`` where the objective depends only on
masses. The ``*_objective`` helpers expose that mass-only factor so the
optimizer and the normalized sweeps can drop ``e_b * c_T`` exactly.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Sequence

from scipy import optimize as _sciopt

from .errors import DomainError, UnreachableTargetError

STANDARD_GRAVITY = 9.81
J_PER_WH = 3600.0


def _require_positive(name, value):
    if not (value > 0 and math.isfinite(value)):
        raise DomainError(f"{name} must be a finite positive number, got {value!r}")


def _require_nonnegative(name, value):
    if not (value >= 0 and math.isfinite(value)):
        raise DomainError(f"{name} must be a finite non-negative number, got {value!r}")


# ---------------------------------------------------------------------------
# Domain types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VehicleParams:
    """Multirotor parameters at hover.

    ``power_coeff_cp`` is the lumped per-rotor coefficient in ``p_i = c_p f_i^1.5``
    (W per N^1.5). The flight coefficient ``c_T`` is always derived from it.
    """

    dry_mass_kg: float
    power_coeff_cp: float
    gravity: float = STANDARD_GRAVITY

    def __post_init__(self):
        _require_positive("dry_mass_kg", self.dry_mass_kg)
        _require_positive("power_coeff_cp", self.power_coeff_cp)
        _require_positive("gravity", self.gravity)

    @property
    def flight_coeff(self) -> float:
        """c_T = 2 / (c_p g^1.5), in kg^1.5 / W."""
        return 2.0 / (self.power_coeff_cp * self.gravity**1.5)

    @classmethod
    def from_flight_coeff(cls, dry_mass_kg, flight_coeff_ct, gravity=STANDARD_GRAVITY):
        _require_positive("flight_coeff_ct", flight_coeff_ct)
        _require_positive("gravity", gravity)
        return cls(dry_mass_kg, 2.0 / (flight_coeff_ct * gravity**1.5), gravity)

    @classmethod
    def from_rotor(
        cls,
        dry_mass_kg,
        air_density,
        disk_area,
        figure_of_merit=1.0,
        powertrain_efficiency=1.0,
        gravity=STANDARD_GRAVITY,
    ):
        """Build from actuator-disk quantities of one rotor of a symmetric quadcopter.

        Ideal hover power of one disk is ``f^1.5 / sqrt(2 rho A)``; the figure of
        merit and powertrain efficiency divide that, giving
        ``c_p = 1 / (FM * eta * sqrt(2 rho A))``.
        """
        for name, v in (
            ("air_density", air_density),
            ("disk_area", disk_area),
            ("figure_of_merit", figure_of_merit),
            ("powertrain_efficiency", powertrain_efficiency),
        ):
            _require_positive(name, v)
        cp = 1.0 / (figure_of_merit * powertrain_efficiency * math.sqrt(2.0 * air_density * disk_area))
        return cls(dry_mass_kg, cp, gravity)

    def with_dry_mass(self, dry_mass_kg) -> "VehicleParams":
        return dataclasses.replace(self, dry_mass_kg=dry_mass_kg)


@dataclass(frozen=True)
class EnergySource:
    """Storage medium with specific energy in J/kg."""

    specific_energy: float

    def __post_init__(self):
        _require_positive("specific_energy", self.specific_energy)

    @classmethod
    def from_wh_per_kg(cls, wh_per_kg) -> "EnergySource":
        return cls(wh_per_kg * J_PER_WH)

    @property
    def wh_per_kg(self) -> float:
        return self.specific_energy / J_PER_WH


@dataclass(frozen=True)
class StagePlan:
    """Ordered stage masses in kg; index 0 is depleted and ejected first."""

    stage_masses_kg: tuple

    def __post_init__(self):
        masses = tuple(float(m) for m in self.stage_masses_kg)
        if not masses:
            raise DomainError("a stage plan needs at least one stage")
        for m in masses:
            _require_positive("stage mass", m)
        object.__setattr__(self, "stage_masses_kg", masses)

    def __len__(self):
        return len(self.stage_masses_kg)

    def __iter__(self):
        return iter(self.stage_masses_kg)

    @property
    def total_mass(self) -> float:
        return sum(self.stage_masses_kg)


@dataclass(frozen=True)
class MissionResult:
    per_stage_seconds: tuple
    total_seconds: float

    @classmethod
    def from_stage_times(cls, times: Sequence[float]) -> "MissionResult":
        times = tuple(times)
        total = 0.0
        for t in times:
            total += t
        return cls(times, total)

    @property
    def total_minutes(self) -> float:
        return self.total_seconds / 60.0


@dataclass(frozen=True)
class RocketParams:
    exhaust_velocity: float
    gravity: float = STANDARD_GRAVITY

    def __post_init__(self):
        _require_positive("exhaust_velocity", self.exhaust_velocity)
        _require_positive("gravity", self.gravity)


# ---------------------------------------------------------------------------
# Mass-only objectives (flight time divided by e_b * c_T)
# ---------------------------------------------------------------------------


def staged_objective_terms(dry_mass, masses):
    """Per-stage ``m_i * (m_d + sum_{j>=i} m_j)^-1.5`` in stage order."""
    carried = [0.0] * len(masses)
    acc = dry_mass
    for i in range(len(masses) - 1, -1, -1):
        acc += masses[i]
        carried[i] = acc
    return [m * c**-1.5 for m, c in zip(masses, carried)]


def equal_objective(dry_mass, total_storage, n_stages):
    """``(m_b / N) * sum_{i=1..N} (m_d + i m_b / N)^-1.5``."""
    s = 0.0
    for i in range(1, n_stages + 1):
        s += (dry_mass + (i / n_stages) * total_storage) ** -1.5
    return total_storage / n_stages * s


def ic_fraction(dry_mass, fuel_mass):
    """Continuous-staging flight time as a fraction of its asymptotic limit."""
    return 1.0 - (1.0 + fuel_mass / dry_mass) ** -0.5


# ---------------------------------------------------------------------------
# Closed forms
# ---------------------------------------------------------------------------


def hover_power(total_mass, vehicle: VehicleParams) -> float:
    """Power in W to hover a symmetric quadcopter of ``total_mass`` kg."""
    _require_nonnegative("total_mass", total_mass)
    return 0.5 * vehicle.power_coeff_cp * vehicle.gravity**1.5 * total_mass**1.5


def flight_time_fixed_mass(source: EnergySource, vehicle: VehicleParams, storage_mass, total_mass) -> float:
    _require_nonnegative("storage_mass", storage_mass)
    if not total_mass > 0:
        raise DomainError("total_mass must be positive (power law is singular at zero)")
    if total_mass < vehicle.dry_mass_kg:
        raise DomainError(f"total_mass {total_mass} kg is below the dry mass {vehicle.dry_mass_kg} kg")
    if storage_mass > total_mass:
        raise DomainError("storage_mass cannot exceed total_mass")
    return source.specific_energy * vehicle.flight_coeff * (storage_mass * total_mass**-1.5)


def staged_flight_time(source: EnergySource, vehicle: VehicleParams, plan: StagePlan) -> MissionResult:
    """Per-stage and total hover time when stages are ejected in plan order."""
    if not isinstance(plan, StagePlan):
        plan = StagePlan(tuple(plan))
    scale = source.specific_energy * vehicle.flight_coeff
    terms = staged_objective_terms(vehicle.dry_mass_kg, plan.stage_masses_kg)
    return MissionResult.from_stage_times(scale * t for t in terms)


def equal_staged_flight_time(source: EnergySource, vehicle: VehicleParams, total_storage, n_stages) -> float:
    _require_nonnegative("total_storage", total_storage)
    if int(n_stages) != n_stages or n_stages < 1:
        raise DomainError(f"n_stages must be an integer >= 1, got {n_stages!r}")
    n_stages = int(n_stages)
    return source.specific_energy * vehicle.flight_coeff * equal_objective(vehicle.dry_mass_kg, total_storage, n_stages)


def ic_flight_time_limit(source: EnergySource, vehicle: VehicleParams) -> float:
    """Upper bound on continuous-staging hover time, ``2 e_b c_T / sqrt(m_d)``."""
    return 2.0 * source.specific_energy * vehicle.flight_coeff / math.sqrt(vehicle.dry_mass_kg)


def ic_flight_time(source: EnergySource, vehicle: VehicleParams, fuel_mass) -> float:
    """Hover time of a combustion engine burning ``fuel_mass`` kg and exhausting it."""
    _require_nonnegative("fuel_mass", fuel_mass)
    return ic_flight_time_limit(source, vehicle) * ic_fraction(vehicle.dry_mass_kg, fuel_mass)


def rocket_flight_time(rocket: RocketParams, dry_mass, fuel_mass) -> float:
    """Hover time of a four-engine reaction craft, ``(4 v_e / g) ln(1 + m_b/m_d)``."""
    _require_positive("dry_mass", dry_mass)
    _require_nonnegative("fuel_mass", fuel_mass)
    return 4.0 * rocket.exhaust_velocity / rocket.gravity * math.log1p(fuel_mass / dry_mass)


# ---------------------------------------------------------------------------
# Inversion
# ---------------------------------------------------------------------------


def max_equal_staged_flight_time(source: EnergySource, vehicle: VehicleParams, n_stages):
    """Return ``(storage_mass, time)`` maximizing equal-staged hover time for N stages."""
    md = vehicle.dry_mass_kg
    if n_stages == 1:
        mb = 2.0 * md
        return mb, equal_staged_flight_time(source, vehicle, mb, 1)

    def f(mb):
        return equal_objective(md, mb, n_stages)

    hi = 2.0 * n_stages * md * 10.0
    while f(0.99 * hi) <= f(hi):
        hi *= 2.0
    res = _sciopt.minimize_scalar(
        lambda mb: -f(mb), bounds=(0.0, hi), method="bounded", options={"xatol": 1e-12 * md}
    )
    mb = float(res.x)
    return mb, equal_staged_flight_time(source, vehicle, mb, n_stages)


def required_storage_mass(source: EnergySource, vehicle: VehicleParams, n_equal_stages, target_time) -> float:
    """Smallest total storage mass whose equal-staged hover time hits ``target_time``.

    Raises UnreachableTargetError when the target exceeds the maximum over all
    storage masses; the error carries that maximum.
    """
    _require_nonnegative("target_time", target_time)
    if target_time == 0:
        return 0.0
    mb_max, t_max = max_equal_staged_flight_time(source, vehicle, n_equal_stages)
    if target_time > t_max:
        raise UnreachableTargetError(target_time, t_max, mb_max)
    if target_time == t_max:
        return mb_max

    def g(mb):
        return equal_staged_flight_time(source, vehicle, mb, n_equal_stages) - target_time

    return float(_sciopt.bisect(g, 0.0, mb_max, xtol=1e-15 * vehicle.dry_mass_kg, rtol=1e-12, maxiter=500))
