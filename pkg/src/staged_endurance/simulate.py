"""Fixed-step time integration of hover missions.

These integrators check the closed-form flight times in ``model`` by a
different route: they march mass and energy forward in time and locate the
exhaustion event inside the final step by linear interpolation.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .model import EnergySource, RocketParams, StagePlan, VehicleParams, hover_power

MAX_TRACE_POINTS = 10_000
CSV_COLUMNS = ("time_s", "mass_kg", "power_W_or_thrust_N", "remaining_J_or_kg")


class SimMode(str, enum.Enum):
    DISCRETE = "discrete-stages"
    IC = "ic-continuous"
    ROCKET = "rocket"


@dataclass(frozen=True)
class SimConfig:
    time_step: float
    mode: SimMode = SimMode.DISCRETE

    def __post_init__(self):
        if not (0 < self.time_step <= 1.0):
            raise DomainError(f"time_step must lie in (0, 1] s, got {self.time_step!r}")
        object.__setattr__(self, "mode", SimMode(self.mode))


@dataclass(frozen=True)
class SimTrace:
    """Sampled mission history.

    ``power`` holds electrical/shaft power in W for rotor modes and total
    thrust in N for the rocket mode. ``remaining`` is stored energy in J for
    discrete stages and fuel mass in kg otherwise.
    """

    mode: SimMode
    time: np.ndarray
    mass: np.ndarray
    power: np.ndarray
    remaining: np.ndarray
    termination_time: float

    def rows(self):
        return zip(self.time.tolist(), self.mass.tolist(), self.power.tolist(), self.remaining.tolist())

    def write_csv(self, fh):
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in self.rows():
            writer.writerow([repr(v) for v in row])


def _decimate(samples, pinned, limit=MAX_TRACE_POINTS):
    """Thin samples to at most ``limit`` points, always keeping pinned indices."""
    n = len(samples)
    if n <= limit:
        return samples
    pinned = sorted(set(pinned) | {0, n - 1})
    budget = max(limit - len(pinned), 1)
    stride = math.ceil(n / budget)
    keep = sorted(set(range(0, n, stride)) | set(pinned))
    while len(keep) > limit:
        stride += 1
        keep = sorted(set(range(0, n, stride)) | set(pinned))
    return [samples[i] for i in keep]


def _trace(mode, samples, pinned, termination_time):
    samples = _decimate(samples, pinned)
    arr = np.array(samples, dtype=float).reshape(-1, 4)
    return SimTrace(mode, arr[:, 0], arr[:, 1], arr[:, 2], arr[:, 3], termination_time)


def _check_mode(config, expected):
    if config.mode is not expected:
        raise DomainError(f"config mode is {config.mode.value!r}, expected {expected.value!r}")


def simulate_discrete(source: EnergySource, vehicle: VehicleParams, plan: StagePlan, config: SimConfig) -> SimTrace:
    """Drain each stage at the constant hover power of the current mass, then eject it."""
    _check_mode(config, SimMode.DISCRETE)
    dt = config.time_step
    masses = plan.stage_masses_kg
    mass = vehicle.dry_mass_kg + plan.total_mass
    stage_energy = [source.specific_energy * m for m in masses]
    t = 0.0
    remaining_total = sum(stage_energy)
    samples = [(t, mass, hover_power(mass, vehicle), remaining_total)]
    pinned = []

    for i, m_stage in enumerate(masses):
        power = hover_power(mass, vehicle)
        energy = stage_energy[i]
        later = sum(stage_energy[i + 1:])
        t0 = t
        k = 0
        while True:
            used = power * dt
            if energy - used > 0:
                energy -= used
                k += 1
                t = t0 + k * dt
                samples.append((t, mass, power, later + energy))
            else:
                # energy falls linearly inside this step
                t = t0 + k * dt + energy / power
                break
        pinned.append(len(samples))
        samples.append((t, mass, power, later))
        mass = mass - m_stage if i < len(masses) - 1 else vehicle.dry_mass_kg
        after = hover_power(mass, vehicle) if i < len(masses) - 1 else 0.0
        pinned.append(len(samples))
        samples.append((t, mass, after, later))

    return _trace(SimMode.DISCRETE, samples, pinned, t)


def _rk4_step(f, y, h):
    k1 = f(y)
    k2 = f(y + 0.5 * h * k1)
    k3 = f(y + 0.5 * h * k2)
    k4 = f(y + h * k3)
    return y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _integrate_to_empty(f, y0, dt, sample):
    """Integrate dy/dt = f(y) from y0 > 0 until y reaches zero.

    ``sample(t, y)`` builds a trace row. Returns (samples, termination_time).
    """
    t = 0.0
    y = y0
    samples = [sample(t, y)]
    if y0 <= 0:
        return samples, 0.0
    k = 0
    while True:
        y_next = _rk4_step(f, y, dt)
        if y_next <= 0:
            t_end = k * dt + dt * y / (y - y_next)
            samples.append(sample(t_end, 0.0))
            return samples, t_end
        y = y_next
        k += 1
        t = k * dt
        samples.append(sample(t, y))


def simulate_ic(source: EnergySource, vehicle: VehicleParams, fuel_mass, config: SimConfig) -> SimTrace:
    """Burn fuel at the rate set by hover power: dm/dt = -p(m_d + m) / e_b."""
    _check_mode(config, SimMode.IC)
    if fuel_mass < 0:
        raise DomainError("fuel_mass must be non-negative")
    md = vehicle.dry_mass_kg
    rate = vehicle.power_coeff_cp * vehicle.gravity**1.5 / (2.0 * source.specific_energy)

    def f(m):
        return -rate * (md + m) ** 1.5

    def sample(t, m):
        return (t, md + m, hover_power(md + m, vehicle), m)

    samples, t_end = _integrate_to_empty(f, float(fuel_mass), config.time_step, sample)
    return _trace(SimMode.IC, samples, [], t_end)


def simulate_rocket(rocket: RocketParams, dry_mass, fuel_mass, config: SimConfig) -> SimTrace:
    """Hover on four reaction engines: 4 v_e dm/dt = -g (m_d + m)."""
    _check_mode(config, SimMode.ROCKET)
    if not dry_mass > 0:
        raise DomainError("dry_mass must be positive")
    if fuel_mass < 0:
        raise DomainError("fuel_mass must be non-negative")
    g, ve = rocket.gravity, rocket.exhaust_velocity

    def f(m):
        return -g * (dry_mass + m) / (4.0 * ve)

    def sample(t, m):
        return (t, dry_mass + m, g * (dry_mass + m), m)

    samples, t_end = _integrate_to_empty(f, float(fuel_mass), config.time_step, sample)
    return _trace(SimMode.ROCKET, samples, [], t_end)
