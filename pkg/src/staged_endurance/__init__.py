"""Hover endurance of multirotors with staged energy storage."""

from .errors import DomainError, RefusalError, SolverError, StagingError, UnreachableTargetError
from .model import (
    EnergySource,
    MissionResult,
    RocketParams,
    StagePlan,
    VehicleParams,
    equal_staged_flight_time,
    flight_time_fixed_mass,
    hover_power,
    ic_flight_time,
    ic_flight_time_limit,
    required_storage_mass,
    rocket_flight_time,
    staged_flight_time,
)
from .optimize import PartitionSolution, brute_force_best_order, grid_search_partition, optimal_order, optimal_partition

__version__ = "0.1.0"
