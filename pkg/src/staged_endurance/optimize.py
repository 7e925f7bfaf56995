"""Optimal staging order and optimal partitioning of a storage mass budget.

Both solvers come with an exhaustive oracle (permutation enumeration, grid
search) that shares nothing with them beyond the objective.

The partition problem is written in boundary masses
``x_i = m_d + sum_{j>=i} m_j`` with ``x_1 = m_d + m_b`` and ``x_{N+1} = m_d``.
The objective is ``J = sum_i (x_i - x_{i+1}) / x_i^1.5`` and its interior
stationarity conditions are

    1/x_i^1.5 + 2/x_{i-1}^1.5 - 3 x_{i+1}/x_i^2.5 = 0,   i = 2..N.

The solver works on these equations multiplied by ``x_i^1.5``, which makes
every term dimensionless and O(1):

    g_i = 1 + 2 (x_i/x_{i-1})^1.5 - 3 x_{i+1}/x_i.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import solve_banded

from .errors import DomainError, RefusalError, SolverError
from .model import EnergySource, StagePlan, VehicleParams, staged_flight_time

MAX_BRUTE_FORCE_STAGES = 8
MAX_GRID_STAGES = 3
NEWTON_TOL = 1e-12
NEWTON_MAX_ITER = 200


@dataclass(frozen=True)
class PartitionSolution:
    """Stage boundaries ``x_1 > ... > x_{N+1}`` (kg) and solver diagnostics.

    ``objective`` is J in kg^-0.5; multiplying by ``e_b * c_T`` gives seconds.
    ``flight_time_seconds`` is filled only when a source was supplied.
    ``kkt_residual`` is the max of |g_i| in the dimensionless form above.
    """

    boundary_masses: tuple
    objective: float
    kkt_residual: float
    iterations: int
    flight_time_seconds: Optional[float] = None

    @property
    def stage_masses(self) -> tuple:
        x = self.boundary_masses
        return tuple(x[i] - x[i + 1] for i in range(len(x) - 1))

    @property
    def n_stages(self) -> int:
        return len(self.boundary_masses) - 1

    def plan(self) -> StagePlan:
        return StagePlan(self.stage_masses)


# ---------------------------------------------------------------------------
# Staging order
# ---------------------------------------------------------------------------


def optimal_order(plan: StagePlan) -> StagePlan:
    """Heaviest stage first. Optimal for any vehicle and source."""
    return StagePlan(tuple(sorted(plan.stage_masses_kg, reverse=True)))


def brute_force_best_order(source: EnergySource, vehicle: VehicleParams, plan: StagePlan):
    """Evaluate every ordering and return ``(best_plan, total_seconds)``.

    Ties go to the lexicographically largest mass sequence.
    """
    masses = plan.stage_masses_kg
    if len(masses) > MAX_BRUTE_FORCE_STAGES:
        raise RefusalError(
            f"refusing to enumerate {len(masses)}! orderings (limit {MAX_BRUTE_FORCE_STAGES} stages)"
        )
    best_key = None
    for perm in set(itertools.permutations(masses)):
        t = staged_flight_time(source, vehicle, StagePlan(perm)).total_seconds
        key = (t, perm)
        if best_key is None or key > best_key:
            best_key = key
    return StagePlan(best_key[1]), best_key[0]


# ---------------------------------------------------------------------------
# Partitioning
# ---------------------------------------------------------------------------


def partition_objective(x) -> float:
    x = np.asarray(x, dtype=float)
    return float(np.sum((x[:-1] - x[1:]) / x[:-1] ** 1.5))


def partition_gradient(x) -> np.ndarray:
    """dJ/dx_i at the interior boundaries i = 2..N."""
    x = np.asarray(x, dtype=float)
    xi, prev, nxt = x[1:-1], x[:-2], x[2:]
    return -0.5 * xi**-1.5 + 1.5 * nxt * xi**-2.5 - prev**-1.5


def kkt_residuals(x) -> np.ndarray:
    """Dimensionless stationarity residuals g_i at the interior boundaries."""
    x = np.asarray(x, dtype=float)
    xi, prev, nxt = x[1:-1], x[:-2], x[2:]
    return 1.0 + 2.0 * (xi / prev) ** 1.5 - 3.0 * nxt / xi


def _kkt_jacobian_banded(u):
    xi, prev, nxt = u[1:-1], u[:-2], u[2:]
    n = xi.size
    ab = np.zeros((3, n))
    ab[1] = 3.0 * np.sqrt(xi) / prev**1.5 + 3.0 * nxt / xi**2
    # d g_k / d x_{k+1}, stored on the superdiagonal
    ab[0, 1:] = -3.0 / xi[:-1]
    # d g_k / d x_{k-1}, stored on the subdiagonal
    ab[2, :-1] = -3.0 * xi[1:] ** 1.5 / xi[:-1] ** 2.5
    return ab


def _max_feasible_step(u, du_full, margin):
    gaps = u[:-1] - u[1:]
    dgaps = du_full[:-1] - du_full[1:]
    alpha = 1.0
    shrinking = dgaps < 0
    if np.any(shrinking):
        alpha = min(alpha, float(np.min((gaps[shrinking] - margin) / -dgaps[shrinking])))
    return max(alpha, 0.0)


def _project_ordered(u, margin):
    """Map interior boundaries back into the ordered feasible set."""
    top, bottom = u[0], u[-1]
    inner = np.sort(np.clip(u[1:-1], bottom + margin, top - margin))[::-1]
    out = np.concatenate(([top], inner, [bottom]))
    # enforce minimum gaps from the bottom up
    for k in range(out.size - 2, 0, -1):
        out[k] = max(out[k], out[k + 1] + margin)
    for k in range(1, out.size - 1):
        out[k] = min(out[k], out[k - 1] - margin)
    return out


def _gradient_ascent(u, margin, iterations=50):
    j = partition_objective(u)
    step = 1.0
    for _ in range(iterations):
        grad = partition_gradient(u)
        improved = False
        while step > 1e-16:
            trial = u.copy()
            trial[1:-1] += step * grad
            trial = _project_ordered(trial, margin)
            jt = partition_objective(trial)
            if jt > j:
                u, j = trial, jt
                improved = True
                step *= 2.0
                break
            step *= 0.5
        if not improved:
            break
    return u


def _newton(u, margin, tol, max_iter):
    n_inner = u.size - 2
    if n_inner == 0:
        return u, 0.0, 0
    res = kkt_residuals(u)
    norm = float(np.max(np.abs(res)))
    it = 0
    fallback_used = False
    while norm > tol:
        if it >= max_iter:
            raise SolverError("partition solver did not converge", u, norm, it)
        it += 1
        delta = solve_banded((1, 1), _kkt_jacobian_banded(u), -res)
        full = np.zeros_like(u)
        full[1:-1] = delta
        alpha = _max_feasible_step(u, full, margin)
        accepted = False
        while alpha > 1e-12:
            trial = u + alpha * full
            trial_res = kkt_residuals(trial)
            trial_norm = float(np.max(np.abs(trial_res)))
            if trial_norm < norm:
                u, res, norm = trial, trial_res, trial_norm
                accepted = True
                break
            alpha *= 0.5
        if not accepted:
            if norm <= 100 * tol:
                # round-off floor just above the target
                break
            if fallback_used or n_inner == 0:
                raise SolverError("partition solver stalled", u, norm, it)
            fallback_used = True
            u = _gradient_ascent(u, margin)
            res = kkt_residuals(u)
            norm = float(np.max(np.abs(res)))
    return u, norm, it


def optimal_partition(
    vehicle: VehicleParams,
    total_storage,
    n_stages,
    source: Optional[EnergySource] = None,
) -> PartitionSolution:
    """Stage masses summing to ``total_storage`` that maximize hover time.

    Damped Newton on the tridiagonal stationarity system, started from the
    equal partition, with a projected gradient ascent fallback if Newton stalls.
    """
    if not (total_storage > 0 and math.isfinite(total_storage)):
        raise DomainError("total_storage must be positive")
    if int(n_stages) != n_stages or n_stages < 1:
        raise DomainError(f"n_stages must be an integer >= 1, got {n_stages!r}")
    n = int(n_stages)
    md = vehicle.dry_mass_kg
    ratio = total_storage / md

    u = 1.0 + ratio * np.arange(n, -1, -1) / n
    u[0] = 1.0 + ratio
    u[-1] = 1.0
    u, _, iterations = _newton(u, 1e-9 * ratio, NEWTON_TOL, NEWTON_MAX_ITER)

    x = u * md
    x[0] = md + total_storage
    x[-1] = md
    if np.any(np.diff(x) >= 0):
        raise SolverError("optimum collapsed a stage to zero mass", x, float("nan"), iterations)
    residual = float(np.max(np.abs(kkt_residuals(x)))) if n > 1 else 0.0
    objective = partition_objective(x)
    seconds = None
    if source is not None:
        seconds = source.specific_energy * vehicle.flight_coeff * objective
    return PartitionSolution(tuple(float(v) for v in x), objective, residual, iterations, seconds)


def grid_search_partition(
    vehicle: VehicleParams,
    total_storage,
    n_stages,
    resolution,
    source: Optional[EnergySource] = None,
) -> PartitionSolution:
    """Exhaustive search over interior boundaries on a uniform grid.

    Grid points are ``m_d + k * resolution`` strictly inside ``(m_d, m_d + m_b)``.
    """
    if n_stages > MAX_GRID_STAGES:
        raise RefusalError(f"grid search is limited to {MAX_GRID_STAGES} stages, got {n_stages}")
    if int(n_stages) != n_stages or n_stages < 1:
        raise DomainError(f"n_stages must be an integer >= 1, got {n_stages!r}")
    if not resolution > 0:
        raise DomainError("resolution must be positive")
    n = int(n_stages)
    md = vehicle.dry_mass_kg
    top = md + total_storage

    if n == 1:
        best = np.array([top, md])
        evaluated = 1
    else:
        k_max = math.ceil(total_storage / resolution) - 1
        if k_max < n - 1:
            raise DomainError("resolution too coarse for the requested number of stages")
        grid = md + resolution * np.arange(1, k_max + 1)
        grid = grid[grid < top]
        if n == 2:
            j = (top - grid) / top**1.5 + (grid - md) / grid**1.5
            idx = int(np.argmax(j))
            best = np.array([top, grid[idx], md])
            evaluated = grid.size
        else:
            best_j = -np.inf
            best = None
            evaluated = 0
            head = (top - grid) / top**1.5
            for a in range(1, grid.size):
                x2 = grid[a]
                x3 = grid[:a]
                j = head[a] + (x2 - x3) / x2**1.5 + (x3 - md) / x3**1.5
                evaluated += x3.size
                b = int(np.argmax(j))
                if j[b] > best_j:
                    best_j = float(j[b])
                    best = np.array([top, x2, x3[b], md])

    residual = float(np.max(np.abs(kkt_residuals(best)))) if n > 1 else 0.0
    objective = partition_objective(best)
    seconds = None
    if source is not None:
        seconds = source.specific_energy * vehicle.flight_coeff * objective
    return PartitionSolution(tuple(float(v) for v in best), objective, residual, evaluated, seconds)
