"""Exit criteria, each at its pinned tolerance.

Every check records one PASS/FAIL line; the lines are printed in the pytest
terminal summary and when this file is run as a script.
"""

import itertools
import math
import time

import numpy as np
import pytest

from staged_endurance.model import (
    EnergySource,
    RocketParams,
    StagePlan,
    VehicleParams,
    equal_staged_flight_time,
    ic_flight_time,
    required_storage_mass,
    rocket_flight_time,
    staged_flight_time,
)
from staged_endurance.optimize import (
    brute_force_best_order,
    grid_search_partition,
    optimal_order,
    optimal_partition,
    partition_objective,
)
from staged_endurance.simulate import SimConfig, SimMode, simulate_discrete, simulate_ic, simulate_rocket
from staged_endurance.sweep import SweepSpec, default_fractions, gain_table, run_sweep

RESULTS = []

CT = 6.2e-3
HEAVY = EnergySource.from_wh_per_kg(130)
MIXED = EnergySource.from_wh_per_kg(120)
STAGED = VehicleParams.from_flight_coeff(0.595, CT)
UNSTAGED = VehicleParams.from_flight_coeff(0.550, CT)


def check(tag, description, ok, detail):
    RESULTS.append(f"[{'PASS' if ok else 'FAIL'}] {tag}: {description} -- {detail}")
    assert ok, f"{tag}: {description} -- {detail}"


def test_c1_single_stage_prediction():
    t = equal_staged_flight_time(HEAVY, STAGED, 0.380, 1) / 60
    check("C1", "single-stage 19.1 min +/- 0.05", abs(t - 19.1) <= 0.05, f"{t:.4f} min")


def test_c2_two_stage_prediction():
    t = equal_staged_flight_time(HEAVY, STAGED, 0.380, 2) / 60
    check("C2", "two-stage 22.8 min +/- 0.05", abs(t - 22.8) <= 0.05, f"{t:.4f} min")


def test_c3_ordering_predictions():
    heavy = staged_flight_time(MIXED, STAGED, StagePlan([0.190, 0.135])).total_minutes
    light = staged_flight_time(MIXED, STAGED, StagePlan([0.135, 0.190])).total_minutes
    ok = abs(heavy - 19.3) <= 0.05 and abs(light - 19.0) <= 0.05 and heavy > light
    check("C3", "heavy-first 19.3, light-first 19.0 (+/- 0.05), heavy > light", ok,
          f"heavy {heavy:.4f} min, light {light:.4f} min")


def test_c4_gain_table():
    start = time.perf_counter()
    rows = gain_table([2, 3, 4, 5])
    elapsed = time.perf_counter() - start
    expected = [10.5, 16.9, 21.1, 24.0]
    got = [r.gain_percent for r in rows]
    ok = all(abs(g - e) <= 0.3 for g, e in zip(got, expected)) and elapsed < 10
    check("C4", "gains 10.5/16.9/21.1/24.0 % +/- 0.3 pp in < 10 s", ok,
          ", ".join(f"N={r.stages}: {r.gain_percent:.3f}%" for r in rows) + f" ({elapsed:.2f} s)")


def test_c5_mass_correction_factor():
    factor = equal_staged_flight_time(HEAVY, UNSTAGED, 0.380, 1) / equal_staged_flight_time(HEAVY, STAGED, 0.380, 1)
    check("C5", "dry-mass correction factor 1.07 +/- 0.005", abs(factor - 1.07) <= 0.005, f"{factor:.5f}")


def test_c6_equivalent_single_stage_mass():
    mb = required_storage_mass(HEAVY, UNSTAGED, 1, 22.8 * 60)
    check("C6", "single-stage mass for 22.8 min is 525 g +/- 5 g", abs(mb - 0.525) <= 0.005, f"{mb * 1000:.2f} g")


# --- criterion 7: oracle suite ----------------------------------------------


def test_c7a_permutation_optimality():
    rng = np.random.default_rng(7)
    source = EnergySource(5e5)
    worst = 0.0
    for _ in range(200):
        n = int(rng.integers(2, 7))
        masses = np.exp(rng.uniform(math.log(0.01), math.log(1.0), size=n)).tolist()
        v = VehicleParams(float(np.exp(rng.uniform(math.log(0.1), math.log(10.0)))), 7.0)
        t_sorted = staged_flight_time(source, v, optimal_order(StagePlan(masses))).total_seconds
        _, t_brute = brute_force_best_order(source, v, StagePlan(masses))
        worst = max(worst, abs(t_sorted - t_brute) / t_brute)
    check("C7a", "descending order equals brute force over 200 plans (<= 1e-12 rel)", worst <= 1e-12,
          f"worst rel diff {worst:.2e}")


def _fd_grad_max(x):
    x = np.asarray(x, dtype=float)
    worst = 0.0
    for i in range(1, x.size - 1):
        h = 1e-7 * x[i]
        up, dn = x.copy(), x.copy()
        up[i] += h
        dn[i] -= h
        worst = max(worst, abs(partition_objective(up) - partition_objective(dn)) / (2 * h))
    return worst


def test_c7b_kkt_residual_and_gradient():
    worst_res, worst_grad, count = 0.0, 0.0, 0
    for md, ratio, n in itertools.product((0.1, 0.595, 10.0), (0.05, 0.64, 3.0, 50.0, 999.0), (1, 2, 3, 4, 5, 8, 10)):
        sol = optimal_partition(VehicleParams(md, 1.0), ratio * md, n)
        worst_res = max(worst_res, sol.kkt_residual)
        worst_grad = max(worst_grad, _fd_grad_max(sol.boundary_masses))
        count += 1
    check("C7b", f"KKT residual <= 1e-10 and FD gradient <= 1e-6 on {count} partitions",
          worst_res <= 1e-10 and worst_grad <= 1e-6, f"residual {worst_res:.2e}, gradient {worst_grad:.2e}")


def test_c7c_two_stage_grid_agreement():
    sol = optimal_partition(STAGED, 0.380, 2)
    grid = grid_search_partition(STAGED, 0.380, 2, 1e-5)
    rel = abs(sol.objective - grid.objective) / sol.objective
    check("C7c", "N=2 partition matches 1-D grid search (<= 1e-6 rel objective)", rel <= 1e-6,
          f"rel diff {rel:.2e}, x2 {sol.boundary_masses[1]:.6f} vs {grid.boundary_masses[1]:.6f} kg")


@pytest.mark.parametrize("ratio", [0.1, 1.0, 10.0])
def test_c7d_equal_staging_converges_to_continuous(ratio):
    mb = ratio * STAGED.dry_mass_kg
    eq = equal_staged_flight_time(HEAVY, STAGED, mb, 1000)
    ic = ic_flight_time(HEAVY, STAGED, mb)
    rel = abs(eq - ic) / ic
    check(f"C7d[{ratio:g}]", f"N=1000 equal staging within 0.1% of continuous at m_b/m_d={ratio:g}", rel < 1e-3,
          f"rel diff {rel:.3e}")


def test_c7e_simulators_match_closed_forms():
    worst = {"discrete": 0.0, "ic": 0.0, "rocket": 0.0}
    halving_ok = True
    for md, ratio, k in itertools.product((0.3, 1.0, 3.0), (0.1, 1.0, 10.0), (0, 1, 2)):
        mb = ratio * md
        v = VehicleParams(md, 10.0)
        s = EnergySource((1e5, 4e5, 1e6)[k])
        r = RocketParams((50.0, 250.0, 2000.0)[k])
        plan = StagePlan([0.6 * mb, 0.4 * mb])
        exp = staged_flight_time(s, v, plan).total_seconds
        got = simulate_discrete(s, v, plan, SimConfig(min(1.0, 1e-3 * exp))).termination_time
        worst["discrete"] = max(worst["discrete"], abs(got - exp) / exp)
        exp = ic_flight_time(s, v, mb)
        got = simulate_ic(s, v, mb, SimConfig(min(1.0, 1e-4 * exp), SimMode.IC)).termination_time
        worst["ic"] = max(worst["ic"], abs(got - exp) / exp)
        exp = rocket_flight_time(r, md, mb)
        got = simulate_rocket(r, md, mb, SimConfig(min(1.0, 1e-4 * exp), SimMode.ROCKET)).termination_time
        worst["rocket"] = max(worst["rocket"], abs(got - exp) / exp)

        # order-of-accuracy sanity on short missions (steps stay below the 1 s cap)
        s_short, r_short = EnergySource((50.0, 100.0, 200.0)[k]), RocketParams((0.5, 1.0, 2.0)[k])
        for exp, run in (
            (ic_flight_time(s_short, v, mb), lambda dt: simulate_ic(s_short, v, mb, SimConfig(dt, SimMode.IC))),
            (rocket_flight_time(r_short, md, mb), lambda dt: simulate_rocket(r_short, md, mb, SimConfig(dt, SimMode.ROCKET))),
        ):
            errs = [abs(run(exp / n).termination_time - exp) for n in (10.5, 21.0, 42.0)]
            halving_ok &= errs[0] > errs[1] > errs[2]
    ok = worst["discrete"] < 1e-3 and worst["ic"] < 1e-4 and worst["rocket"] < 1e-4 and halving_ok
    check("C7e", "simulators within 0.1% / 0.01% / 0.01% and error shrinks when dt halves", ok,
          f"discrete {worst['discrete']:.1e}, ic {worst['ic']:.1e}, rocket {worst['rocket']:.1e}, "
          f"halving {'ok' if halving_ok else 'violated'}")


def test_c7f_rocket_log_linearity():
    rocket = RocketParams(250.0)
    worst = 0.0
    for x, md in itertools.product((0.5, 1.0, 2.0, 5.0), (0.1, 1.0, 10.0)):
        t = rocket_flight_time(rocket, md, math.expm1(x) * md)
        exact = 4 * rocket.exhaust_velocity / rocket.gravity * x
        worst = max(worst, abs(t - exact) / exact)
    check("C7f", "rocket time is (4 v_e/g) x for m_b = (e^x - 1) m_d, to round-off", worst <= 4.5e-16,
          f"worst rel diff {worst:.1e}")


def test_c7g_sweep_scale_invariance():
    base_spec = dict(storage_fractions=default_fractions(64), stage_counts=(1, 2, 3, 5))
    base = run_sweep(SweepSpec(**base_spec))
    worst = 0.0
    for lam in (0.1, 10.0):
        other = run_sweep(SweepSpec(reference_dry_mass=lam, **base_spec))
        for a, b in zip(base.rows, other.rows):
            worst = max(worst, abs(a.normalized_time - b.normalized_time) / a.normalized_time)
    check("C7g", "normalized sweep invariant under dry-mass scaling 0.1x and 10x (<= 1e-9 rel)", worst <= 1e-9,
          f"worst rel diff {worst:.1e}")


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))
