"""Command-line front end.

Exit codes: 0 success, 2 malformed input or config, 3 infeasible request,
4 solver failure, 5 unwritable output.
"""

from __future__ import annotations

import argparse
import io
import json
import os
import sys

from . import model, optimize, simulate, sweep
from .config import ConfigError, VehicleConfig, load_config
from .errors import DomainError, SolverError, StagingError, UnreachableTargetError
from .units import UnitError, format_grams, format_mass_list, format_time, parse_quantity, parse_quantity_list

CONFIG_ENV = "STAGED_ENDURANCE_CONFIG"

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INFEASIBLE = 3
EXIT_SOLVER = 4
EXIT_OUTPUT = 5


class CliError(Exception):
    def __init__(self, code, message):
        self.code = code
        super().__init__(message)


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------


def _parse(text, dimension, flag):
    try:
        return parse_quantity(text, dimension)
    except UnitError as exc:
        raise CliError(EXIT_INPUT, f"{flag}: {exc}") from None


def _parse_list(text, dimension, flag):
    try:
        return parse_quantity_list(text, dimension)
    except UnitError as exc:
        raise CliError(EXIT_INPUT, f"{flag}: {exc}") from None


def _config(args, required=True) -> VehicleConfig:
    path = args.config or os.environ.get(CONFIG_ENV)
    if not path:
        if not required:
            return None
        raise CliError(EXIT_INPUT, f"no config given: pass --config or set {CONFIG_ENV}")
    cfg = load_config(path)
    vehicle, source = cfg.vehicle, cfg.source
    if args.dry_mass is not None:
        vehicle = vehicle.with_dry_mass(_parse(args.dry_mass, "mass", "--dry-mass"))
    if args.specific_energy is not None:
        source = model.EnergySource(_parse(args.specific_energy, "specific_energy", "--specific-energy"))
    return VehicleConfig(source, vehicle, cfg.rocket)


def _plan_from_args(args):
    """Return ``(plan_masses, equal_total, n)``; exactly one of the first two is set."""
    if args.stages is not None:
        if args.total_mass is not None:
            raise CliError(EXIT_INPUT, "give either --stages or --total-mass, not both")
        return _parse_list(args.stages, "mass", "--stages"), None, None
    if args.total_mass is None:
        raise CliError(EXIT_INPUT, "either --stages or --total-mass is required")
    if args.n < 1:
        raise CliError(EXIT_INPUT, "-n must be at least 1")
    return None, _parse(args.total_mass, "mass", "--total-mass"), args.n


def _emit(text, out=None):
    if out is None:
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise CliError(EXIT_OUTPUT, f"cannot write {out}: {exc.strerror}") from None


def _json(obj):
    return json.dumps(obj, indent=2) + "\n"


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_flight_time(args):
    cfg = _config(args)
    masses, total, n = _plan_from_args(args)
    if masses is not None:
        plan = model.StagePlan(masses)
        result = model.staged_flight_time(cfg.source, cfg.vehicle, plan)
        per_stage, total_s, stage_masses = list(result.per_stage_seconds), result.total_seconds, list(plan)
    else:
        total_s = model.equal_staged_flight_time(cfg.source, cfg.vehicle, total, n)
        stage_masses = [total / n] * n
        if total > 0:
            per_stage = list(model.staged_flight_time(cfg.source, cfg.vehicle, model.StagePlan(stage_masses)).per_stage_seconds)
        else:
            per_stage = [0.0] * n

    if args.json:
        return _json({
            "dry_mass_kg": cfg.vehicle.dry_mass_kg,
            "specific_energy_J_per_kg": cfg.source.specific_energy,
            "stage_masses_kg": stage_masses,
            "per_stage_seconds": per_stage,
            "total_seconds": total_s,
            "total_minutes": total_s / 60.0,
        })
    lines = [f"dry mass: {format_grams(cfg.vehicle.dry_mass_kg)}"]
    for i, (m, t) in enumerate(zip(stage_masses, per_stage), 1):
        lines.append(f"stage {i}: {format_grams(m)} -> {format_time(t)}")
    lines.append(f"total flight time: {format_time(total_s)}")
    return "\n".join(lines) + "\n"


def cmd_optimize(args):
    cfg = _config(args)
    if args.action == "order":
        if args.stages is None:
            raise CliError(EXIT_INPUT, "optimize order needs --stages")
        plan = model.StagePlan(_parse_list(args.stages, "mass", "--stages"))
        best = optimize.optimal_order(plan)
        t_in = model.staged_flight_time(cfg.source, cfg.vehicle, plan).total_seconds
        t_best = model.staged_flight_time(cfg.source, cfg.vehicle, best).total_seconds
        if args.json:
            return _json({
                "input_order_kg": list(plan),
                "input_seconds": t_in,
                "optimal_order_kg": list(best),
                "optimal_seconds": t_best,
                "optimal_minutes": t_best / 60.0,
            })
        return (
            f"input order: {format_mass_list(plan)} -> {format_time(t_in)}\n"
            f"optimal order: {format_mass_list(best)}\n"
            f"flight time: {format_time(t_best)}\n"
        )

    if args.total_mass is None:
        raise CliError(EXIT_INPUT, "optimize partition needs --total-mass")
    total = _parse(args.total_mass, "mass", "--total-mass")
    sol = optimize.optimal_partition(cfg.vehicle, total, args.n, cfg.source)
    equal_s = model.equal_staged_flight_time(cfg.source, cfg.vehicle, total, args.n)
    if args.json:
        return _json({
            "stage_masses_kg": list(sol.stage_masses),
            "boundary_masses_kg": list(sol.boundary_masses),
            "flight_time_seconds": sol.flight_time_seconds,
            "flight_time_minutes": sol.flight_time_seconds / 60.0,
            "equal_staging_seconds": equal_s,
            "kkt_residual": sol.kkt_residual,
            "iterations": sol.iterations,
        })
    return (
        f"stage masses: {format_mass_list(sol.stage_masses)}\n"
        f"flight time: {format_time(sol.flight_time_seconds)}\n"
        f"equal staging: {format_time(equal_s)}\n"
        f"kkt residual: {sol.kkt_residual:.3e}\n"
        f"iterations: {sol.iterations}\n"
    )


def cmd_sweep(args):
    cfg = _config(args, required=False)
    try:
        counts = [int(s) for s in args.stages.split(",") if s.strip()] if args.stages else list(sweep.DEFAULT_STAGE_COUNTS)
    except ValueError:
        raise CliError(EXIT_INPUT, f"--stages: expected comma-separated integers, got {args.stages!r}") from None
    if args.points < 3:
        raise CliError(EXIT_INPUT, "--points must be at least 3")
    fractions = sweep.default_fractions(args.points)
    spec = sweep.SweepSpec(
        storage_fractions=fractions,
        stage_counts=counts,
        include_optimal=not args.no_optimal,
        include_continuous=not args.no_continuous,
        reference_dry_mass=cfg.vehicle.dry_mass_kg if cfg else 1.0,
    )
    table = sweep.run_sweep(spec)
    gains = None
    if args.gains:
        gains = sweep.gain_table([n for n in spec.stage_counts if n >= 2], fractions)

    if args.json:
        records = table.to_records()
        text = _json(records if gains is None else {"sweep": records, "gains": [g._asdict() for g in gains]})
    else:
        buf = io.StringIO()
        table.write_csv(buf)
        if gains is not None:
            buf.write("\n")
            sweep.write_gains_csv(gains, buf)
        text = buf.getvalue()
    _emit(text, args.out)
    return ""


def cmd_simulate(args):
    cfg = _config(args)
    mode = args.mode
    if mode == "discrete":
        masses, total, n = _plan_from_args(args)
        plan = model.StagePlan(masses if masses is not None else [total / n] * n)
        expected = model.staged_flight_time(cfg.source, cfg.vehicle, plan).total_seconds
        factor = 1e-3
    else:
        if args.total_mass is None:
            raise CliError(EXIT_INPUT, f"simulate --mode {mode} needs --total-mass (fuel mass)")
        fuel = _parse(args.total_mass, "mass", "--total-mass")
        factor = 1e-4
        if mode == "ic":
            expected = model.ic_flight_time(cfg.source, cfg.vehicle, fuel)
        else:
            if cfg.rocket is None:
                raise ConfigError("rocket.exhaust_velocity", "missing (required for rocket mode)")
            expected = model.rocket_flight_time(cfg.rocket, cfg.vehicle.dry_mass_kg, fuel)

    if args.dt is not None:
        dt = _parse(args.dt, "time", "--dt")
    else:
        dt = min(1.0, factor * expected) if expected > 0 else 1.0
    try:
        sim_mode = {"discrete": simulate.SimMode.DISCRETE, "ic": simulate.SimMode.IC, "rocket": simulate.SimMode.ROCKET}[mode]
        config = simulate.SimConfig(dt, sim_mode)
    except DomainError as exc:
        raise CliError(EXIT_INPUT, f"--dt: {exc}") from None

    if mode == "discrete":
        trace = simulate.simulate_discrete(cfg.source, cfg.vehicle, plan, config)
    elif mode == "ic":
        trace = simulate.simulate_ic(cfg.source, cfg.vehicle, fuel, config)
    else:
        trace = simulate.simulate_rocket(cfg.rocket, cfg.vehicle.dry_mass_kg, fuel, config)

    sim_t = trace.termination_time
    rel = abs(sim_t - expected) / expected if expected > 0 else abs(sim_t)
    summary = {
        "mode": sim_mode.value,
        "time_step_seconds": dt,
        "simulated_seconds": sim_t,
        "closed_form_seconds": expected,
        "relative_error": rel,
        "trace_points": int(trace.time.size),
    }
    if mode == "ic":
        summary["limit_seconds"] = model.ic_flight_time_limit(cfg.source, cfg.vehicle)

    buf = io.StringIO()
    trace.write_csv(buf)
    if args.out is not None:
        _emit(buf.getvalue(), args.out)
        if args.json:
            return _json(summary)
        return _summary_line(summary) + "\n"
    if args.json:
        summary["trace"] = [dict(zip(simulate.CSV_COLUMNS, row)) for row in trace.rows()]
        return _json(summary)
    return buf.getvalue() + "# " + _summary_line(summary) + "\n"


def _summary_line(s):
    line = (
        f"simulated {format_time(s['simulated_seconds'])}; closed form {format_time(s['closed_form_seconds'])}; "
        f"relative error {s['relative_error']:.3e}"
    )
    if "limit_seconds" in s:
        line += f"; limit {format_time(s['limit_seconds'])}"
    return line


def cmd_required_mass(args):
    cfg = _config(args)
    target = _parse(args.target, "time", "--target")
    if args.n < 1:
        raise CliError(EXIT_INPUT, "-n must be at least 1")
    try:
        mb = model.required_storage_mass(cfg.source, cfg.vehicle, args.n, target)
    except UnreachableTargetError as exc:
        if args.json:
            sys.stdout.write(_json({
                "reachable": False,
                "target_seconds": target,
                "max_seconds": exc.max_seconds,
                "argmax_storage_kg": exc.argmax_mass_kg,
            }))
        raise CliError(
            EXIT_INFEASIBLE,
            f"unreachable target {format_time(target)} with N={args.n}; maximum achievable is "
            f"{format_time(exc.max_seconds)} at {format_grams(exc.argmax_mass_kg)}",
        ) from None
    if args.json:
        return _json({"reachable": True, "target_seconds": target, "required_storage_kg": mb, "stages": args.n})
    return f"required storage mass: {format_grams(mb)} ({mb!r} kg) for {format_time(target)} with N={args.n}\n"


def cmd_limits(args):
    cfg = _config(args)
    limit = model.ic_flight_time_limit(cfg.source, cfg.vehicle)
    out = {"ic_limit_seconds": limit, "ic_limit_minutes": limit / 60.0, "flight_coeff_cT": cfg.vehicle.flight_coeff}
    fuel = _parse(args.total_mass, "mass", "--total-mass") if args.total_mass is not None else None
    if fuel is not None:
        out["ic_flight_time_seconds"] = model.ic_flight_time(cfg.source, cfg.vehicle, fuel)
    if cfg.rocket is not None:
        out["rocket_exhaust_velocity"] = cfg.rocket.exhaust_velocity
        out["rocket_time_scale_seconds"] = 4.0 * cfg.rocket.exhaust_velocity / cfg.rocket.gravity
        if fuel is not None:
            out["rocket_flight_time_seconds"] = model.rocket_flight_time(cfg.rocket, cfg.vehicle.dry_mass_kg, fuel)
    if args.json:
        return _json(out)
    lines = [
        f"flight coefficient c_T: {cfg.vehicle.flight_coeff!r} kg^1.5/W",
        f"continuous-staging limit: {format_time(limit)}",
    ]
    if "ic_flight_time_seconds" in out:
        lines.append(f"continuous staging with {format_grams(fuel)} fuel: {format_time(out['ic_flight_time_seconds'])}")
    if cfg.rocket is not None:
        lines.append(f"rocket exhaust velocity: {cfg.rocket.exhaust_velocity!r} m/s")
        lines.append(f"rocket time scale 4 v_e / g: {format_time(out['rocket_time_scale_seconds'])}")
        if "rocket_flight_time_seconds" in out:
            lines.append(f"rocket hover with {format_grams(fuel)} fuel: {format_time(out['rocket_flight_time_seconds'])}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help=f"vehicle TOML file (default: ${CONFIG_ENV})")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--dry-mass", help="override the config dry mass, e.g. 550g")
    common.add_argument("--specific-energy", help="override the config specific energy, e.g. 120Wh/kg")

    def plan_args(p):
        p.add_argument("--stages", help="stage masses in ejection order, e.g. 190g,135g")
        p.add_argument("--total-mass", help="total storage mass, e.g. 380g")
        p.add_argument("-n", "--n-stages", dest="n", type=int, default=1, help="number of equal stages")

    parser = argparse.ArgumentParser(prog="staged-endurance", description="Hover endurance with staged energy storage.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("flight-time", parents=[common], help="hover time of a stage plan")
    plan_args(p)
    p.set_defaults(func=cmd_flight_time)

    p = sub.add_parser("optimize", parents=[common], help="optimal staging order or mass partition")
    p.add_argument("action", choices=["order", "partition"])
    plan_args(p)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("sweep", parents=[common], help="normalized flight time vs storage fraction")
    p.add_argument("--stages", help="comma-separated stage counts (default 1,2,3,5,10)")
    p.add_argument("--points", type=int, default=512, help="storage-fraction grid size")
    p.add_argument("--gains", action="store_true", help="append the optimal-vs-equal gain table")
    p.add_argument("--no-optimal", action="store_true")
    p.add_argument("--no-continuous", action="store_true")
    p.add_argument("--out", help="output file (default stdout)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("simulate", parents=[common], help="time-stepped mission trace")
    p.add_argument("--mode", choices=["discrete", "ic", "rocket"], default="discrete")
    plan_args(p)
    p.add_argument("--dt", help="time step, e.g. 0.5s (at most 1 s)")
    p.add_argument("--out", help="trace CSV file (default stdout)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("required-mass", parents=[common], help="storage mass needed for a target time")
    p.add_argument("--target", required=True, help="target flight time, e.g. 22.8min")
    p.add_argument("-n", "--n-stages", dest="n", type=int, default=1)
    p.set_defaults(func=cmd_required_mass)

    p = sub.add_parser("limits", parents=[common], help="continuous-staging limit and rocket parameters")
    p.add_argument("--total-mass", help="fuel mass for the continuous and rocket hover times")
    p.set_defaults(func=cmd_limits)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        text = args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (ConfigError, UnitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except DomainError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except StagingError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    if text:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
