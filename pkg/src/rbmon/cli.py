"""Command-line entry point.

Subcommands:
  run         simulate the 2oo3 system and monitor it (full artifact set)
  init-curves a-priori reliability curves only
  eval        one-shot metric evaluation on a stored curve CSV
  ab          paired comparison of the rejuvenation policy over many seeds

Exit codes: 0 success, 2 configuration error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import figures, outputs, relcurve
from .config import ConfigError, ScenarioConfig, load_scenario
from .monitor import Monitor, MonitorConfig
from .prognostics import (
    EOL_THRESHOLD,
    PredictionTuple,
    Priority,
    probability_of_failure,
    remaining_useful_life,
    residual_reliability_check,
)
from .simulator import ScenarioRuntimeError, Simulation, ab_compare

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def _error(message: str, code: int) -> int:
    print(json.dumps({"error": message, "exit_code": code}), file=sys.stderr)
    return code


def _load_scenario(args: argparse.Namespace) -> ScenarioConfig:
    if args.scenario:
        scenario = load_scenario(args.scenario)
    else:
        scenario = ScenarioConfig()
    overrides = {}
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    if getattr(args, "duration", None) is not None:
        overrides["duration_hours"] = args.duration
    if overrides:
        from dataclasses import replace

        scenario = replace(scenario, **overrides)
    return scenario


def _monitor_config(scenario: ScenarioConfig, rejuvenation_enabled: bool = True) -> MonitorConfig:
    return MonitorConfig(
        delta=scenario.delta,
        subsystems=dict(scenario.subsystems),
        tuples=scenario.tuples,
        forecast=scenario.forecast(),
        clock_start_hour=scenario.clock_start_hour,
        night_window=scenario.night_window,
        rejuvenation_enabled=rejuvenation_enabled,
        base_fresh_horizon=scenario.base_fresh_horizon,
        max_fresh_horizon=scenario.max_fresh_horizon,
    )


def cmd_run(args: argparse.Namespace) -> int:
    scenario = _load_scenario(args)
    out_dir = Path(args.out)
    sim = Simulation(
        scenario, seed=scenario.seed, rejuvenation_enabled=not args.no_rejuvenation
    )
    trace = sim.run()
    paths = outputs.write_run_outputs(trace, out_dir)
    if args.figures:
        paths["figure_curves"] = figures.plot_snapshot(
            trace.final_snapshot,
            sim.monitor.config,
            out_dir / "reliability_curves.png",
        )
        paths["figure_alarms"] = figures.plot_alarm_timeline(
            trace, out_dir / "alarm_timeline.png"
        )
    avail = trace.availability
    print(
        f"run complete: {trace.duration:.1f} h, seed {trace.seed}, "
        f"availability {avail.uptime_fraction:.6f}, "
        f"{avail.failure_count} failures, {avail.rejuvenation_count} rejuvenations, "
        f"{avail.loss_count} system losses"
    )
    for name, path in sorted(paths.items()):
        print(f"  {name}: {path}")
    return EXIT_OK


def cmd_init_curves(args: argparse.Namespace) -> int:
    scenario = _load_scenario(args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    monitor = Monitor(_monitor_config(scenario))
    curves, system = monitor.a_priori_curves(horizon=args.horizon)
    rows = []
    ids = sorted(curves)
    grid = system.grid
    for m, t in enumerate(grid.times()):
        kind = "observed" if m == 0 else "predicted"
        rows.append((0, t, kind, *(curves[s].values[m] for s in ids), system.values[m]))
    outputs.write_curves_csv(rows, ids, out_dir / "curves.csv")
    for s in ids:
        relcurve.to_csv(curves[s], out_dir / f"curve_{s}.csv")
    relcurve.to_csv(system, out_dir / "curve_system.csv")
    if args.figures:
        figures.plot_initial_curves(curves, system, out_dir / "init_curves.png")
    print(f"a-priori curves written to {out_dir} (horizon {grid.horizon:.1f} h)")
    return EXIT_OK


def cmd_eval(args: argparse.Namespace) -> int:
    curve = relcurve.from_csv(args.curve)
    tup = PredictionTuple(delta_q=args.delta, u_q=args.u, priority=Priority.LOW)
    value, triggered = residual_reliability_check(curve, args.t_now, tup)
    pof = probability_of_failure(curve, args.t_now, args.delta)
    rul = remaining_useful_life(curve, args.t_now)
    report = {
        "t_now": round(args.t_now, 4),
        "delta_hours": round(args.delta, 4),
        "residual_reliability": round(value, 6),
        "residual_threshold": round(args.u, 6),
        "residual_breached": triggered,
        "probability_of_failure": round(pof, 6),
        "rul_hours": round(rul.rul, 4),
        "eol_hours": round(rul.t_eol, 4),
        "rul_censored": rul.censored,
    }
    print(json.dumps(report, sort_keys=True))
    return EXIT_OK


def cmd_ab(args: argparse.Namespace) -> int:
    scenario = _load_scenario(args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    seeds = [scenario.seed + i for i in range(args.seeds)]
    report = ab_compare(scenario, seeds, workers=args.workers)
    outputs.write_ab_csv(report, out_dir / "ab_report.csv")
    if args.figures:
        figures.plot_ab_report(report, out_dir / "ab_report.png")
    print(
        f"ab comparison over {len(seeds)} paired seeds, {report.duration:.1f} h each:\n"
        f"  mean availability rejuvenation-on:  {report.mean_availability_on:.6f}\n"
        f"  mean availability rejuvenation-off: {report.mean_availability_off:.6f}\n"
        f"  pairs with no extra system losses:  {report.loss_dominance:.0%}"
    )
    print(f"  report: {out_dir / 'ab_report.csv'}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rbmon",
        description="Reliability-based monitoring of a 2oo3 software system",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser, with_duration: bool = True) -> None:
        p.add_argument("--scenario", help="scenario YAML file (defaults built in)")
        p.add_argument("--seed", type=int, help="override the scenario seed")
        p.add_argument("--out", default="out", help="output directory")
        if with_duration:
            p.add_argument(
                "--duration", type=float, help="override the run duration in hours"
            )
        p.add_argument(
            "--figures", action="store_true", help="also render PNG figures"
        )

    p_run = sub.add_parser("run", help="simulate and monitor one run")
    add_common(p_run)
    p_run.add_argument(
        "--no-rejuvenation",
        action="store_true",
        help="monitor and alarm, but never dispatch rejuvenations",
    )
    p_run.set_defaults(func=cmd_run)

    p_init = sub.add_parser("init-curves", help="a-priori curves only")
    add_common(p_init, with_duration=False)
    p_init.add_argument(
        "--horizon", type=float, default=None, help="curve horizon in hours"
    )
    p_init.set_defaults(func=cmd_init_curves)

    p_eval = sub.add_parser("eval", help="evaluate metrics on a stored curve")
    p_eval.add_argument("--curve", required=True, help="curve CSV (t_hours,value)")
    p_eval.add_argument("--t-now", dest="t_now", type=float, required=True)
    p_eval.add_argument("--delta", type=float, default=72.0, help="prediction interval")
    p_eval.add_argument("--u", type=float, default=EOL_THRESHOLD)
    p_eval.set_defaults(func=cmd_eval)

    p_ab = sub.add_parser("ab", help="paired policy on/off comparison")
    add_common(p_ab)
    p_ab.add_argument("--seeds", type=int, default=20, help="number of paired seeds")
    p_ab.add_argument("--workers", type=int, default=4)
    p_ab.set_defaults(func=cmd_ab)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        return _error(str(exc), EXIT_CONFIG)
    except (ScenarioRuntimeError, relcurve.CurveError, OSError, ValueError) as exc:
        return _error(str(exc), EXIT_RUNTIME)


if __name__ == "__main__":
    sys.exit(main())
