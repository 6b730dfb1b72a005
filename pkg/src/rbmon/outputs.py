"""Run artifacts: delimited curve/metric files and JSONL logs.

All times are written with 4 decimals and probabilities with 6, and rows
are emitted in a fixed order, so two runs with the same seed produce
byte-identical files.
"""

from __future__ import annotations

import json
from pathlib import Path

from .simulator import AbReport, SimulationTrace


def _fmt_time(t: float) -> str:
    return f"{t:.4f}"


def _fmt_prob(p: float) -> str:
    return f"{p:.6f}"


def write_curves_csv(rows: list[tuple], sws_ids: list[str], path: Path) -> None:
    """``step,t_hours,kind,<sws...>,system`` rows; one block per recorded step."""
    with open(path, "w", newline="") as fh:
        fh.write("step,t_hours,kind," + ",".join(sws_ids) + ",system\n")
        for step, t, kind, *values in rows:
            fh.write(
                f"{step},{_fmt_time(t)},{kind},"
                + ",".join(_fmt_prob(v) for v in values)
                + "\n"
            )


def write_events_jsonl(trace: SimulationTrace, path: Path) -> None:
    with open(path, "w") as fh:
        for event in trace.events:
            fh.write(json.dumps(event.to_dict(), sort_keys=True) + "\n")


def write_alarms_jsonl(trace: SimulationTrace, path: Path) -> None:
    with open(path, "w") as fh:
        for alarm in trace.alarms:
            fh.write(json.dumps(alarm.to_dict(), sort_keys=True) + "\n")


_SUMMARY_PROB_COLUMNS = ("r_system", "r_system_prev_prediction")


def write_summary_csv(trace: SimulationTrace, sws_ids: list[str], path: Path) -> None:
    """Per-step metrics plus run-level availability columns."""
    prob_cols = [f"r_{s}" for s in sws_ids] + list(_SUMMARY_PROB_COLUMNS)
    columns = (
        ["step", "t_hours", "mode"]
        + prob_cols
        + [
            "rul_system_hours",
            "rul_censored",
            "new_alarms",
            "active_alarms",
            "pending_plans",
            "availability",
            "system_losses",
        ]
    )
    avail = trace.availability
    with open(path, "w", newline="") as fh:
        fh.write(",".join(columns) + "\n")
        for row in trace.step_metrics:
            cells = [
                str(row["step"]),
                _fmt_time(row["t_hours"]),
                row["mode"],
            ]
            cells.extend(_fmt_prob(row[c]) for c in prob_cols)
            cells.append(_fmt_time(row["rul_system_hours"]))
            cells.append("1" if row["rul_censored"] else "0")
            cells.append(str(row["new_alarms"]))
            cells.append(str(row["active_alarms"]))
            cells.append(str(row["pending_plans"]))
            cells.append(_fmt_prob(avail.uptime_fraction))
            cells.append(str(avail.loss_count))
            fh.write(",".join(cells) + "\n")


def write_plans_jsonl(trace: SimulationTrace, path: Path) -> None:
    with open(path, "w") as fh:
        for plan in trace.plans:
            fh.write(json.dumps(plan.to_dict(), sort_keys=True) + "\n")


def write_ab_csv(report: AbReport, path: Path) -> None:
    columns = [
        "seed",
        "availability_rbm",
        "availability_baseline",
        "losses_rbm",
        "losses_baseline",
        "failures_rbm",
        "failures_baseline",
        "rejuvenations",
    ]
    with open(path, "w", newline="") as fh:
        fh.write(",".join(columns) + "\n")
        for p in report.pairs:
            fh.write(
                f"{p.seed},{_fmt_prob(p.availability_on)},{_fmt_prob(p.availability_off)},"
                f"{p.losses_on},{p.losses_off},{p.failures_on},{p.failures_off},"
                f"{p.rejuvenations}\n"
            )


def write_run_outputs(trace: SimulationTrace, out_dir: Path) -> dict[str, Path]:
    """The full artifact set for one monitored run."""
    out_dir.mkdir(parents=True, exist_ok=True)
    sws_ids = sorted(trace.final_snapshot.curves)
    paths = {
        "curves": out_dir / "curves.csv",
        "alarms": out_dir / "alarms.jsonl",
        "events": out_dir / "events.jsonl",
        "summary": out_dir / "summary.csv",
        "plans": out_dir / "plans.jsonl",
    }
    write_curves_csv(trace.curve_rows, sws_ids, paths["curves"])
    write_alarms_jsonl(trace, paths["alarms"])
    write_events_jsonl(trace, paths["events"])
    write_summary_csv(trace, sws_ids, paths["summary"])
    write_plans_jsonl(trace, paths["plans"])
    return paths
