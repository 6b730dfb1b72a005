"""Figure rendering for run reports.

Renders the reliability-curve picture the monitor maintains (observed
solid, predicted dashed, the 1/e threshold, the prediction instants) and
the paired availability comparison, as PNG files next to the CSV output.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .monitor import MonitorConfig, MonitorSnapshot
from .prognostics import EOL_THRESHOLD
from .simulator import AbReport, SimulationTrace

_SWS_COLORS = ["tab:blue", "tab:green", "tab:orange"]


def plot_snapshot(
    snapshot: MonitorSnapshot,
    config: MonitorConfig,
    path: Path,
    title: str | None = None,
) -> Path:
    """Observed/predicted curves of every SwS and the system at one step."""
    t_now = snapshot.t_now
    horizon = min(
        t_now + config.coverage,
        min(c.horizon for c in snapshot.curves.values()),
        snapshot.system_curve.horizon,
    )
    fig, ax = plt.subplots(figsize=(10, 5))
    series = [(s, snapshot.curves[s]) for s in sorted(snapshot.curves)]
    series.append(("system", snapshot.system_curve))
    for i, (name, curve) in enumerate(series):
        color = "tab:red" if name == "system" else _SWS_COLORS[i % len(_SWS_COLORS)]
        t = curve.grid.times()
        mask_obs = t <= t_now + 1e-9
        mask_pred = (t > t_now - 1e-9) & (t <= horizon + 1e-9)
        ax.plot(t[mask_obs], curve.values[mask_obs], color=color, label=name)
        ax.plot(
            t[mask_pred], curve.values[mask_pred], color=color, linestyle="--", alpha=0.8
        )
    ax.axhline(EOL_THRESHOLD, color="black", linestyle="--", linewidth=1, label="1/e threshold")
    marks = [t_now] + [t_now + tup.delta_q for tup in config.tuples]
    for tm in marks:
        if tm <= horizon:
            ax.axvline(tm, color="gray", alpha=0.5, linewidth=1)
    for tup in config.tuples:
        tp = t_now + tup.delta_q
        if tp <= snapshot.system_curve.horizon:
            ax.plot(
                [tp], [snapshot.system_curve.eval(tp)], "s", color="tab:red", markersize=5
            )
    ax.set_xlim(0, horizon)
    ax.set_ylim(0, 1.02)
    ax.set_xlabel("time since switch-on (h)")
    ax.set_ylabel("reliability")
    ax.set_title(title or f"reliability after {t_now:.1f} h")
    ax.legend(loc="lower left", fontsize=8)
    ax.grid(True, linestyle=":", alpha=0.6)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_initial_curves(
    curves: dict, system_curve, path: Path, title: str = "a-priori reliability"
) -> Path:
    fig, ax = plt.subplots(figsize=(10, 5))
    for i, (name, curve) in enumerate(sorted(curves.items())):
        ax.plot(
            curve.grid.times(),
            curve.values,
            color=_SWS_COLORS[i % len(_SWS_COLORS)],
            label=name,
        )
    ax.plot(
        system_curve.grid.times(), system_curve.values, color="tab:red", label="system"
    )
    ax.axhline(EOL_THRESHOLD, color="black", linestyle="--", linewidth=1, label="1/e threshold")
    ax.set_xlabel("time since switch-on (h)")
    ax.set_ylabel("reliability")
    ax.set_title(title)
    ax.set_ylim(0, 1.02)
    ax.legend(loc="upper right", fontsize=8)
    ax.grid(True, linestyle=":", alpha=0.6)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_alarm_timeline(trace: SimulationTrace, path: Path) -> Path:
    """System reliability at each step with alarm raise marks."""
    t = [row["t_hours"] for row in trace.step_metrics]
    r = [row["r_system"] for row in trace.step_metrics]
    fig, ax = plt.subplots(figsize=(10, 4))
    ax.plot(t, r, color="tab:red", label="system reliability at t")
    ax.axhline(EOL_THRESHOLD, color="black", linestyle="--", linewidth=1)
    palette = {"low": "tab:blue", "medium": "tab:orange", "high": "tab:red"}
    seen = set()
    for alarm in trace.alarms:
        label = f"{alarm.priority.label} alarm"
        ax.axvline(
            alarm.raised_at,
            color=palette[alarm.priority.label],
            alpha=0.6,
            linestyle=":",
            label=label if label not in seen else None,
        )
        seen.add(label)
    ax.set_xlabel("time since switch-on (h)")
    ax.set_ylabel("reliability")
    ax.set_ylim(0, 1.02)
    ax.set_title(f"{trace.scenario_name}: seed {trace.seed}")
    ax.legend(loc="lower left", fontsize=8)
    ax.grid(True, linestyle=":", alpha=0.6)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_ab_report(report: AbReport, path: Path) -> Path:
    seeds = [p.seed for p in report.pairs]
    on = [p.availability_on for p in report.pairs]
    off = [p.availability_off for p in report.pairs]
    x = np.arange(len(seeds))
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(12, 4))
    width = 0.4
    ax1.bar(x - width / 2, on, width, label="rejuvenation on", color="tab:green")
    ax1.bar(x + width / 2, off, width, label="rejuvenation off", color="tab:gray")
    ax1.set_xlabel("seed index")
    ax1.set_ylabel("availability")
    lo = min(min(on), min(off))
    ax1.set_ylim(max(0.0, lo - 0.01), 1.0005)
    ax1.legend(fontsize=8)
    ax1.set_title(
        f"mean availability: {report.mean_availability_on:.6f} on / "
        f"{report.mean_availability_off:.6f} off"
    )
    losses_on = [p.losses_on for p in report.pairs]
    losses_off = [p.losses_off for p in report.pairs]
    ax2.scatter(losses_off, losses_on, alpha=0.6)
    top = max(max(losses_on), max(losses_off), 1)
    ax2.plot([0, top], [0, top], color="black", linewidth=1, linestyle="--")
    ax2.set_xlabel("system losses, rejuvenation off")
    ax2.set_ylabel("system losses, rejuvenation on")
    ax2.set_title(f"loss dominance: {report.loss_dominance:.0%} of pairs")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
