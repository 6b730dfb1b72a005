"""Reliability curves sampled on a uniform time grid.

A curve is a step function over grid points spaced ``step`` hours apart.
All higher layers (block-diagram evaluation, conditioning, prognostics)
operate on these curves; the splice operations here implement the three
ways a curve history is continued after a monitoring interval: restart
from a fresh curve, hold the last value, or continue the fresh curve
from the time instant whose value matches the history.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

# Relative tolerance used when snapping time arguments to the grid.
_GRID_RTOL = 1e-9


class CurveError(ValueError):
    """Base class for reliability-curve errors."""


class OutOfRangeError(CurveError):
    """A time argument falls outside the curve's domain."""


class GridMismatchError(CurveError):
    """Two curves (or a curve and a time) do not share a compatible grid."""


@dataclass(frozen=True)
class TimeGrid:
    """Uniform sampling grid: points at ``origin + m * step`` for m >= 0.

    ``step`` and ``horizon`` are in hours; ``origin`` is the absolute time
    (hours since system switch-on) of the first sample and is carried as
    metadata only.
    """

    step: float
    horizon: float
    origin: float = 0.0

    def __post_init__(self) -> None:
        if not (self.step > 0):
            raise CurveError(f"grid step must be > 0, got {self.step}")
        if self.horizon < self.step:
            raise CurveError(
                f"grid horizon must be >= step, got horizon={self.horizon} step={self.step}"
            )

    @property
    def n_points(self) -> int:
        return int(math.floor(self.horizon / self.step + _GRID_RTOL)) + 1

    def times(self) -> np.ndarray:
        """Sample times relative to the curve start (t=0 at origin)."""
        return np.arange(self.n_points) * self.step

    def index_of(self, t: float) -> int:
        """Index of the nearest grid point <= t (step-function lookup)."""
        if t < -self.step * _GRID_RTOL or t > self.horizon * (1 + _GRID_RTOL) + _GRID_RTOL:
            raise OutOfRangeError(f"t={t} outside [0, {self.horizon}]")
        idx = int(math.floor(t / self.step + _GRID_RTOL))
        return min(idx, self.n_points - 1)

    def exact_index(self, t: float) -> int:
        """Index of t, requiring t to be a grid point."""
        idx = round(t / self.step)
        if abs(idx * self.step - t) > self.step * 1e-6:
            raise GridMismatchError(f"t={t} is not a multiple of step={self.step}")
        if idx < 0 or idx >= self.n_points:
            raise OutOfRangeError(f"t={t} outside [0, {self.horizon}]")
        return idx

    def compatible_step(self, other: "TimeGrid") -> bool:
        return abs(self.step - other.step) <= self.step * 1e-9

    def with_points(self, n_points: int, origin: float | None = None) -> "TimeGrid":
        """Grid with the same step but ``n_points`` samples."""
        if n_points < 2:
            raise CurveError(f"grid needs at least 2 points, got {n_points}")
        return TimeGrid(
            step=self.step,
            horizon=(n_points - 1) * self.step,
            origin=self.origin if origin is None else origin,
        )


@dataclass(frozen=True)
class ReliabilityCurve:
    """Sampled reliability function; values are probabilities in [0, 1].

    Value arrays are frozen after construction; every operation returns a
    new curve, so instances are safe to share.
    """

    grid: TimeGrid
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1 or len(values) != self.grid.n_points:
            raise CurveError(
                f"expected {self.grid.n_points} samples, got shape {values.shape}"
            )
        if np.any(values < -1e-12) or np.any(values > 1 + 1e-12):
            raise CurveError("curve values must lie in [0, 1]")
        values = np.clip(values, 0.0, 1.0)
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @property
    def step(self) -> float:
        return self.grid.step

    @property
    def horizon(self) -> float:
        return self.grid.horizon

    def eval(self, t: float) -> float:
        """Value at the nearest grid point <= t (step-function semantics)."""
        return float(self.values[self.grid.index_of(t)])

    def eval_clamped(self, t: float) -> float:
        """Like eval, but times beyond the horizon return the last sample."""
        if t > self.horizon:
            return float(self.values[-1])
        return self.eval(t)

    def last_value(self) -> float:
        return float(self.values[-1])

    def restricted(self, horizon: float) -> "ReliabilityCurve":
        """Curve truncated to ``horizon`` (which must be on-grid and covered)."""
        idx = self.grid.exact_index(horizon)
        return ReliabilityCurve(self.grid.with_points(idx + 1), self.values[: idx + 1])


@dataclass(frozen=True)
class CurveKind:
    """Observed/predicted split of a curve at the current time t_split."""

    tag: str  # "observed" or "predicted"
    split_time: float

    def __post_init__(self) -> None:
        if self.tag not in ("observed", "predicted"):
            raise CurveError(f"unknown curve kind {self.tag!r}")


def constant_curve(grid: TimeGrid, value: float) -> ReliabilityCurve:
    return ReliabilityCurve(grid, np.full(grid.n_points, float(value)))


def _check_splice_args(history: ReliabilityCurve, n_delta: float) -> int:
    n_idx = history.grid.exact_index(n_delta)
    return n_idx


def _check_fresh(history: ReliabilityCurve, fresh: ReliabilityCurve) -> None:
    if not history.grid.compatible_step(fresh.grid):
        raise GridMismatchError(
            f"history step {history.step} != fresh step {fresh.step}"
        )


def splice_restore(
    history: ReliabilityCurve, fresh: ReliabilityCurve, n_delta: float
) -> ReliabilityCurve:
    """History up to n_delta, then the fresh curve restarted from zero.

    Used when the subsystem was rejuvenated (or repaired) during the
    interval ending at n_delta: its reliability restarts on the fresh
    unconditioned curve.
    """
    _check_fresh(history, fresh)
    n_idx = _check_splice_args(history, n_delta)
    head = history.values[: n_idx + 1]
    # The fresh sample at offset 0 coincides with the history sample at
    # n_delta in time; result keeps the history value there and takes the
    # fresh curve strictly after.
    tail = fresh.values[1:]
    values = np.concatenate([head, tail])
    grid = history.grid.with_points(len(values))
    return ReliabilityCurve(grid, values)


def splice_freeze(history: ReliabilityCurve, n_delta: float) -> ReliabilityCurve:
    """History up to n_delta, then constant at history(n_delta)."""
    n_idx = _check_splice_args(history, n_delta)
    values = np.array(history.values)
    values[n_idx + 1 :] = values[n_idx]
    return ReliabilityCurve(history.grid, values)


def match_time(fresh: ReliabilityCurve, target: float, delta: float) -> float:
    """Time t' = b*delta on the fresh curve whose value is closest to target.

    Searches all multiples of delta within the horizon; ties are broken
    toward the smallest b, so a flat stretch at the target value yields
    the earliest matching instant.
    """
    if not (0.0 <= target <= 1.0):
        raise CurveError(f"target must be a probability, got {target}")
    stride = round(delta / fresh.step)
    if stride < 1 or abs(stride * fresh.step - delta) > fresh.step * 1e-6:
        raise GridMismatchError(
            f"delta={delta} is not a positive multiple of step={fresh.step}"
        )
    candidates = fresh.values[::stride]
    if len(candidates) == 0:
        raise OutOfRangeError("empty search range for match_time")
    b = int(np.argmin(np.abs(candidates - target)))  # argmin takes the first tie
    return b * delta


def splice_conserve(
    history: ReliabilityCurve,
    fresh: ReliabilityCurve,
    n_delta: float,
    delta: float,
) -> ReliabilityCurve:
    """History up to n_delta, then the fresh curve shifted to preserve value.

    The fresh curve is entered at t' = match_time(fresh, history(n_delta)),
    so the spliced curve continues without a jump (up to one grid step of
    local variation of the fresh curve).
    """
    _check_fresh(history, fresh)
    n_idx = _check_splice_args(history, n_delta)
    target = float(history.values[n_idx])
    t_shift = match_time(fresh, target, delta)
    shift_idx = fresh.grid.exact_index(t_shift)
    head = history.values[: n_idx + 1]
    tail = fresh.values[shift_idx + 1 :]
    values = np.concatenate([head, tail])
    if len(values) < 2:
        values = np.concatenate([values, values[-1:]])
    grid = history.grid.with_points(len(values))
    return ReliabilityCurve(grid, values)


def to_csv(curve: ReliabilityCurve, path: str | Path) -> None:
    """Write the curve as ``t_hours,value`` rows (times 4 dp, values 6 dp)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t_hours", "value"])
        for t, v in zip(curve.grid.times(), curve.values):
            writer.writerow([f"{t:.4f}", f"{v:.6f}"])


def from_csv(path: str | Path) -> ReliabilityCurve:
    """Read a curve written by :func:`to_csv`; the grid must be uniform."""
    times: list[float] = []
    values: list[float] = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["t_hours", "value"]:
            raise CurveError(f"unexpected curve CSV header: {header}")
        for row in reader:
            times.append(float(row[0]))
            values.append(float(row[1]))
    if len(times) < 2:
        raise CurveError("curve CSV needs at least two samples")
    steps = np.diff(times)
    step = float(steps[0])
    if np.any(np.abs(steps - step) > step * 1e-6):
        raise GridMismatchError("curve CSV samples are not uniformly spaced")
    grid = TimeGrid(step=step, horizon=times[-1] - times[0], origin=times[0])
    return ReliabilityCurve(grid, np.array(values))
