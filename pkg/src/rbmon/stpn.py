"""Failure-race nets: competing timed transitions from working to failed.

Each subsystem's failure model is a race between independently timed
transitions (one token in the working place; the first transition to fire
kills the subsystem). For this class the transient reliability has the
closed form R(t) = prod_k S_k(t) over the transitions' survival functions,
so no state-space solver is needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .relcurve import ReliabilityCurve, TimeGrid


@dataclass(frozen=True)
class Exponential:
    rate: float  # per hour

    def __post_init__(self) -> None:
        if not (self.rate > 0):
            raise ValueError(f"exponential rate must be > 0, got {self.rate}")

    def survival(self, t: np.ndarray | float) -> np.ndarray | float:
        return np.exp(-self.rate * np.asarray(t, dtype=float))

    def sample(self, rng: np.random.Generator, size: int | None = None):
        return rng.exponential(1.0 / self.rate, size=size)


@dataclass(frozen=True)
class Erlang:
    """Sum of k exponential stages of the same rate."""

    k: int
    rate: float  # per hour

    def __post_init__(self) -> None:
        if self.k < 1 or self.k != int(self.k):
            raise ValueError(f"erlang stage count must be an integer >= 1, got {self.k}")
        if not (self.rate > 0):
            raise ValueError(f"erlang rate must be > 0, got {self.rate}")

    def survival(self, t: np.ndarray | float) -> np.ndarray | float:
        return _erlang_survival(self.k, self.rate, t)

    def sample(self, rng: np.random.Generator, size: int | None = None):
        return rng.gamma(self.k, 1.0 / self.rate, size=size)


@dataclass(frozen=True)
class Weibull:
    shape: float
    scale: float  # hours

    def __post_init__(self) -> None:
        if not (self.shape > 0 and self.scale > 0):
            raise ValueError(
                f"weibull shape and scale must be > 0, got {self.shape}, {self.scale}"
            )

    def survival(self, t: np.ndarray | float) -> np.ndarray | float:
        t = np.asarray(t, dtype=float)
        return np.exp(-np.power(t / self.scale, self.shape))

    def sample(self, rng: np.random.Generator, size: int | None = None):
        return self.scale * rng.weibull(self.shape, size=size)


@dataclass(frozen=True)
class Deterministic:
    d: float  # hours

    def __post_init__(self) -> None:
        if self.d < 0:
            raise ValueError(f"deterministic delay must be >= 0, got {self.d}")

    def survival(self, t: np.ndarray | float) -> np.ndarray | float:
        t = np.asarray(t, dtype=float)
        return (t < self.d).astype(float)

    def sample(self, rng: np.random.Generator, size: int | None = None):
        if size is None:
            return self.d
        return np.full(size, self.d)


FiringDistribution = Union[Exponential, Erlang, Weibull, Deterministic]


def _erlang_survival(k: int, rate: float, t: np.ndarray | float):
    """P(Erlang(k, rate) > t) = sum_{m<k} Poisson(rate*t) pmf at m.

    Terms are accumulated in log space so large rate*t cannot overflow the
    (rate*t)^m factor.
    """
    t_arr = np.asarray(t, dtype=float)
    scalar = t_arr.ndim == 0
    x = rate * np.atleast_1d(t_arr)
    out = np.ones_like(x)
    pos = x > 0
    if np.any(pos):
        xp = x[pos][:, None]
        m = np.arange(k, dtype=float)
        log_fact = np.array([math.lgamma(v + 1.0) for v in m])
        logs = -xp + m * np.log(xp) - log_fact
        peak = logs.max(axis=1, keepdims=True)
        out[pos] = np.exp(peak[:, 0] + np.log(np.exp(logs - peak).sum(axis=1)))
    out = np.clip(out, 0.0, 1.0)
    return float(out[0]) if scalar else out


def survival(dist: FiringDistribution, t: np.ndarray | float):
    """Survival function of a firing distribution at time t (hours)."""
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0):
        raise ValueError("survival is defined for t >= 0")
    return dist.survival(t)


@dataclass(frozen=True)
class FailureRaceNet:
    """Race between named transitions; the first firing fails the subsystem."""

    subsystem_id: str
    transitions: tuple[tuple[str, FiringDistribution], ...]

    def __post_init__(self) -> None:
        if len(self.transitions) == 0:
            raise ValueError("failure race needs at least one transition")
        names = [name for name, _ in self.transitions]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate transition names: {names}")
        object.__setattr__(self, "transitions", tuple(self.transitions))


def transient_reliability(net: FailureRaceNet, grid: TimeGrid) -> ReliabilityCurve:
    """Probability that no transition has fired by each grid time."""
    t = grid.times()
    values = np.ones_like(t)
    for _, dist in net.transitions:
        values = values * dist.survival(t)
    return ReliabilityCurve(grid, values)


def sample_failure_time(
    net: FailureRaceNet, rng: np.random.Generator
) -> tuple[float, str]:
    """Draw one failure time: the minimum over per-transition firing draws."""
    best_t = math.inf
    best_name = net.transitions[0][0]
    for name, dist in net.transitions:
        t = float(dist.sample(rng))
        if t < best_t:
            best_t = t
            best_name = name
    return best_t, best_name


def sample_failure_times(
    net: FailureRaceNet, rng: np.random.Generator, n: int
) -> np.ndarray:
    """Vectorized batch of failure-time draws (for Monte Carlo checks)."""
    draws = np.empty((len(net.transitions), n))
    for i, (_, dist) in enumerate(net.transitions):
        draws[i] = dist.sample(rng, size=n)
    return draws.min(axis=0)
