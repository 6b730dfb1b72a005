"""Failure-rate functions: diagnostics data -> updated transition parameters.

Two failure classes drive each software system (SwS):

* application failures, rate alpha + stimuli_total * beta (piecewise
  constant between stimuli, read once per window);
* OS failures, an Erlang race whose rate is lambda1 + lambda2 * cpu_load
  and whose remaining stage count shrinks as faults are expected to accrue.

The stage-count rule is a named policy: the accumulated expected fault
count Lambda = integral of the OS rate is subtracted from the initial
budget k0 (floored at 1), since under a Poisson fault stream Lambda is
exactly the expected number of consumed stages.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import floor

from .diagnostics import DiagnosticsWindow
from .stpn import Erlang, Exponential, FailureRaceNet


@dataclass(frozen=True)
class SwsFrfParams:
    """Per-SwS stochastic parameters (software diversity makes them differ)."""

    alpha: float  # base application failure rate, per hour
    beta: float  # application rate increment per received stimulus, per hour
    lambda1: float  # OS fault rate at idle, per hour
    lambda2: float  # OS fault rate increment at full CPU load, per hour
    k0: int  # initial OS fault budget (Erlang stage count)

    def __post_init__(self) -> None:
        for name in ("alpha", "beta", "lambda1", "lambda2"):
            value = getattr(self, name)
            if not (value > 0):
                raise ValueError(f"{name} must be > 0, got {value}")
        if self.k0 < 1 or self.k0 != int(self.k0):
            raise ValueError(f"k0 must be an integer >= 1, got {self.k0}")


# Default parameters for the three diverse SwSs of the 2oo3 case study.
DEFAULT_SWS_PARAMS: dict[str, SwsFrfParams] = {
    "sws1": SwsFrfParams(
        alpha=float(Fraction(1, 8640)),
        beta=float(Fraction(1, 8013)),
        lambda1=float(Fraction(1, 1267)),
        lambda2=float(Fraction(1, 1901)),
        k0=7,
    ),
    "sws2": SwsFrfParams(
        alpha=float(Fraction(1, 14112)),
        beta=float(Fraction(1, 15158)),
        lambda1=float(Fraction(1, 4637)),
        lambda2=float(Fraction(1, 1987)),
        k0=5,
    ),
    "sws3": SwsFrfParams(
        alpha=float(Fraction(1, 5760)),
        beta=float(Fraction(1, 21936)),
        lambda1=float(Fraction(1, 3326)),
        lambda2=float(Fraction(1, 2722)),
        k0=11,
    ),
}


@dataclass(frozen=True)
class SwsHealthState:
    """Aging state of one SwS between rejuvenations.

    ``current_k`` only decreases until a rejuvenation or repair resets it
    to the initial budget.
    """

    current_k: int
    cumulative_fault_intensity: float  # accumulated expected OS fault count
    last_rates: tuple[float, float]  # (application rate, OS rate), per hour

    @classmethod
    def fresh(cls, params: SwsFrfParams) -> "SwsHealthState":
        return cls(
            current_k=params.k0,
            cumulative_fault_intensity=0.0,
            last_rates=(params.alpha, params.lambda1),
        )


def app_rate(params: SwsFrfParams, window: DiagnosticsWindow) -> float:
    """Application failure rate alpha + stimuli_total * beta."""
    return params.alpha + window.stimuli_total * params.beta


def os_lambda(params: SwsFrfParams, window: DiagnosticsWindow) -> float:
    """OS fault rate lambda1 + lambda2 * avg_cpu_load."""
    return params.lambda1 + params.lambda2 * window.avg_cpu_load


def update_health(
    state: SwsHealthState,
    params: SwsFrfParams,
    window: DiagnosticsWindow,
    delta: float,
    reset: bool = False,
) -> SwsHealthState:
    """Accumulate the window's expected OS faults and shrink the stage budget.

    ``reset=True`` re-initializes the state first (rejuvenation or repair
    completed during the window: the SwS restarts with a full budget).
    """
    if delta <= 0:
        raise ValueError(f"window length must be > 0, got {delta}")
    if reset:
        state = SwsHealthState.fresh(params)
    intensity = state.cumulative_fault_intensity + os_lambda(params, window) * delta
    return SwsHealthState(
        current_k=max(1, params.k0 - floor(intensity)),
        cumulative_fault_intensity=intensity,
        last_rates=(app_rate(params, window), os_lambda(params, window)),
    )


def build_net(
    state: SwsHealthState, params: SwsFrfParams, window: DiagnosticsWindow
) -> FailureRaceNet:
    """Unconditioned failure model for the current window's operating point."""
    return FailureRaceNet(
        subsystem_id=window.subsystem_id,
        transitions=(
            ("application", Exponential(app_rate(params, window))),
            ("os", Erlang(state.current_k, os_lambda(params, window))),
        ),
    )


def a_priori_net(subsystem_id: str, params: SwsFrfParams) -> FailureRaceNet:
    """Failure model before any diagnostics data: no stimuli, idle CPU."""
    baseline = DiagnosticsWindow(
        subsystem_id=subsystem_id, window_index=0, stimuli_total=0, avg_cpu_load=0.0
    )
    return build_net(SwsHealthState.fresh(params), params, baseline)
