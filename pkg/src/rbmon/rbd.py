"""Reliability block diagrams and mode-of-operation tracking.

The system structure per mode of operation is a tree of series, parallel
and k-out-of-n blocks over subsystem leaves. Evaluation is exact: the
k-out-of-n case uses the probability-generating recursion over children
rather than sampling, so results are reference-grade for the oracles.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Union

import numpy as np

from .diagnostics import (
    DiagnosticsEvent,
    EventConsistencyError,
    EventKind,
    sort_events,
)
from .relcurve import GridMismatchError, ReliabilityCurve


class UnresolvedLeafError(KeyError):
    """A leaf's subsystem id is missing from the supplied value map."""


@dataclass(frozen=True)
class Leaf:
    subsystem_id: str


@dataclass(frozen=True)
class Series:
    children: tuple["RbdNode", ...]

    def __post_init__(self) -> None:
        if len(self.children) < 1:
            raise ValueError("series block needs at least one child")
        object.__setattr__(self, "children", tuple(self.children))


@dataclass(frozen=True)
class Parallel:
    children: tuple["RbdNode", ...]

    def __post_init__(self) -> None:
        if len(self.children) < 1:
            raise ValueError("parallel block needs at least one child")
        object.__setattr__(self, "children", tuple(self.children))


@dataclass(frozen=True)
class KOfN:
    k: int
    children: tuple["RbdNode", ...]

    def __post_init__(self) -> None:
        n = len(self.children)
        if not (1 <= self.k <= n):
            raise ValueError(f"k-of-n requires 1 <= k <= n, got k={self.k} n={n}")
        object.__setattr__(self, "children", tuple(self.children))


RbdNode = Union[Leaf, Series, Parallel, KOfN]


def leaf_ids(node: RbdNode) -> list[str]:
    if isinstance(node, Leaf):
        return [node.subsystem_id]
    ids: list[str] = []
    for child in node.children:
        ids.extend(leaf_ids(child))
    return ids


def validate_rbd(node: RbdNode) -> None:
    """Check the one structural invariant not local to a block: distinct leaves."""
    ids = leaf_ids(node)
    if len(set(ids)) != len(ids):
        raise ValueError(f"duplicate subsystem leaves in RBD: {ids}")


def eval_point(node: RbdNode, leaf_values: Mapping[str, float]):
    """System reliability from per-subsystem values (scalars or arrays).

    series: product; parallel: 1 - prod(1 - r); k-of-n: exact probability
    that at least k independent children function.
    """
    if isinstance(node, Leaf):
        try:
            value = leaf_values[node.subsystem_id]
        except KeyError:
            raise UnresolvedLeafError(
                f"no value for subsystem {node.subsystem_id!r}"
            ) from None
        arr = np.asarray(value, dtype=float)
        if np.any(arr < 0) or np.any(arr > 1):
            raise ValueError(f"leaf value for {node.subsystem_id!r} outside [0, 1]")
        return value
    if isinstance(node, Series):
        result = 1.0
        for child in node.children:
            result = result * eval_point(child, leaf_values)
        return result
    if isinstance(node, Parallel):
        miss = 1.0
        for child in node.children:
            miss = miss * (1.0 - eval_point(child, leaf_values))
        return 1.0 - miss
    if isinstance(node, KOfN):
        # counts[j] = P(exactly j of the children seen so far function)
        counts = [1.0]
        for child in node.children:
            p = eval_point(child, leaf_values)
            nxt = [counts[0] * (1.0 - p)]
            for j in range(1, len(counts)):
                nxt.append(counts[j] * (1.0 - p) + counts[j - 1] * p)
            nxt.append(counts[-1] * p)
            counts = nxt
        result = 0.0
        for j in range(node.k, len(counts)):
            result = result + counts[j]
        return np.clip(result, 0.0, 1.0) if isinstance(result, np.ndarray) else min(
            max(result, 0.0), 1.0
        )
    raise TypeError(f"unknown RBD node {node!r}")


def eval_curve(
    node: RbdNode, leaf_curves: Mapping[str, ReliabilityCurve]
) -> ReliabilityCurve:
    """Pointwise eval_point over a shared grid."""
    curves = list(leaf_curves.values())
    if not curves:
        raise UnresolvedLeafError("no leaf curves supplied")
    grid = curves[0].grid
    for curve in curves[1:]:
        if not curve.grid.compatible_step(grid) or curve.grid.n_points != grid.n_points:
            raise GridMismatchError("leaf curves must share one grid")
    values = eval_point(node, {k: c.values for k, c in leaf_curves.items()})
    return ReliabilityCurve(grid, np.asarray(values, dtype=float))


def two_out_of_three(ids: tuple[str, str, str]) -> RbdNode:
    return KOfN(2, tuple(Leaf(i) for i in ids))


def series_of(ids: tuple[str, ...]) -> RbdNode:
    return Series(tuple(Leaf(i) for i in ids))


OPERATING = "operating"
DEGRADED = "degraded"
LOST = "lost"


@dataclass(frozen=True)
class ModeOfOperation:
    """Current mode: which subsystems are down decides the applicable RBD."""

    all_ids: tuple[str, ...]
    down: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        unknown = self.down - set(self.all_ids)
        if unknown:
            raise ValueError(f"down set references unknown subsystems {unknown}")

    @property
    def kind(self) -> str:
        n_down = len(self.down)
        if n_down == 0:
            return OPERATING
        if len(self.all_ids) - n_down >= 2:
            return DEGRADED
        return LOST

    @property
    def id(self) -> str:
        if self.kind == OPERATING:
            return OPERATING
        tag = ",".join(sorted(self.down))
        return f"{self.kind}({tag})"

    @property
    def rbd(self) -> RbdNode | None:
        """RBD over the currently available subsystems; None once lost."""
        if self.kind == OPERATING:
            return two_out_of_three(tuple(self.all_ids))  # type: ignore[arg-type]
        if self.kind == DEGRADED:
            up = tuple(i for i in self.all_ids if i not in self.down)
            return series_of(up)
        return None

    def participating(self) -> tuple[str, ...]:
        if self.kind == LOST:
            return ()
        return tuple(i for i in self.all_ids if i not in self.down)


def select_mode(
    current: ModeOfOperation, events: list[DiagnosticsEvent]
) -> ModeOfOperation:
    """Fold the interval's events into the next mode of operation.

    A shutdown (or startup timeout) marks its subsystem down; a power-on
    marks it up again. Losing a second subsystem while degraded yields the
    terminal lost mode; a later power-on restores degraded operation.
    """
    down = set(current.down)
    for event in sort_events(events):
        sws = event.subsystem_id
        if sws not in current.all_ids:
            raise EventConsistencyError(f"event for unknown subsystem {sws!r}")
        if event.kind in (EventKind.SHUTDOWN, EventKind.STARTUP_TIMEOUT):
            if sws in down:
                raise EventConsistencyError(
                    f"{event.kind.value} of already-down subsystem {sws!r} at t={event.timestamp}"
                )
            down.add(sws)
        elif event.kind is EventKind.POWER_ON:
            if sws not in down:
                raise EventConsistencyError(
                    f"power_on of already-running subsystem {sws!r} at t={event.timestamp}"
                )
            down.discard(sws)
    return ModeOfOperation(all_ids=current.all_ids, down=frozenset(down))
