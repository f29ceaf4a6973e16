"""Shared time-integration plumbing: config, trajectories, CFL guard.

Both solvers use the same two-stage additive scheme ("ARS-CN2"):
Crank-Nicolson on the stiff constant-coefficient part, explicit midpoint
(RK2) on the remainder.  With L the stiff operator and N the remainder,

    (I - dt/2 L) y*      = y_n + dt/2 N(y_n)
    (I - dt/2 L) y_{n+1} = y_n + dt   N(y*) + dt/2 L y_n

which is formally second order and an exact fixed point at rest states.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any, Callable, Iterable

import numpy as np

from .errors import ConfigError, StateError
from .grid import GridSpec, VectorField

if TYPE_CHECKING:  # pragma: no cover
    from .diagnostics import DissipationReport, EnergyReport

SCHEME_NAME = "ARS-CN2"
CFL_SAFETY = 2.0


@dataclass(frozen=True)
class ImexConfig:
    dt: float
    t_end: float
    scheme: str = SCHEME_NAME
    callback_stride: int = 1

    def __post_init__(self):
        if not self.dt > 0:
            raise ConfigError(f"dt must be positive, got {self.dt}")
        if self.t_end < 0:
            raise ConfigError(f"t_end must be nonnegative, got {self.t_end}")
        if self.scheme != SCHEME_NAME:
            raise ConfigError(f"unknown scheme {self.scheme!r}; only {SCHEME_NAME}")
        if self.callback_stride < 1:
            raise ConfigError("callback_stride must be at least 1")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))


@dataclass(frozen=True)
class DiagnosticRecord:
    """Per-sample diagnostics recorded along a trajectory."""

    time: float
    energy: "EnergyReport"
    dissipation: "DissipationReport"
    div_u_h1: float
    pprime_grad_phi_h1: float
    max_abs_u: float
    state_max_abs: float


@dataclass
class Trajectory:
    times: list[float] = field(default_factory=list)
    records: list[DiagnosticRecord] = field(default_factory=list)
    snapshots: list[tuple[float, Any]] = field(default_factory=list)

    def append(self, record: DiagnosticRecord) -> None:
        if self.times and record.time <= self.times[-1]:
            raise StateError("trajectory times must be strictly increasing")
        self.times.append(record.time)
        self.records.append(record)


def cfl_limit(u: VectorField, grid: GridSpec, safety: float = 1.0) -> float:
    """Largest admissible dt: 0.5*dx / max(1, safety*max|u|)."""
    speed = max(float(np.max(np.abs(c.values))) for c in u.components)
    return 0.5 * grid.spacing / max(1.0, safety * speed)


def check_cfl(dt: float, u: VectorField, grid: GridSpec, safety: float = 1.0,
              time: float | None = None) -> None:
    limit = cfl_limit(u, grid, safety)
    if dt > limit:
        where = "" if time is None else f" at t={time:.6g}"
        raise StateError(
            f"dt={dt:.3e} violates the advective CFL guard (limit {limit:.3e}){where}"
        )


def sample_steps(n_steps: int, stride: int) -> set[int]:
    """Step indices at which callbacks fire (always includes the last)."""
    steps = set(range(stride, n_steps + 1, stride))
    if n_steps > 0:
        steps.add(n_steps)
    return steps


Observer = Callable[[Any], None]


def notify(observers: Iterable[Observer], state) -> None:
    for obs in observers:
        obs(state)
