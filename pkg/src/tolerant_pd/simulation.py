"""Trajectory integration and seeded ensemble runs for the replicator field.

The native scheme is forward Euler with step 1, which is stable here
because the field never exceeds a few hundredths in magnitude at moderate
parameters; a classical Runge-Kutta integrator at a small step serves as
the accuracy reference.  Ensembles draw their initial frequencies up
front, in index order, from a seeded generator, so results are
reproducible under any execution order.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .analysis import FixedPoint, classify_regime
from .game import DEFAULT_TOL, InteractionStrength, ReducedGame, ReplicatorModel


class TerminalStatus(Enum):
    CONVERGED = "converged"
    ABSORBED_AT_BOUNDARY = "absorbed-at-boundary"
    MAX_STEPS_REACHED = "max-steps-reached"


@dataclass(frozen=True)
class IntegratorConfig:
    """Scheme selection and stopping rules.

    method "euler" is the model's native update x(t) = x(t-1) + xdot*dt
    with dt defaulting to 1; "rk4" is the classical fourth-order scheme.
    Integration stops when the per-step change falls below tol, when the
    state lands within DEFAULT_TOL of a boundary, or at max_steps.
    """

    method: str = "euler"
    dt: float = 1.0
    max_steps: int = 100_000
    tol: float = 1e-8
    stride: int = 1

    def __post_init__(self) -> None:
        if self.method not in ("euler", "rk4"):
            raise ValueError(f"method must be 'euler' or 'rk4', got {self.method!r}")
        if not self.dt > 0.0:
            raise ValueError(f"step size must be positive, got {self.dt}")
        if self.max_steps < 1:
            raise ValueError(f"max_steps must be at least 1, got {self.max_steps}")
        if self.tol < 0.0:
            raise ValueError(f"convergence tolerance must be non-negative, got {self.tol}")
        if self.stride < 1:
            raise ValueError(f"recording stride must be at least 1, got {self.stride}")


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Recorded (t, x) samples of one integration, plus how it ended."""

    t: np.ndarray
    x: np.ndarray
    status: TerminalStatus

    @property
    def final_x(self) -> float:
        return float(self.x[-1])


def _clamp01(x: float) -> float:
    # one Euler step from near a boundary can overshoot by rounding; the
    # continuous dynamics cannot leave [0, 1]
    if x < 0.0:
        return 0.0
    if x > 1.0:
        return 1.0
    return x


def step_euler(model: ReplicatorModel, x: float, dt: float = 1.0) -> float:
    """One forward-Euler step x + dt*xdot, clamped to [0, 1]."""
    x = float(x)
    return _clamp01(x + dt * model.replicator_velocity(x))


def step_rk4(model: ReplicatorModel, x: float, dt: float) -> float:
    """One classical Runge-Kutta step, clamped to [0, 1]."""
    x = float(x)
    v = model.replicator_velocity
    k1 = v(x)
    k2 = v(x + 0.5 * dt * k1)
    k3 = v(x + 0.5 * dt * k2)
    k4 = v(x + dt * k3)
    return _clamp01(x + dt * (k1 + 2.0 * (k2 + k3) + k4) / 6.0)


def integrate(
    model: ReplicatorModel, x0: float, config: IntegratorConfig = IntegratorConfig()
) -> Trajectory:
    """Integrate from x0 until convergence, boundary absorption, or the step cap.

    Samples are recorded every config.stride steps; the initial and
    terminal states are always included.
    """
    x0 = float(x0)
    if not 0.0 <= x0 <= 1.0:
        raise ValueError(f"initial frequency must lie in [0, 1], got {x0}")
    velocity = model.velocity_function()
    dt = config.dt

    if config.method == "euler":

        def advance(x: float) -> float:
            return _clamp01(x + dt * velocity(x))

    else:

        def advance(x: float) -> float:
            k1 = velocity(x)
            k2 = velocity(x + 0.5 * dt * k1)
            k3 = velocity(x + 0.5 * dt * k2)
            k4 = velocity(x + dt * k3)
            return _clamp01(x + dt * (k1 + 2.0 * (k2 + k3) + k4) / 6.0)

    times = [0.0]
    states = [x0]
    x = x0
    t = 0.0
    status = None
    for step in range(1, config.max_steps + 1):
        x_next = advance(x)
        t = step * dt
        recorded = step % config.stride == 0
        if recorded:
            times.append(t)
            states.append(x_next)
        if abs(x_next - x) < config.tol:
            status = TerminalStatus.CONVERGED
        elif x_next <= DEFAULT_TOL or x_next >= 1.0 - DEFAULT_TOL:
            status = TerminalStatus.ABSORBED_AT_BOUNDARY
        x = x_next
        if status is not None:
            if not recorded:
                times.append(t)
                states.append(x)
            break
    if status is None:
        status = TerminalStatus.MAX_STEPS_REACHED
        if times[-1] != t:
            times.append(t)
            states.append(x)
    return Trajectory(t=np.asarray(times), x=np.asarray(states), status=status)


@dataclass(frozen=True)
class EnsembleConfig:
    """A batch of independent runs of one model from random initial states."""

    strength: InteractionStrength
    r: float = 0.2
    members: int = 50
    seed: int = 0

    def __post_init__(self) -> None:
        ReducedGame(self.r)
        if self.members < 1:
            raise ValueError(f"ensemble needs at least one member, got {self.members}")


@dataclass(frozen=True, eq=False)
class EnsembleResult:
    """Trajectories plus terminal binning against the analytic fixed points.

    bins holds, per member, the location of the nearest analytic fixed
    point within the binning radius, or None when the terminal state is
    not near any of them.  basin_counts sums to the ensemble size.
    """

    config: EnsembleConfig
    integrator: IntegratorConfig
    initial_states: np.ndarray
    trajectories: tuple[Trajectory, ...]
    fixed_points: tuple[FixedPoint, ...]
    bins: tuple[Optional[float], ...]
    basin_counts: dict[Optional[float], int]
    estimated_locations: dict[float, float]


def draw_initial_states(members: int, seed: int) -> np.ndarray:
    """Uniform draws from the open interval (0, 1), rejecting the endpoints."""
    rng = np.random.default_rng(seed)
    states = np.empty(members)
    for i in range(members):
        value = rng.uniform()
        while not 0.0 < value < 1.0:
            value = rng.uniform()
        states[i] = value
    return states


def run_ensemble(
    config: EnsembleConfig,
    integrator: IntegratorConfig = IntegratorConfig(),
    bin_radius: float = 1e-3,
) -> EnsembleResult:
    """Integrate every member independently and bin terminal states.

    Deterministic for a fixed seed: initial states are drawn up front in
    index order, and members are integrated independently of each other.
    """
    report = classify_regime(config.strength, config.r)
    model = ReplicatorModel(ReducedGame(config.r), config.strength)
    initial = draw_initial_states(config.members, config.seed)
    trajectories = tuple(integrate(model, x0, integrator) for x0 in initial)

    locations = [fp.x for fp in report.fixed_points]
    bins: list[Optional[float]] = []
    for traj in trajectories:
        terminal = traj.final_x
        nearest = min(locations, key=lambda loc: abs(terminal - loc))
        bins.append(nearest if abs(terminal - nearest) <= bin_radius else None)

    terminal_by_bin: dict[float, list[float]] = {}
    for traj, assigned in zip(trajectories, bins):
        if assigned is not None:
            terminal_by_bin.setdefault(assigned, []).append(traj.final_x)
    estimated = {loc: float(np.mean(values)) for loc, values in terminal_by_bin.items()}

    return EnsembleResult(
        config=config,
        integrator=integrator,
        initial_states=initial,
        trajectories=trajectories,
        fixed_points=report.fixed_points,
        bins=tuple(bins),
        basin_counts=dict(Counter(bins)),
        estimated_locations=estimated,
    )


def estimate_attractor(
    traj: Trajectory, tail: int = 100, slow_ratio: float = 0.9
) -> tuple[float, bool]:
    """Terminal location plus a flag for sub-exponential (algebraic) approach.

    Gap ratios between successive recorded samples, measured against the
    final sample, are normalized to a per-unit-time contraction factor so
    the flag is insensitive to step size and stride.  A median factor in
    [slow_ratio, 1] over the trailing window marks the slow power-law
    decay of a degenerate double-root equilibrium; a plain exponential
    approach stays below it.  The default threshold suits contraction
    rates of order 0.1 per time unit and larger.
    """
    x = np.asarray(traj.x, dtype=float)
    if x.size < 10:
        raise ValueError(f"need at least 10 recorded samples, got {x.size}")
    final = float(x[-1])
    gaps = np.abs(x - final)[:-1]
    window = gaps[-(tail + 1):]
    t_window = np.asarray(traj.t, dtype=float)[: len(gaps)][-(tail + 1):]

    if traj.status is TerminalStatus.MAX_STEPS_REACHED:
        if np.any(np.diff(window) > 0.0):
            raise ValueError("trajectory hit the step cap without a monotone tail")

    ratios = []
    for i in range(len(window) - 1):
        d0, d1 = window[i], window[i + 1]
        span = t_window[i + 1] - t_window[i]
        if d0 > 1e-13 and d1 > 1e-13 and d1 <= d0 and span > 0.0:
            ratios.append((d1 / d0) ** (1.0 / span))
    if len(ratios) < 5:
        return final, False
    median = float(np.median(ratios))
    return final, bool(slow_ratio <= median <= 1.0)
