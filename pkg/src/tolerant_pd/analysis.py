"""Fixed points, stability classes, critical thresholds, and regime sweeps.

Everything here operates on the reduced one-parameter game.  The interior
equilibria are roots of the growth polynomial g; boundary equilibria at
x = 0 and x = 1 always exist.  Two critical values of the linear-strength
slope bound the coexistence window:

    k1 = 1 / (1 + r)        interior attractor collides with x = 1
    k2 = 0.25 * (1 + 1/r)   discriminant of g vanishes, interior pair gone
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Literal, Optional

from .game import (
    DEFAULT_TOL,
    ConstantStrength,
    InteractionStrength,
    LinearStrength,
    ReducedGame,
    ReplicatorModel,
)


class Stability(Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"
    SEMI_STABLE = "semi-stable"


class Origin(Enum):
    BOUNDARY = "boundary"
    INTERNAL = "internal"


class Regime(Enum):
    BISTABLE = "bistable"
    COEXISTENCE = "coexistence"
    DEFECTOR_DOMINANCE = "defector-dominance"
    CRITICAL_LOWER = "critical-lower"
    CRITICAL_UPPER = "critical-upper"


@dataclass(frozen=True)
class FixedPoint:
    x: float
    origin: Origin
    stability: Stability


@dataclass(frozen=True)
class Thresholds:
    """Critical maximum-strength values bounding the coexistence window."""

    k1: float
    k2: float

    @property
    def window(self) -> tuple[float, float]:
        return (self.k1, self.k2)


@dataclass(frozen=True)
class RegimeReport:
    """Regime label plus the full classified fixed-point set for one model."""

    regime: Regime
    thresholds: Thresholds
    fixed_points: tuple[FixedPoint, ...]

    def stable_points(self) -> tuple[FixedPoint, ...]:
        return tuple(fp for fp in self.fixed_points if fp.stability is Stability.STABLE)

    def attractors(self) -> tuple[FixedPoint, ...]:
        """Stable and semi-stable points, the possible long-run outcomes."""
        return tuple(
            fp
            for fp in self.fixed_points
            if fp.stability in (Stability.STABLE, Stability.SEMI_STABLE)
        )


@dataclass(frozen=True)
class BifurcationRow:
    """Fixed-point structure at one value of the swept parameter."""

    param: float
    regime: Optional[Regime]
    fixed_points: tuple[FixedPoint, ...]
    error: Optional[str] = None


def _validate_r(r: float) -> None:
    # delegate range checking to the game type
    ReducedGame(r)


def critical_thresholds(r: float) -> Thresholds:
    """Both critical slopes for unilateral-defection profit r."""
    _validate_r(r)
    return Thresholds(k1=1.0 / (1.0 + r), k2=0.25 * (1.0 + 1.0 / r))


def growth_curve_roots(
    k: float, r: float, tol: float = DEFAULT_TOL
) -> Optional[tuple[float, float]]:
    """Both real roots of -k(1+r)x^2 + (1+r)x - r, or None when complex.

    Uses the cancellation-safe form: the larger root comes from the
    sign-matched quadratic formula, the smaller from the product of roots
    r / (k*(1+r)).  A discriminant within tol of zero yields the double
    root 1/(2k), returned twice.
    """
    if k <= 0.0 or not math.isfinite(k):
        raise ValueError(f"slope k must be positive and finite, got {k}")
    _validate_r(r)
    one_plus_r = 1.0 + r
    disc = one_plus_r * (one_plus_r - 4.0 * k * r)
    if disc < -tol:
        return None
    if disc <= tol:
        double = 0.5 / k
        return (double, double)
    q = 0.5 * (one_plus_r + math.sqrt(disc))
    larger = q / (k * one_plus_r)
    smaller = r / q
    return (smaller, larger)


def internal_fixed_points_linear(k: float, r: float, tol: float = DEFAULT_TOL) -> list[float]:
    """Interior equilibria of the linear-strength model, sorted ascending.

    Returns 0, 1, or 2 values.  Roots within tol of a boundary are merged
    into the boundary equilibrium and omitted here; a double root appears
    once.
    """
    roots = growth_curve_roots(k, r, tol)
    if roots is None:
        return []
    interior = [x for x in roots if tol < x < 1.0 - tol]
    if len(interior) == 2 and abs(interior[1] - interior[0]) <= tol:
        return [interior[0]]
    return interior


def internal_fixed_point_constant(p: float, r: float, tol: float = DEFAULT_TOL) -> Optional[float]:
    """Interior equilibrium r / ((1+r)(1-p)) of the constant-strength model.

    Exists (lies inside (0, 1)) exactly when p < 1/(1+r); returns None
    otherwise.  p = 1 is rejected: it recovers the classic game, whose
    field has no interior zero and whose formula divides by zero.
    """
    _validate_r(r)
    if not 0.0 <= p < 1.0:
        raise ValueError(f"constant strength must lie in [0, 1), got {p}")
    x = r / ((1.0 + r) * (1.0 - p))
    if tol < x < 1.0 - tol:
        return x
    return None


def classify_fixed_point(
    model: ReplicatorModel,
    x_star: float,
    tol: float = DEFAULT_TOL,
    probe: float = 1e-4,
) -> FixedPoint:
    """Classify an equilibrium by the sign of the exact field derivative.

    A derivative within tol of zero falls back to probing the flow at
    x_star +/- probe (interior side only at the boundaries): attraction
    on both sides is stable, repulsion on both unstable, and a one-sided
    mix is semi-stable.
    """
    x_star = float(x_star)
    if abs(model.replicator_velocity(x_star)) > tol:
        raise ValueError(f"x = {x_star} is not a fixed point to tolerance {tol}")
    origin = Origin.BOUNDARY if x_star <= tol or x_star >= 1.0 - tol else Origin.INTERNAL
    slope = model.velocity_derivative(x_star)
    if slope < -tol:
        stability = Stability.STABLE
    elif slope > tol:
        stability = Stability.UNSTABLE
    else:
        stability = _probe_degenerate(model, x_star, probe)
    return FixedPoint(x=x_star, origin=origin, stability=stability)


def _probe_degenerate(model: ReplicatorModel, x_star: float, probe: float) -> Stability:
    # probes shrink near the boundaries so both stay strictly inside (0, 1)
    attracting = []
    left = x_star - min(probe, 0.5 * x_star)
    if 0.0 < left < x_star:
        attracting.append(model.replicator_velocity(left) > 0.0)
    right = x_star + min(probe, 0.5 * (1.0 - x_star))
    if x_star < right < 1.0:
        attracting.append(model.replicator_velocity(right) < 0.0)
    if not attracting or all(attracting):
        return Stability.STABLE
    if not any(attracting):
        return Stability.UNSTABLE
    return Stability.SEMI_STABLE


def classify_regime(
    strength: InteractionStrength, r: float, tol: float = DEFAULT_TOL
) -> RegimeReport:
    """Full fixed-point set and regime label for one parameterization.

    Linear strength partitions by the critical slopes: bistable below k1,
    coexistence between k1 and k2, defector dominance above k2.  Constant
    strength admits only bistability (p < 1/(1+r)) or defector dominance;
    parameter values within tol of a threshold are labeled critical.
    """
    thresholds = critical_thresholds(r)
    model = ReplicatorModel(ReducedGame(r), strength)

    if isinstance(strength, ConstantStrength):
        p = strength.p
        # the interior point reaches x = 1 at p = 1/(1+r), the same
        # structural event as k crossing k1
        if abs(p - thresholds.k1) <= tol:
            regime = Regime.CRITICAL_LOWER
        elif p < thresholds.k1:
            regime = Regime.BISTABLE
        else:
            regime = Regime.DEFECTOR_DOMINANCE
        if p >= 1.0:
            interior: list[float] = []
        else:
            candidate = internal_fixed_point_constant(p, r, tol)
            interior = [] if candidate is None else [candidate]
    elif isinstance(strength, LinearStrength):
        k = strength.k
        if abs(k - thresholds.k1) <= tol:
            regime = Regime.CRITICAL_LOWER
        elif abs(k - thresholds.k2) <= tol:
            regime = Regime.CRITICAL_UPPER
        elif k < thresholds.k1:
            regime = Regime.BISTABLE
        elif k < thresholds.k2:
            regime = Regime.COEXISTENCE
        else:
            regime = Regime.DEFECTOR_DOMINANCE
        interior = internal_fixed_points_linear(k, r, tol)
    else:
        raise TypeError(f"unsupported interaction strength: {strength!r}")

    locations = [0.0, *interior, 1.0]
    points = tuple(classify_fixed_point(model, x, tol) for x in locations)
    return RegimeReport(regime=regime, thresholds=thresholds, fixed_points=points)


def bifurcation_sweep(
    r: float,
    parameter_grid: Iterable[float],
    variant: Literal["constant", "linear"],
    tol: float = DEFAULT_TOL,
) -> list[BifurcationRow]:
    """Regime classification across a parameter grid, one row per value.

    Rows whose parameter is invalid for the variant carry the error
    message instead of a regime; the sweep continues past them.
    """
    factories = {"constant": ConstantStrength, "linear": LinearStrength}
    if variant not in factories:
        raise ValueError(f"variant must be 'constant' or 'linear', got {variant!r}")
    _validate_r(r)
    factory = factories[variant]
    rows = []
    for value in parameter_grid:
        value = float(value)
        try:
            report = classify_regime(factory(value), r, tol)
        except ValueError as exc:
            rows.append(BifurcationRow(param=value, regime=None, fixed_points=(), error=str(exc)))
        else:
            rows.append(
                BifurcationRow(param=value, regime=report.regime, fixed_points=report.fixed_points)
            )
    return rows
