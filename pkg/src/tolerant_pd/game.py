"""Payoff structures, interaction-strength rules, and the replicator field.

The model couples a two-strategy game (cooperate / defect) with a rule for
how strongly cooperators engage defectors.  The engagement intensity f(x)
rescales the cross payoffs, so at cooperator frequency x the per-round
fitness of each strategy is

    f_C = x*R + (1 - x)*f(x)*S
    f_D = x*f(x)*T + (1 - x)*P

and frequencies evolve by the replicator equation xdot = x*(f_C - phi),
where phi is the population mean fitness.  For the one-parameter reduced
game the field factors as xdot = x*(1 - x)*g(x) with a polynomial g whose
roots are the interior equilibria.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

#: Absolute tolerance for "is this zero / is this a fixed point" decisions.
DEFAULT_TOL = 1e-9


def _require_finite(**values: float) -> None:
    for name, value in values.items():
        if not math.isfinite(value):
            raise ValueError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class PayoffMatrix:
    """2x2 game payoffs: reward R, sucker S, temptation T, punishment P."""

    R: float
    S: float
    T: float
    P: float

    def __post_init__(self) -> None:
        _require_finite(R=self.R, S=self.S, T=self.T, P=self.P)

    @classmethod
    def prisoners_dilemma(cls, R: float, S: float, T: float, P: float) -> "PayoffMatrix":
        """Construct with the dilemma ordering T > R > P > S enforced."""
        matrix = cls(R, S, T, P)
        if not matrix.satisfies_pd_ordering:
            raise ValueError(
                f"payoffs violate the dilemma ordering T > R > P > S: "
                f"T={T}, R={R}, P={P}, S={S}"
            )
        return matrix

    @property
    def satisfies_pd_ordering(self) -> bool:
        return self.T > self.R > self.P > self.S


@dataclass(frozen=True)
class ReducedGame:
    """One-parameter dilemma with payoffs (R, S, T, P) = (1, 0, 1+r, r).

    r measures how profitable unilateral defection is and must lie in
    (0, 1), which makes the expanded matrix a valid dilemma for every r.
    """

    r: float

    def __post_init__(self) -> None:
        _require_finite(r=self.r)
        if not 0.0 < self.r < 1.0:
            raise ValueError(f"r must lie in the open interval (0, 1), got {self.r}")

    def payoff_matrix(self) -> PayoffMatrix:
        return PayoffMatrix.prisoners_dilemma(1.0, 0.0, 1.0 + self.r, self.r)


@dataclass(frozen=True)
class DonationGame:
    """Donation parameterization: cooperating costs c and gives the partner b."""

    b: float
    c: float

    def __post_init__(self) -> None:
        _require_finite(b=self.b, c=self.c)
        if not 0.0 < self.c < self.b:
            raise ValueError(f"donation game requires b > c > 0, got b={self.b}, c={self.c}")


def donation_to_reduced(game: DonationGame) -> ReducedGame:
    """Map a donation game onto the reduced parameterization, r = c/b."""
    return ReducedGame(game.c / game.b)


@dataclass(frozen=True)
class ConstantStrength:
    """Fixed engagement intensity p, independent of cooperator frequency.

    p = 0 means cooperators and defectors never interact; p = 1 recovers
    the classic replicator dynamics of the unmodified game.
    """

    p: float

    def __post_init__(self) -> None:
        _require_finite(p=self.p)
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"constant strength must lie in [0, 1], got {self.p}")

    def __call__(self, x: float) -> float:
        return self.p


@dataclass(frozen=True)
class LinearStrength:
    """Engagement intensity k*x, growing with cooperator frequency.

    k is the intensity an all-cooperator population would reach (the
    maximum tolerance).  The product k*x is used as-is even where it
    exceeds 1: clamping would distort the growth polynomial and every
    equilibrium result derived from it.
    """

    k: float

    def __post_init__(self) -> None:
        _require_finite(k=self.k)
        if self.k <= 0.0:
            raise ValueError(f"linear strength slope must be positive, got {self.k}")

    def __call__(self, x: float) -> float:
        return self.k * x


InteractionStrength = Union[ConstantStrength, LinearStrength]


@dataclass(frozen=True)
class PopulationState:
    """Cooperator frequency in [0, 1]; the defector share is 1 - x.

    Values within DEFAULT_TOL outside the interval are snapped to the
    nearest boundary (integrators overshoot by rounding); anything
    further out is rejected.
    """

    x: float

    def __post_init__(self) -> None:
        _require_finite(x=self.x)
        if self.x < -DEFAULT_TOL or self.x > 1.0 + DEFAULT_TOL:
            raise ValueError(f"frequency {self.x} lies outside [0, 1]")
        if not 0.0 <= self.x <= 1.0:
            object.__setattr__(self, "x", min(max(self.x, 0.0), 1.0))

    @property
    def y(self) -> float:
        """Defector frequency."""
        return 1.0 - self.x

    def __float__(self) -> float:
        return self.x


@dataclass(frozen=True)
class ReplicatorModel:
    """A game paired with an interaction-strength rule; owns the vector field.

    The game is either a ReducedGame or a general PayoffMatrix.  The
    velocity is defined for both; the growth polynomial g and its exact
    derivative exist only for the reduced parameterization, which is the
    domain of all equilibrium analysis.
    """

    game: Union[ReducedGame, PayoffMatrix]
    strength: InteractionStrength

    @property
    def is_reduced(self) -> bool:
        return isinstance(self.game, ReducedGame)

    def _reduced_r(self) -> float:
        if not isinstance(self.game, ReducedGame):
            raise TypeError("operation is defined only for the reduced one-parameter game")
        return self.game.r

    def payoffs(self) -> PayoffMatrix:
        if isinstance(self.game, ReducedGame):
            return self.game.payoff_matrix()
        return self.game

    def fitness_pair(self, x: float) -> tuple[float, float]:
        """Per-round fitness (f_C, f_D) at cooperator frequency x."""
        x = float(x)
        m = self.payoffs()
        y = 1.0 - x
        f = self.strength(x)
        return x * m.R + y * f * m.S, x * f * m.T + y * m.P

    def mean_fitness(self, x: float) -> float:
        """Population mean phi = x*f_C + (1 - x)*f_D."""
        x = float(x)
        f_c, f_d = self.fitness_pair(x)
        return x * f_c + (1.0 - x) * f_d

    def growth_function(self, x: float) -> float:
        """Cooperator fitness advantage g(x) = f_C(x) - f_D(x), in closed form.

        Evaluated as a polynomial for any real x; callers restrict to
        [0, 1] where the identity with f_C - f_D holds.
        """
        r = self._reduced_r()
        x = float(x)
        s = self.strength
        if isinstance(s, ConstantStrength):
            return (1.0 + r) * (1.0 - s.p) * x - r
        return -s.k * (1.0 + r) * x * x + (1.0 + r) * x - r

    def replicator_velocity(self, x: float) -> float:
        """Rate of change of the cooperator frequency, xdot.

        Reduced games use the factored form x*(1 - x)*g(x); general
        matrices use x*(f_C - phi) directly.  Both vanish exactly at the
        boundaries x = 0 and x = 1.
        """
        x = float(x)
        if isinstance(self.game, ReducedGame):
            return x * (1.0 - x) * self.growth_function(x)
        f_c, f_d = self.fitness_pair(x)
        phi = x * f_c + (1.0 - x) * f_d
        return x * (f_c - phi)

    def velocity_derivative(self, x: float) -> float:
        """Exact d/dx of the reduced field x*(1 - x)*g(x), by the product rule.

        Its sign at a fixed point decides stability: negative attracts,
        positive repels, zero needs a side probe.
        """
        r = self._reduced_r()
        x = float(x)
        s = self.strength
        g = self.growth_function(x)
        if isinstance(s, ConstantStrength):
            dg = (1.0 + r) * (1.0 - s.p)
        else:
            dg = -2.0 * s.k * (1.0 + r) * x + (1.0 + r)
        return (1.0 - 2.0 * x) * g + x * (1.0 - x) * dg

    def velocity_function(self) -> Callable[[float], float]:
        """The velocity as a plain closure with captured constants.

        Equivalent to replicator_velocity; meant for tight integration
        loops where attribute lookups per step would dominate.
        """
        if isinstance(self.game, ReducedGame):
            r = self.game.r
            s = self.strength
            if isinstance(s, ConstantStrength):
                slope = (1.0 + r) * (1.0 - s.p)

                def velocity(x: float) -> float:
                    return x * (1.0 - x) * (slope * x - r)

            else:
                curv = s.k * (1.0 + r)
                lin = 1.0 + r

                def velocity(x: float) -> float:
                    return x * (1.0 - x) * ((lin - curv * x) * x - r)

            return velocity
        return self.replicator_velocity
