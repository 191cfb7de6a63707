"""Replicator dynamics of the Prisoner's Dilemma with frequency-dependent
interaction strength: fixed-point analysis, regime classification, and
deterministic ensemble simulation."""

from .game import (
    DEFAULT_TOL,
    ConstantStrength,
    DonationGame,
    InteractionStrength,
    LinearStrength,
    PayoffMatrix,
    PopulationState,
    ReducedGame,
    ReplicatorModel,
    donation_to_reduced,
)
from .analysis import (
    BifurcationRow,
    FixedPoint,
    Origin,
    Regime,
    RegimeReport,
    Stability,
    Thresholds,
    bifurcation_sweep,
    classify_fixed_point,
    classify_regime,
    critical_thresholds,
    growth_curve_roots,
    internal_fixed_point_constant,
    internal_fixed_points_linear,
)
from .simulation import (
    EnsembleConfig,
    EnsembleResult,
    IntegratorConfig,
    TerminalStatus,
    Trajectory,
    draw_initial_states,
    estimate_attractor,
    integrate,
    run_ensemble,
    step_euler,
    step_rk4,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_TOL",
    "BifurcationRow",
    "ConstantStrength",
    "DonationGame",
    "EnsembleConfig",
    "EnsembleResult",
    "FixedPoint",
    "IntegratorConfig",
    "InteractionStrength",
    "LinearStrength",
    "Origin",
    "PayoffMatrix",
    "PopulationState",
    "ReducedGame",
    "Regime",
    "RegimeReport",
    "ReplicatorModel",
    "Stability",
    "TerminalStatus",
    "Thresholds",
    "Trajectory",
    "bifurcation_sweep",
    "classify_fixed_point",
    "classify_regime",
    "critical_thresholds",
    "donation_to_reduced",
    "draw_initial_states",
    "estimate_attractor",
    "growth_curve_roots",
    "integrate",
    "internal_fixed_point_constant",
    "internal_fixed_points_linear",
    "run_ensemble",
    "step_euler",
    "step_rk4",
    "__version__",
]
