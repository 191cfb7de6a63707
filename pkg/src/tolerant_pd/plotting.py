"""Matplotlib renderings of the velocity curve, bifurcation structure,
and trajectory ensembles, written to files alongside the CSV output."""

from __future__ import annotations

from typing import Iterable, Optional

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .analysis import BifurcationRow, RegimeReport, Stability, Thresholds
from .game import ReplicatorModel
from .simulation import EnsembleResult

_MARKER = {
    Stability.STABLE: dict(marker="o", color="tab:blue"),
    Stability.UNSTABLE: dict(marker="o", color="white", edgecolor="tab:red"),
    Stability.SEMI_STABLE: dict(marker="D", color="tab:orange"),
}


def _fixed_point_markers(ax, xs, ys, stabilities):
    seen = set()
    for x, y, stab in zip(xs, ys, stabilities):
        style = _MARKER[stab]
        label = stab.value if stab not in seen else None
        seen.add(stab)
        ax.scatter(
            [x],
            [y],
            s=45,
            zorder=3,
            label=label,
            marker=style["marker"],
            c=style.get("color"),
            edgecolors=style.get("edgecolor", "black"),
            linewidths=0.8,
        )


def velocity_figure(report: RegimeReport, model: ReplicatorModel, points: int = 400):
    """Velocity curve xdot over [0, 1] with the classified fixed points."""
    grid = np.linspace(0.0, 1.0, points)
    values = [model.replicator_velocity(x) for x in grid]
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.axhline(0.0, color="0.6", linewidth=0.8)
    ax.plot(grid, values, color="0.2")
    _fixed_point_markers(
        ax,
        [fp.x for fp in report.fixed_points],
        [0.0] * len(report.fixed_points),
        [fp.stability for fp in report.fixed_points],
    )
    ax.set_xlabel("cooperator frequency x")
    ax.set_ylabel("dx/dt")
    ax.set_title(f"regime: {report.regime.value}")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    return fig


def bifurcation_figure(
    rows: Iterable[BifurcationRow],
    parameter_name: str = "parameter",
    thresholds: Optional[Thresholds] = None,
):
    """Fixed-point locations against the swept parameter, styled by stability."""
    fig, ax = plt.subplots(figsize=(6.5, 4.0))
    xs, ys, stabs = [], [], []
    for row in rows:
        for fp in row.fixed_points:
            xs.append(row.param)
            ys.append(fp.x)
            stabs.append(fp.stability)
    for stab in Stability:
        sel = [(x, y) for x, y, s in zip(xs, ys, stabs) if s is stab]
        if not sel:
            continue
        style = _MARKER[stab]
        ax.scatter(
            [p[0] for p in sel],
            [p[1] for p in sel],
            s=6,
            label=stab.value,
            marker=style["marker"],
            c=style.get("color"),
            edgecolors=style.get("edgecolor"),
            linewidths=0.4,
        )
    if thresholds is not None:
        for value, name in ((thresholds.k1, "k1"), (thresholds.k2, "k2")):
            ax.axvline(value, color="0.7", linestyle="--", linewidth=0.8)
            ax.annotate(name, (value, 1.02), ha="center", fontsize=8)
    ax.set_xlabel(parameter_name)
    ax.set_ylabel("fixed point location")
    ax.set_ylim(-0.05, 1.1)
    ax.legend(loc="center right", fontsize=8)
    fig.tight_layout()
    return fig


def ensemble_figure(result: EnsembleResult, max_points: int = 2000):
    """Trajectory fan x(t) for every ensemble member, attractors dashed."""
    fig, ax = plt.subplots(figsize=(6.5, 4.0))
    for traj in result.trajectories:
        t, x = traj.t, traj.x
        if len(t) > max_points:
            idx = np.linspace(0, len(t) - 1, max_points).astype(int)
            t, x = t[idx], x[idx]
        ax.plot(t, x, linewidth=0.7, alpha=0.6)
    for fp in result.fixed_points:
        if fp.stability is not Stability.UNSTABLE:
            ax.axhline(fp.x, color="0.3", linestyle="--", linewidth=0.8)
    ax.set_xscale("symlog", linthresh=1.0)
    ax.set_xlabel("t")
    ax.set_ylabel("cooperator frequency x")
    ax.set_ylim(-0.02, 1.02)
    strength = result.config.strength
    ax.set_title(f"{result.config.members} members, r={result.config.r:g}, {strength}")
    fig.tight_layout()
    return fig


def save_figure(fig, path: str, dpi: int = 150) -> None:
    try:
        fig.savefig(path, dpi=dpi)
    finally:
        plt.close(fig)
