"""Command-line front end: thresholds, analyze, sweep, simulate.

Human-readable tables go to stdout, machine-readable JSON via --json,
plot-ready CSV via --out, and rendered figures via --plot.  All numeric
fields in CSV and JSON use full round-trip precision.

Exit codes: 0 success, 2 usage error, 3 computation or validation error,
4 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Callable, Optional

import numpy as np

from . import __version__
from .analysis import RegimeReport, bifurcation_sweep, classify_regime, critical_thresholds
from .game import ConstantStrength, DonationGame, LinearStrength, donation_to_reduced
from .simulation import EnsembleConfig, IntegratorConfig, estimate_attractor, run_ensemble

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_COMPUTE = 3
EXIT_IO = 4

MAX_FIXED_POINTS = 4


class UsageError(Exception):
    """Invalid or missing command parameters."""


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat()


@dataclass(frozen=True)
class OutputRecord:
    """Envelope for one command invocation; round-trips losslessly via JSON."""

    command: str
    params: dict[str, Any]
    results: dict[str, Any]
    version: str = __version__
    timestamp: str = field(default_factory=_utc_now)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "OutputRecord":
        return cls(**json.loads(text))


def _fixed_point_payload(report: RegimeReport) -> list[dict[str, Any]]:
    return [
        {"x": fp.x, "origin": fp.origin.value, "stability": fp.stability.value}
        for fp in report.fixed_points
    ]


def _print_fixed_points(report: RegimeReport) -> None:
    print(f"{'x':>22}  {'origin':<9} stability")
    for fp in report.fixed_points:
        print(f"{fp.x!r:>22}  {fp.origin.value:<9} {fp.stability.value}")


def _write_csv(path: str, header: list[str], rows: list[list[str]], preamble: str = "") -> None:
    """Write UTF-8, LF-terminated CSV; remove the partial file on failure."""
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            if preamble:
                fh.write(preamble + "\n")
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
    except OSError:
        try:
            Path(path).unlink()
        except OSError:
            pass
        raise


def _emit(record: OutputRecord, args: argparse.Namespace, human: Callable[[], None]) -> None:
    if args.json:
        print(record.to_json())
    else:
        human()


def _strength_from_args(args: argparse.Namespace):
    if args.k is not None:
        if not args.k > 0:
            raise UsageError(f"--k must be positive, got {args.k}")
        return LinearStrength(args.k)
    if not 0.0 <= args.p <= 1.0:
        raise UsageError(f"--p must lie in [0, 1], got {args.p}")
    return ConstantStrength(args.p)


def _checked_r(r: float) -> float:
    if not 0.0 < r < 1.0:
        raise UsageError(f"--r must lie in the open interval (0, 1), got {r}")
    return r


# ----------------------------------------------------------------------
# subcommands
# ----------------------------------------------------------------------


def cmd_thresholds(args: argparse.Namespace) -> int:
    donation = args.b is not None or args.c is not None
    if donation and args.r is not None:
        raise UsageError("give either --r or the pair --b/--c, not both")
    if donation:
        if args.b is None or args.c is None:
            raise UsageError("--b and --c must be given together")
        if not 0.0 < args.c < args.b:
            raise UsageError(f"donation game requires b > c > 0, got b={args.b}, c={args.c}")
        game = DonationGame(args.b, args.c)
        r = donation_to_reduced(game).r
        window = (args.b / (args.b + args.c), (args.b + args.c) / (4.0 * args.c))
        params: dict[str, Any] = {"b": args.b, "c": args.c}
    else:
        if args.r is None:
            raise UsageError("give --r, or --b and --c")
        r = _checked_r(args.r)
        window = None
        params = {"r": args.r}

    th = critical_thresholds(r)
    results: dict[str, Any] = {"r": r, "k1": th.k1, "k2": th.k2}
    if window is not None:
        results["coexistence_window"] = list(window)
    else:
        results["coexistence_window"] = [th.k1, th.k2]
    record = OutputRecord(command="thresholds", params=params, results=results)

    def human() -> None:
        print(f"r  = {r!r}")
        print(f"k1 = {th.k1!r}   (below: bistable; the interior attractor meets x = 1 here)")
        print(f"k2 = {th.k2!r}   (above: defectors dominate; interior pair vanishes here)")
        lo, hi = results["coexistence_window"]
        print(f"coexistence window: {lo!r} < k < {hi!r}")

    _emit(record, args, human)
    return EXIT_OK


def cmd_analyze(args: argparse.Namespace) -> int:
    r = _checked_r(args.r)
    strength = _strength_from_args(args)
    report = classify_regime(strength, r)
    params = {"r": r, "k": args.k, "p": args.p}
    results = {
        "regime": report.regime.value,
        "k1": report.thresholds.k1,
        "k2": report.thresholds.k2,
        "fixed_points": _fixed_point_payload(report),
    }
    record = OutputRecord(command="analyze", params=params, results=results)

    if args.out:
        rows = [
            [repr(fp.x), fp.origin.value, fp.stability.value] for fp in report.fixed_points
        ]
        _write_csv(args.out, ["x", "origin", "stability"], rows)
    if args.plot:
        from .game import ReducedGame, ReplicatorModel
        from .plotting import save_figure, velocity_figure

        model = ReplicatorModel(ReducedGame(r), strength)
        save_figure(velocity_figure(report, model), args.plot)

    def human() -> None:
        print(f"regime: {report.regime.value}")
        print(f"k1 = {report.thresholds.k1!r}, k2 = {report.thresholds.k2!r}")
        _print_fixed_points(report)

    _emit(record, args, human)
    return EXIT_OK


def _sweep_rows_to_csv(rows) -> tuple[list[str], list[list[str]]]:
    header = ["param", "regime"]
    for i in range(1, MAX_FIXED_POINTS + 1):
        header += [f"fp{i}_x", f"fp{i}_stab"]
    table = []
    for row in rows:
        cells = [repr(row.param), row.regime.value if row.regime else "error"]
        for fp in row.fixed_points:
            cells += [repr(fp.x), fp.stability.value]
        cells += [""] * (len(header) - len(cells))
        table.append(cells)
    return header, table


def cmd_sweep(args: argparse.Namespace) -> int:
    r = _checked_r(args.r)
    if args.points < 1:
        raise UsageError(f"--points must be at least 1, got {args.points}")
    if args.from_ > args.to:
        raise UsageError(f"--from must not exceed --to, got {args.from_} > {args.to}")
    variant = "linear" if args.linear else "constant"
    if variant == "linear" and args.from_ <= 0:
        raise UsageError("linear sweep needs --from > 0 (the slope k is positive)")
    if variant == "constant" and not (0.0 <= args.from_ and args.to <= 1.0):
        raise UsageError("constant sweep needs the grid inside [0, 1]")

    grid = [float(v) for v in np.linspace(args.from_, args.to, args.points)]
    rows = bifurcation_sweep(r, grid, variant)
    errors = [row for row in rows if row.error]
    for row in errors:
        print(f"sweep: {variant} = {row.param!r}: {row.error}", file=sys.stderr)

    results = {
        "variant": variant,
        "rows": [
            {
                "param": row.param,
                "regime": row.regime.value if row.regime else None,
                "fixed_points": [
                    {"x": fp.x, "stability": fp.stability.value} for fp in row.fixed_points
                ],
                "error": row.error,
            }
            for row in rows
        ],
    }
    params = {"r": r, "variant": variant, "from": args.from_, "to": args.to, "points": args.points}
    record = OutputRecord(command="sweep", params=params, results=results)

    if args.out:
        header, table = _sweep_rows_to_csv(rows)
        _write_csv(args.out, header, table)
    if args.plot:
        from .plotting import bifurcation_figure, save_figure

        thresholds = critical_thresholds(r) if variant == "linear" else None
        name = "k (max strength)" if variant == "linear" else "p (constant strength)"
        save_figure(bifurcation_figure(rows, parameter_name=name, thresholds=thresholds), args.plot)

    def human() -> None:
        print(f"{'param':>22}  {'regime':<20} fixed points (x: stability)")
        for row in rows:
            if row.error:
                print(f"{row.param!r:>22}  {'error':<20} {row.error}")
                continue
            fps = ", ".join(f"{fp.x:.6g}: {fp.stability.value}" for fp in row.fixed_points)
            print(f"{row.param!r:>22}  {row.regime.value:<20} {fps}")

    _emit(record, args, human)
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    r = _checked_r(args.r)
    strength = _strength_from_args(args)
    if args.members < 1:
        raise UsageError(f"--members must be at least 1, got {args.members}")
    if args.step <= 0:
        raise UsageError(f"--step must be positive, got {args.step}")
    if args.max_steps < 1:
        raise UsageError(f"--max-steps must be at least 1, got {args.max_steps}")
    if args.stride < 1:
        raise UsageError(f"--stride must be at least 1, got {args.stride}")

    ensemble = EnsembleConfig(strength=strength, r=r, members=args.members, seed=args.seed)
    integrator = IntegratorConfig(
        method=args.method,
        dt=args.step,
        max_steps=args.max_steps,
        tol=args.tol,
        stride=args.stride,
    )
    result = run_ensemble(ensemble, integrator, bin_radius=args.bin_radius)

    summaries = []
    for member, traj in enumerate(result.trajectories):
        try:
            _, slow = estimate_attractor(traj)
        except ValueError:
            slow = None
        summaries.append(
            {
                "member": member,
                "x0": float(result.initial_states[member]),
                "x_final": traj.final_x,
                "status": traj.status.value,
                "attractor": result.bins[member],
                "slow_decay": slow,
            }
        )
    counts = [
        {"attractor": loc, "count": count} for loc, count in sorted(
            result.basin_counts.items(), key=lambda item: (item[0] is None, item[0])
        )
    ]
    params = {
        "r": r,
        "k": args.k,
        "p": args.p,
        "members": args.members,
        "seed": args.seed,
        "method": args.method,
        "step": args.step,
        "max_steps": args.max_steps,
        "tol": args.tol,
        "stride": args.stride,
        "bin_radius": args.bin_radius,
    }
    record = OutputRecord(
        command="simulate",
        params=params,
        results={"basin_counts": counts, "members": summaries},
    )

    if args.out:
        meta = (
            f"# seed={args.seed} r={r!r} "
            + (f"k={args.k!r}" if args.k is not None else f"p={args.p!r}")
            + f" members={args.members} method={args.method} step={args.step!r}"
            f" max_steps={args.max_steps} stride={args.stride}"
        )
        traj_rows = []
        for member, traj in enumerate(result.trajectories):
            for t, x in zip(traj.t, traj.x):
                traj_rows.append([str(member), repr(float(t)), repr(float(x))])
        _write_csv(args.out, ["member", "t", "x"], traj_rows, preamble=meta)

        summary_path = _summary_path(args.out)
        summary_rows = [
            [
                str(s["member"]),
                repr(s["x0"]),
                repr(s["x_final"]),
                "" if s["attractor"] is None else repr(s["attractor"]),
                "" if s["slow_decay"] is None else str(s["slow_decay"]).lower(),
            ]
            for s in summaries
        ]
        _write_csv(
            summary_path,
            ["member", "x0", "x_final", "attractor", "slow_decay"],
            summary_rows,
            preamble=meta,
        )
    if args.plot:
        from .plotting import ensemble_figure, save_figure

        save_figure(ensemble_figure(result), args.plot)

    def human() -> None:
        print(
            f"{args.members} members, seed {args.seed}, r = {r!r}, "
            + (f"k = {args.k!r}" if args.k is not None else f"p = {args.p!r}")
            + f", {args.method}, step {args.step:g}"
        )
        print("basin counts:")
        for entry in counts:
            loc = "unresolved" if entry["attractor"] is None else repr(entry["attractor"])
            print(f"  {loc}: {entry['count']}")
        print(f"{'member':>6} {'x0':>22} {'x_final':>22} {'attractor':>22} slow_decay")
        for s in summaries:
            attractor = "-" if s["attractor"] is None else repr(s["attractor"])
            slow = "-" if s["slow_decay"] is None else str(s["slow_decay"]).lower()
            print(f"{s['member']:>6} {s['x0']!r:>22} {s['x_final']!r:>22} {attractor:>22} {slow}")

    _emit(record, args, human)
    return EXIT_OK


def _summary_path(out: str) -> str:
    path = Path(out)
    return str(path.with_name(path.stem + ".summary" + (path.suffix or ".csv")))


# ----------------------------------------------------------------------
# parser
# ----------------------------------------------------------------------


def _add_common_output_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--json", action="store_true", help="print a JSON record instead of text")
    sub.add_argument("--out", metavar="PATH", help="write results as CSV to PATH")
    sub.add_argument("--plot", metavar="PATH", help="render a figure to PATH (png, pdf, svg)")


def _add_strength_flags(sub: argparse.ArgumentParser) -> None:
    group = sub.add_mutually_exclusive_group(required=True)
    group.add_argument("--k", type=float, help="linear strength slope, f(x) = k*x")
    group.add_argument("--p", type=float, help="constant strength, f(x) = p")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tolerant-pd",
        description=(
            "Replicator dynamics of the Prisoner's Dilemma with a "
            "frequency-dependent interaction strength between cooperators "
            "and defectors."
        ),
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    th = commands.add_parser("thresholds", help="critical strengths k1, k2 for a given game")
    th.add_argument("--r", type=float, help="unilateral-defection profit, in (0, 1)")
    th.add_argument("--b", type=float, help="donation benefit (use with --c)")
    th.add_argument("--c", type=float, help="donation cost (use with --b)")
    th.add_argument("--json", action="store_true", help="print a JSON record instead of text")
    th.set_defaults(handler=cmd_thresholds)

    an = commands.add_parser("analyze", help="fixed points, stability, and regime label")
    _add_strength_flags(an)
    an.add_argument("--r", type=float, default=0.2, help="unilateral-defection profit (default 0.2)")
    _add_common_output_flags(an)
    an.set_defaults(handler=cmd_analyze)

    sw = commands.add_parser("sweep", help="regime classification across a parameter grid")
    kind = sw.add_mutually_exclusive_group(required=True)
    kind.add_argument("--linear", action="store_true", help="sweep the slope k of f(x) = k*x")
    kind.add_argument("--constant", action="store_true", help="sweep the constant strength p")
    sw.add_argument("--r", type=float, default=0.2, help="unilateral-defection profit (default 0.2)")
    sw.add_argument("--from", dest="from_", type=float, required=True, help="grid start")
    sw.add_argument("--to", type=float, required=True, help="grid end")
    sw.add_argument("--points", type=int, required=True, help="grid size")
    _add_common_output_flags(sw)
    sw.set_defaults(handler=cmd_sweep)

    sim = commands.add_parser("simulate", help="seeded ensemble of integrated trajectories")
    _add_strength_flags(sim)
    sim.add_argument("--r", type=float, default=0.2, help="unilateral-defection profit (default 0.2)")
    sim.add_argument("--members", type=int, default=50, help="ensemble size (default 50)")
    sim.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    sim.add_argument(
        "--method", choices=("euler", "rk4"), default="euler", help="integration scheme"
    )
    sim.add_argument("--step", type=float, default=1.0, help="step size dt (default 1)")
    sim.add_argument(
        "--max-steps", type=int, default=100_000, help="step cap per member (default 100000)"
    )
    sim.add_argument(
        "--tol", type=float, default=1e-8, help="per-step convergence tolerance (default 1e-8)"
    )
    sim.add_argument("--stride", type=int, default=1, help="record every Nth step (default 1)")
    sim.add_argument(
        "--bin-radius",
        type=float,
        default=1e-3,
        help="terminal state binning radius around analytic fixed points",
    )
    _add_common_output_flags(sim)
    sim.set_defaults(handler=cmd_simulate)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.handler(args)
    except UsageError as exc:
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, TypeError) as exc:
        print(f"{parser.prog}: computation error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    except OSError as exc:
        target = getattr(exc, "filename", None)
        where = f" ({target})" if target else ""
        print(f"{parser.prog}: i/o error{where}: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
