"""Command-line front end.

Subcommands: ``flow`` (transition matrices plus flow-property checks),
``counterexample`` (the non-saturation scenario), ``lift`` (the n-dimensional
transfer), ``axioms`` (family-structure checks), and ``verify`` (everything
at defaults).  Every subcommand prints a human-readable summary by default,
canonical JSON with ``--json`` (and nothing else on stdout), and exits 0 when
all checks pass, 1 when any check fails, 2 on usage or parse errors.  Wall
time goes to stderr so repeated runs stay byte-identical on stdout.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
import time

import numpy as np

from .core import NormKind, SystemLike, matrix_norm, zero_system
from .counterexample import (closed_form_transition, planar_system,
                             select_amplitude)
from .exact import verify_exact_identities
from .expr import ParseError, parse_coefficient
from .flow import (IntegrationError, cocycle_residual, family_axioms_check,
                   growth_bound_check, integrate_transition,
                   liouville_residual)
from .ndim import (deficit_transfer, higher_order_system, lift_step,
                   lifted_mask_violation)
from .reports import CheckReport, RunReport, render_json, write_csv
from .satcheck import run_counterexample_scenario

__all__ = ["main"]

SCENARIO_COLUMNS = [
    "m", "r_m", "deficit", "B11", "B12", "B21", "B22",
    "residual_lastrow", "residual_singleentry",
    "candidate_transition_mismatch",
]

LIFT_COLUMNS = [
    "m", "r_m", "lifted_deficit", "planar_deficit", "transfer_difference",
    "lower_left", "chain", "residual_lastrow", "residual_singleentry",
]

_NORM_CHOICES = [kind.value for kind in NormKind]
_ZERO_TOL = 1e-12


def _resolve_system(text: str, dimension: int) -> SystemLike:
    """Named system or a coefficient expression c(t) for y^(n) = c y^(n-2)."""
    if dimension < 2:
        raise ValueError(f"dimension must be >= 2, got {dimension}")
    if text == "zero":
        return zero_system(dimension)
    if text == "counterexample":
        return (planar_system() if dimension == 2
                else higher_order_system(dimension))
    return higher_order_system(dimension, parse_coefficient(text))


def _parse_window(text: str) -> tuple[float, float]:
    parts = text.split(":")
    if len(parts) != 2:
        raise ValueError(f"window must look like lo:hi, got {text!r}")
    return float(parts[0]), float(parts[1])


def _print_human(report: RunReport) -> None:
    print(f"command: {report.command}")
    for key in sorted(report.params):
        value = report.params[key]
        if not isinstance(value, (list, np.ndarray)):
            print(f"  {key} = {value}")
    for check in report.checks:
        status = "PASS" if check.passed else "FAIL"
        print(f"{status}  {check.name}: value={check.value:.12g} "
              f"tolerance={check.tolerance:.12g}")
        if check.note and not check.passed:
            print(f"      {check.note}")
    print("PASS" if report.passed else "FAIL")


def _finish(args: argparse.Namespace, report: RunReport,
            started: float) -> int:
    if getattr(args, "json", False):
        print(render_json(report))
    else:
        _print_human(report)
    elapsed = (time.perf_counter() - started) * 1000.0
    print(f"wall_time_ms={elapsed:.1f}", file=sys.stderr)
    return 0 if report.passed else 1


def _flow_checks(system: SystemLike, from_time: float, to_time: float,
                 tol: float, kind: NormKind
                 ) -> tuple[np.ndarray, list[CheckReport]]:
    span = abs(to_time - from_time)
    bound = 10.0 * tol * max(1.0, span)
    identity = np.eye(system.dimension)
    forward = integrate_transition(system, from_time, to_time, tol).value
    backward = integrate_transition(system, to_time, from_time, tol).value
    identity_residual = matrix_norm(backward @ forward - identity, kind)
    middle = 0.5 * (from_time + to_time)
    cocycle = cocycle_residual(system, to_time, middle, from_time, tol, kind)
    determinant = float(np.linalg.det(forward))
    liouville = liouville_residual(system, from_time, to_time, tol)
    liouville_bound = bound * max(1.0, abs(determinant))
    checks = [
        CheckReport("two_sided_identity", identity_residual, bound,
                    identity_residual <= bound,
                    "reverse transition composed with forward stays at I"),
        CheckReport("cocycle", cocycle, bound, cocycle <= bound,
                    "composition through the midpoint matches the direct "
                    "transition"),
        CheckReport("liouville", liouville, liouville_bound,
                    liouville <= liouville_bound,
                    "determinant matches the exponential of the integrated "
                    "trace"),
    ]
    return forward, checks


def _cmd_flow(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    kind = NormKind(args.norm)
    system = _resolve_system(args.system, args.dimension)
    forward, checks = _flow_checks(system, args.from_time, args.to_time,
                                   args.tol, kind)
    if args.system == "counterexample" and args.dimension == 2:
        exact = closed_form_transition(args.from_time, args.to_time).value
        agreement = matrix_norm(forward - exact, kind)
        checks.append(CheckReport(
            "closed_form_agreement", agreement, 1e-6, agreement <= 1e-6,
            "integrated transition matches the closed form"))
    report = RunReport(
        command="flow",
        params={
            "system": args.system,
            "dimension": args.dimension,
            "from_time": args.from_time,
            "to_time": args.to_time,
            "tol": args.tol,
            "norm": args.norm,
            "transition": forward,
        },
        checks=checks,
    )
    if not args.json:
        print(f"transition matrix ({args.from_time:g} -> {args.to_time:g}):")
        for row in forward:
            print("  [" + ", ".join(f"{value: .10g}" for value in row) + "]")
    return _finish(args, report, started)


def _scenario_report(args: argparse.Namespace) -> tuple[RunReport, list[dict]]:
    scenario = run_counterexample_scenario(args.delta, args.epsilon,
                                           args.horizon,
                                           kind=NormKind(args.norm),
                                           tol=args.tol)
    rows = [dataclasses.asdict(row) for row in scenario.rows]
    report = RunReport(
        command="counterexample",
        params={
            "delta": scenario.delta,
            "epsilon": scenario.epsilon,
            "horizon": scenario.horizon,
            "norm": scenario.kind,
            "tol": scenario.tol,
            "match_tol": scenario.match_tol,
            "mode": scenario.mode,
            "candidate_distance": scenario.verdict.distance,
        },
        checks=list(scenario.checks),
        tables={"scenario": rows},
    )
    return report, rows


def _cmd_counterexample(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    report, rows = _scenario_report(args)
    if args.csv:
        write_csv(args.csv, rows, SCENARIO_COLUMNS)
    return _finish(args, report, started)


def _lift_rows(dimension: int, delta: float, horizon: int, tol: float,
               kind: NormKind) -> tuple[list[dict], list[CheckReport]]:
    rows = []
    for m in range(1, horizon + 1):
        r_m = select_amplitude(m, delta, NormKind.FROBENIUS)
        lifted = lift_step(dimension, m, r_m, tol, kind)
        transfer = deficit_transfer(dimension, m, r_m, tol, kind)
        masks = lifted_mask_violation(dimension, m, r_m, NormKind.FROBENIUS)
        rows.append({
            "m": m,
            "r_m": r_m,
            "lifted_deficit": transfer.lifted,
            "planar_deficit": transfer.planar,
            "transfer_difference": transfer.difference,
            "lower_left": lifted.lower_left_residual,
            "chain": lifted.chain_residual,
            "residual_lastrow": masks.residual_last_row,
            "residual_singleentry": masks.residual_single_entry,
        })
    worst_lower = max(row["lower_left"] for row in rows)
    worst_chain = max(row["chain"] for row in rows)
    worst_transfer = max(row["transfer_difference"] for row in rows)
    least_residual = min(min(row["residual_lastrow"],
                             row["residual_singleentry"]) for row in rows)
    checks = [
        CheckReport("block_lower_left", worst_lower, 1e-7,
                    worst_lower <= 1e-7,
                    "integrated flow keeps the forced zero block"),
        CheckReport("block_chain", worst_chain, 1e-7, worst_chain <= 1e-7,
                    "chain block matches the exact polynomial flow"),
        CheckReport("deficit_transfer", worst_transfer, 1e-10,
                    worst_transfer <= 1e-10,
                    "lifted and planar deficits coincide"),
        CheckReport("mask_residuals_positive", least_residual, _ZERO_TOL,
                    least_residual > _ZERO_TOL,
                    "embedded perturbation violates both companion masks"),
    ]
    return rows, checks


def _cmd_lift(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    if not 3 <= args.dimension <= 8:
        raise ValueError(
            f"lift dimension must lie in 3..8 (dimension 2 is the "
            f"counterexample subcommand), got {args.dimension}")
    kind = NormKind(args.norm)
    rows, checks = _lift_rows(args.dimension, args.delta, args.horizon,
                              args.tol, kind)
    report = RunReport(
        command="lift",
        params={
            "dimension": args.dimension,
            "delta": args.delta,
            "horizon": args.horizon,
            "norm": args.norm,
            "tol": args.tol,
        },
        checks=checks,
        tables={"lift": rows},
    )
    return _finish(args, report, started)


def _axioms_checks(system: SystemLike, m_max: int,
                   window: tuple[float, float], grid_points: int,
                   kind: NormKind) -> list[CheckReport]:
    checks = family_axioms_check(system, m_max, tol=1e-6, kind=kind,
                                 window=window, grid_points=grid_points)
    checks.append(growth_bound_check(system, float(m_max),
                                     samples=max(1, 2 * m_max), kind=kind,
                                     window=window, grid_points=grid_points))
    return checks


def _cmd_axioms(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    if args.m_max < 1:
        raise ValueError(f"m-max must be >= 1, got {args.m_max}")
    kind = NormKind(args.norm)
    window = _parse_window(args.window)
    system = _resolve_system(args.system, args.dimension)
    checks = _axioms_checks(system, args.m_max, window, args.grid, kind)
    report = RunReport(
        command="axioms",
        params={
            "system": args.system,
            "dimension": args.dimension,
            "m_max": args.m_max,
            "window": list(window),
            "grid": args.grid,
            "norm": args.norm,
        },
        checks=checks,
    )
    return _finish(args, report, started)


def _prefixed(checks: list[CheckReport], prefix: str) -> list[CheckReport]:
    return [dataclasses.replace(check, name=prefix + check.name)
            for check in checks]


def _cmd_verify(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    tol = 1e-10
    system = planar_system()
    checks: list[CheckReport] = []

    _, flow_checks = _flow_checks(system, 0.0, 1.0, tol, NormKind.SPECTRAL)
    checks.extend(_prefixed(flow_checks, "flow_"))

    grid = np.linspace(-5.0, 5.0, 11)
    agreement = 0.0
    determinant_way_off = 0.0
    for s in grid:
        for t in grid:
            integrated = integrate_transition(system, s, t, tol).value
            exact = closed_form_transition(s, t).value
            agreement = max(agreement,
                            matrix_norm(integrated - exact,
                                        NormKind.SPECTRAL))
            determinant_way_off = max(
                determinant_way_off,
                abs(float(np.linalg.det(exact)) - 1.0))
    checks.append(CheckReport(
        "grid_agreement", agreement, 1e-6, agreement <= 1e-6,
        "closed form vs integration on an 11x11 grid over [-5, 5]^2"))
    checks.append(CheckReport(
        "unit_determinant", determinant_way_off, 1e-9,
        determinant_way_off <= 1e-9,
        "closed-form transitions have determinant 1 on the same grid"))

    exact_report = verify_exact_identities(20)
    checks.append(CheckReport(
        "exact_identities", float(len(exact_report.failures)), 0.0,
        exact_report.passed,
        f"rational identity checks for steps 1..{exact_report.m_max} at "
        f"amplitude {exact_report.amplitude}"))

    scenario = run_counterexample_scenario(0.1, 0.1, 10,
                                           kind=NormKind.FROBENIUS, tol=tol)
    checks.extend(_prefixed(list(scenario.checks), "scenario_"))
    control = run_counterexample_scenario(0.1, 0.1, 10,
                                          kind=NormKind.FROBENIUS, tol=tol,
                                          force_amplitude=0.0)
    checks.extend(_prefixed(list(control.checks), "control_"))

    lift_rows, lift_checks = _lift_rows(3, 0.1, 5, tol, NormKind.SPECTRAL)
    checks.extend(_prefixed(lift_checks, "lift_"))

    checks.extend(_prefixed(
        _axioms_checks(system, 10, (-50.0, 50.0), 2001, NormKind.SPECTRAL),
        "axioms_"))

    scenario_rows = [dataclasses.asdict(row) for row in scenario.rows]
    report = RunReport(
        command="verify",
        params={
            "tol": tol,
            "grid_agreement_points": 11,
            "exact_m_max": 20,
            "scenario": {"delta": 0.1, "epsilon": 0.1, "horizon": 10,
                         "norm": NormKind.FROBENIUS.value},
            "lift": {"dimension": 3, "delta": 0.1, "horizon": 5,
                     "norm": NormKind.SPECTRAL.value},
            "axioms": {"m_max": 10, "window": [-50.0, 50.0], "grid": 2001,
                       "norm": NormKind.SPECTRAL.value},
        },
        checks=checks,
        tables={"scenario": scenario_rows, "lift": lift_rows},
    )
    if args.csv:
        write_csv(args.csv, scenario_rows, SCENARIO_COLUMNS)
    return _finish(args, report, started)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="satflow",
        description="Transition-matrix flows of linear time-varying systems "
                    "and the companion-form non-saturation counterexample.")
    subparsers = parser.add_subparsers(dest="command", required=True)

    flow = subparsers.add_parser(
        "flow", help="compute a transition matrix and check flow properties")
    flow.add_argument("--system", default="counterexample",
                      help="zero, counterexample, or a coefficient "
                           "expression c(t) for y^(n) = c(t) y^(n-2)")
    flow.add_argument("-n", "--dimension", type=int, default=2)
    flow.add_argument("--from", dest="from_time", type=float, default=0.0)
    flow.add_argument("--to", dest="to_time", type=float, default=1.0)
    flow.add_argument("--tol", type=float, default=1e-10)
    flow.add_argument("--norm", choices=_NORM_CHOICES, default="spectral")
    flow.add_argument("--json", action="store_true")
    flow.set_defaults(handler=_cmd_flow)

    scenario = subparsers.add_parser(
        "counterexample", help="run the non-saturation scenario")
    scenario.add_argument("--delta", type=float, default=0.1)
    scenario.add_argument("--epsilon", type=float, default=0.1)
    scenario.add_argument("--horizon", type=int, default=10)
    scenario.add_argument("--tol", type=float, default=1e-10)
    scenario.add_argument("--norm", choices=_NORM_CHOICES,
                          default="frobenius")
    scenario.add_argument("--csv", default=None,
                          help="write the per-step table to this path")
    scenario.add_argument("--json", action="store_true")
    scenario.set_defaults(handler=_cmd_counterexample)

    lift = subparsers.add_parser(
        "lift", help="transfer the counterexample to dimension n")
    lift.add_argument("-n", "--dimension", type=int, default=3)
    lift.add_argument("--delta", type=float, default=0.1)
    lift.add_argument("--horizon", type=int, default=5)
    lift.add_argument("--tol", type=float, default=1e-10)
    lift.add_argument("--norm", choices=_NORM_CHOICES, default="spectral")
    lift.add_argument("--json", action="store_true")
    lift.set_defaults(handler=_cmd_lift)

    axioms = subparsers.add_parser(
        "axioms", help="family-structure checks for a system")
    axioms.add_argument("--system", default="counterexample")
    axioms.add_argument("-n", "--dimension", type=int, default=2)
    axioms.add_argument("--m-max", type=int, default=10)
    axioms.add_argument("--window", default="-50:50",
                        help="grid window lo:hi (use --window=-50:50)")
    axioms.add_argument("--grid", type=int, default=2001)
    axioms.add_argument("--norm", choices=_NORM_CHOICES, default="spectral")
    axioms.add_argument("--json", action="store_true")
    axioms.set_defaults(handler=_cmd_axioms)

    verify = subparsers.add_parser(
        "verify", help="run every check suite at default settings")
    verify.add_argument("--csv", default=None,
                        help="write the scenario table to this path")
    verify.add_argument("--json", action="store_true")
    verify.set_defaults(handler=_cmd_verify)

    return parser


def main(argv: "list[str] | None" = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (ParseError, ValueError, TypeError) as error:
        print(f"error: {error}", file=sys.stderr)
        return 2
    except IntegrationError as error:
        print(f"error: {error}", file=sys.stderr)
        return 1
