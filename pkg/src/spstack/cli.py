"""Command-line interface.

Subcommands:
  run             run one scenario or all of them, writing reports to --out
  ik              feasible pose for a goal given as x,y,z,rx,ry,rz
  forces          actuator forces for a stack pose file
  list-scenarios  names and descriptions of the built-in scenarios

Exit codes for ``run``: 0 when every scenario initialized and converged,
2 when any initialization failed, 3 when any final pose violates a
constraint.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .config import Config, load_config
from .initializer import initial_condition
from .scenarios import (
    ScenarioReport,
    format_force_csv,
    render_force_table,
    run_scenario,
)
from .spatial import TaaPose, transform_from_taa
from .stack import StackPose
from .statics import stack_leg_forces


def _parse_goal(text: str) -> TaaPose:
    parts = [float(v) for v in text.split(",")]
    if len(parts) != 6:
        raise argparse.ArgumentTypeError("goal needs 6 numbers: x,y,z,rx,ry,rz")
    return TaaPose(parts[:3], parts[3:])


def _write_outputs(report: ScenarioReport, out_dir: Path):
    out_dir.mkdir(parents=True, exist_ok=True)
    name = report.spec.name
    (out_dir / f"{name}.report.json").write_text(
        json.dumps(report.to_dict(), indent=2) + "\n"
    )
    (out_dir / f"{name}.pose_initial").write_text(
        json.dumps(report.pose_initial.to_dict(), indent=2) + "\n"
    )
    if report.pose_final is not None:
        (out_dir / f"{name}.pose_final").write_text(
            json.dumps(report.pose_final.to_dict(), indent=2) + "\n"
        )
    if report.init_forces is not None:
        (out_dir / f"{name}.forces.csv").write_text(render_force_table(report))


def _cmd_run(args) -> int:
    config = load_config(args.config)
    scenarios = config.scenarios()
    if not args.all:
        scenarios = [s for s in scenarios if s.name == args.scenario]
        if not scenarios:
            print(f"error: no scenario named {args.scenario!r}", file=sys.stderr)
            return 2
    stack = config.stack()
    any_init_failure = False
    any_violation = False
    for spec in scenarios:
        report = run_scenario(spec, stack=stack)
        if not report.init_feasible:
            any_init_failure = True
            print(f"{spec.name}: initialization FAILED ({report.runtime_s:.1f} s)")
        else:
            violated = not report.converged
            any_violation = any_violation or violated
            status = "ok" if not violated else "CONSTRAINT VIOLATION"
            print(
                f"{spec.name}: {status}  max|F| {report.max_abs_initial:.1f} -> "
                f"{report.max_abs_final:.1f} N, mean |F| {report.mean_abs_initial:.1f} -> "
                f"{report.mean_abs_final:.1f} N ({report.runtime_s:.1f} s)"
            )
        if args.out:
            _write_outputs(report, Path(args.out))
    if any_init_failure:
        return 2
    if any_violation:
        return 3
    return 0


def _cmd_ik(args) -> int:
    config = load_config(args.config)
    stack = config.stack()
    goal = transform_from_taa(args.goal.canonical())
    result = initial_condition(stack, goal, config.initializer)
    payload = {
        "feasible": result.feasible,
        "attempts": result.attempts,
        "link_length": result.link_length,
        "pose": result.pose.to_dict(),
        "leg_matrix": result.leg_matrix.tolist(),
    }
    print(json.dumps(payload, indent=2))
    return 0 if result.feasible else 2


def _cmd_forces(args) -> int:
    config = load_config(args.config)
    stack = config.stack()
    pose = StackPose.from_dict(json.loads(Path(args.pose).read_text()))
    forces = stack_leg_forces(stack, pose, config.masses)
    sys.stdout.write(format_force_csv(forces, None))
    return 0


def _cmd_list(args) -> int:
    config = load_config(args.config)
    for spec in config.scenarios():
        print(f"{spec.name}: {spec.description}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spstack",
        description="Feasible and force-optimal poses for Stewart platform stacks",
    )
    parser.add_argument("--config", help="JSON configuration file", default=None)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run scenarios end to end")
    group = p_run.add_mutually_exclusive_group(required=True)
    group.add_argument("--scenario", help="scenario name")
    group.add_argument("--all", action="store_true", help="run every scenario")
    p_run.add_argument("--out", help="directory for reports, poses and CSVs")
    p_run.set_defaults(func=_cmd_run)

    p_ik = sub.add_parser("ik", help="feasible pose for a goal")
    p_ik.add_argument(
        "--goal", type=_parse_goal, required=True, help="x,y,z,rx,ry,rz (m, rad)"
    )
    p_ik.set_defaults(func=_cmd_ik)

    p_forces = sub.add_parser("forces", help="actuator forces for a pose file")
    p_forces.add_argument("--pose", required=True, help="stack pose JSON file")
    p_forces.set_defaults(func=_cmd_forces)

    p_list = sub.add_parser("list-scenarios", help="show available scenarios")
    p_list.set_defaults(func=_cmd_list)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
