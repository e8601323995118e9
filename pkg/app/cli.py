# app/cli.py
# Usage: python -m app run s3-promises --out runs/s3
import argparse
import logging
import pathlib
import sys
from typing import List, Optional

from app.core.config import settings
from app.core.exceptions import ExecutiveError
from app.core.logging_utils import configure_logging_from_file
from app.models.enums import SearchMode
from app.services import experiments, reporting, trace_checks
from app.services.event_log import read_jsonl
from app.services.pddl_parser import parse_domain, parse_problem
from app.services.planner import plan_problem
from app.services.scenario_loader import load_scenario
from app.services.simulator import run as run_scenario

logger = logging.getLogger("app.cli")  # Logger for this module


def _events_path(reference: str) -> pathlib.Path:
    """Accepts either an events.jsonl file or a run directory containing one."""
    path = pathlib.Path(reference)
    if path.is_dir():
        return path / reporting.REPORT_FILES["jsonlines"]
    return path


def _on_off(value: str) -> bool:
    if value not in ("on", "off"):
        raise argparse.ArgumentTypeError("expected 'on' or 'off'")
    return value == "on"


def cmd_run(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario).with_overrides(
        seed=args.seed, promises=args.promises, lookahead=args.lookahead
    )
    report = run_scenario(scenario)
    out_dir = pathlib.Path(args.out) if args.out else settings.OUTPUT_DIR / scenario.name
    reporting.emit_all(report, out_dir)
    print(reporting.render_text(report), end="")
    print(f"Wrote {', '.join(reporting.REPORT_FILES.values())} to {out_dir}")
    return 0 if report.completed and not report.invariant_violations else 1


def cmd_plan(args: argparse.Namespace) -> int:
    domain_path, problem_path = pathlib.Path(args.domain), pathlib.Path(args.problem)
    domain = parse_domain(domain_path.read_text(encoding="utf-8"), source=str(domain_path))
    problem = parse_problem(problem_path.read_text(encoding="utf-8"), domain, source=str(problem_path))
    result = plan_problem(domain, problem, mode=SearchMode(args.mode))
    if not result.solved:
        print(f"no plan: {result.outcome.value} after {result.expanded} nodes")
        return 1
    for line in result.plan.to_lines():
        print(line)
    logger.info(f"Plan with {len(result.plan)} steps, makespan {result.plan.makespan}")
    return 0


def cmd_replay(args: argparse.Namespace) -> int:
    report = reporting.replay(_events_path(args.events))
    print(reporting.render_text(report), end="")
    print(reporting.render_gantt(report), end="")
    return 0


def cmd_compare(args: argparse.Namespace) -> int:
    baseline = reporting.replay(_events_path(args.baseline))
    promising = reporting.replay(_events_path(args.promises))
    comparison = experiments.compare(baseline, promising)
    print(comparison.model_dump_json(indent=2))
    return 0


def cmd_batch(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario)
    out_dir = pathlib.Path(args.out) if args.out else None
    summary = experiments.batch(scenario, seeds=args.seeds, out_dir=out_dir)
    print(summary.model_dump_json(indent=2))
    return 0


def cmd_check(args: argparse.Namespace) -> int:
    events = read_jsonl(_events_path(args.events))
    scenario = load_scenario(args.scenario) if args.scenario else None
    results = trace_checks.run_all(events, scenario)
    failed = False
    for name, problems in results.items():
        print(f"{name}: {'ok' if not problems else f'{len(problems)} violation(s)'}")
        for problem in problems:
            print(f"  {problem}")
        failed = failed or bool(problems)
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="app", description=settings.PROJECT_NAME)
    parser.add_argument("--log-level", default=None, help="console log level (default from logging_config.json)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="simulate a scenario and write its reports")
    p.add_argument("scenario", help="scenario file or name of a shipped scenario")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--promises", type=_on_off, default=None, metavar="on|off")
    p.add_argument("--lookahead", type=int, default=None, help="force every lookahead to this many ticks")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("plan", help="plan a PDDL problem and print the timed plan")
    p.add_argument("domain")
    p.add_argument("problem")
    p.add_argument("--mode", choices=("greedy", "uniform"), default=settings.PLANNER_MODE)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("replay", help="rebuild the reports of a recorded event log")
    p.add_argument("events")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("compare", help="compare a baseline run with a promises run")
    p.add_argument("baseline")
    p.add_argument("promises")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("batch", help="run a scenario over several seeds with promises off and on")
    p.add_argument("scenario")
    p.add_argument("--seeds", type=int, default=settings.BATCH_SEEDS)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("check", help="run the trace checkers over an event log")
    p.add_argument("events")
    p.add_argument("scenario", nargs="?", default=None)
    p.set_defaults(func=cmd_check)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging_from_file(console_level=args.log_level)
    try:
        return args.func(args)
    except ExecutiveError as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
