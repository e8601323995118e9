import argparse
import json
import os
import pathlib
import sys

# Add project root to Python path to allow importing app modules
project_root = os.path.abspath(os.path.join(os.path.dirname(__file__), '..'))
if project_root not in sys.path:
    sys.path.insert(0, project_root)

try:
    from app.core.logging_utils import configure_logging_from_file
    from app.services.reporting import event_order
    from app.services.scenario_loader import load_scenario
    from app.services.simulator import run
except ImportError as e:
    print(f"Error importing app modules: {e}")
    print("Make sure the script is run from the project root or the PYTHONPATH is set correctly.")
    sys.exit(1)

# --- Configuration ---
GOLDEN_DIR = pathlib.Path(project_root) / "tests" / "fixtures" / "golden"
DEFAULT_SCENARIOS = ["s1-sequential", "s2-lock-denied", "s3-promises", "s4-no-release"]


def golden_record(name: str) -> dict:
    report = run(load_scenario(name))
    return {
        "scenario": report.scenario,
        "seed": report.seed,
        "completed": report.completed,
        "makespan": report.makespan,
        "final_time": report.final_time,
        "order": event_order(report.events),
    }


def main():
    parser = argparse.ArgumentParser(description="Regenerate the golden event-order fixtures of the illustration scenarios.")
    parser.add_argument("scenarios", nargs="*", default=DEFAULT_SCENARIOS, help="Scenario names (default: S1-S4).")
    parser.add_argument("--out", type=pathlib.Path, default=GOLDEN_DIR, help="Fixture directory.")
    parser.add_argument("--check", action="store_true", help="Only compare against the existing fixtures.")
    args = parser.parse_args()

    configure_logging_from_file(console_level="WARNING")
    args.out.mkdir(parents=True, exist_ok=True)
    stale = 0
    for name in args.scenarios:
        record = golden_record(name)
        path = args.out / f"{name}.json"
        if args.check:
            current = json.loads(path.read_text(encoding="utf-8")) if path.exists() else None
            if current != record:
                stale += 1
                print(f"{name}: fixture differs from the current run")
            else:
                print(f"{name}: ok")
            continue
        path.write_text(json.dumps(record, indent=2) + "\n", encoding="utf-8")
        print(f"Wrote {path} ({len(record['order'])} events, makespan {record['makespan']})")

    if stale:
        sys.exit(1)


if __name__ == "__main__":
    main()
