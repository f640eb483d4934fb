#!/usr/bin/env python3
"""Run every builtin scenario and write canonical JSON reports.

Usage:
    python scripts/run_builtin_scenarios.py [--out-dir reports]
"""

import argparse
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from transcheck.scenarios import builtin_scenario, list_scenarios, run_scenario


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="reports")
    args = parser.parse_args()
    out_dir = pathlib.Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    worst = 0
    for name in list_scenarios():
        report = run_scenario(builtin_scenario(name))
        path = out_dir / (name + ".json")
        path.write_text(report.to_json())
        print(report.to_table())
        print("wrote %s (exit status %d)\n" % (path, report.exit_code()))
        worst = max(worst, report.exit_code())
    return worst


if __name__ == "__main__":
    sys.exit(main())
