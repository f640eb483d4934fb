"""Command-line front end.

Commands: ``check`` (hypothesis verdicts), ``converge`` (convergent and
exponent tables), ``subspace`` (linear-form instances), ``relations``
(search and independence probe), ``scenario`` (full builtin or config-file
runs).  Exit codes: 0 all checks satisfied, 1 some hypothesis violated
(still a valid result), 2 invalid config, 3 a sub-operation refused to
certify.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from fractions import Fraction
from typing import Optional

import yaml

from .criteria import HypothesisSet
from .relations import SearchConfig
from .scenarios import (
    ConfigError,
    Report,
    ScenarioConfig,
    builtin_scenario,
    list_scenarios,
    parse_scenario_config,
    run_scenario,
)


def _parse_window(text: str) -> tuple[int, int]:
    try:
        a, b = text.split("..")
        return int(a), int(b)
    except ValueError as exc:
        raise ConfigError("--window", "expected a..b, got %r" % text) from exc


def _parse_fraction_arg(text: str, flag: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(flag, "expected a rational like 3/5, got %r" % text) from exc


def _load_base_config(args) -> ScenarioConfig:
    if getattr(args, "config", None):
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                payload = yaml.safe_load(fh)
        except OSError as exc:
            raise ConfigError("--config", str(exc)) from exc
        except yaml.YAMLError as exc:
            raise ConfigError("--config", "YAML parse failure: %s" % exc) from exc
        return parse_scenario_config(payload)
    name = getattr(args, "scenario", None) or "corollary"
    return builtin_scenario(name)


def _apply_overrides(config: ScenarioConfig, args) -> ScenarioConfig:
    updates = {}
    if getattr(args, "window", None):
        updates["window"] = _parse_window(args.window)
    delta = getattr(args, "delta", None)
    epsilon = getattr(args, "epsilon", None)
    if delta or epsilon:
        new_h = []
        for h in config.hypotheses:
            kw = dataclasses.asdict(h)
            if delta and kw["delta"] is not None:
                kw["delta"] = _parse_fraction_arg(delta, "--delta")
            if epsilon and kw["epsilon"] is not None:
                kw["epsilon"] = _parse_fraction_arg(epsilon, "--epsilon")
            new_h.append(HypothesisSet(**kw))
        updates["hypotheses"] = tuple(new_h)
    if getattr(args, "bound", None):
        base = config.search or SearchConfig(coefficient_bound=1)
        updates["search"] = dataclasses.replace(base, coefficient_bound=args.bound)
    if getattr(args, "precision", None):
        base = updates.get("search", config.search)
        if base is not None:
            updates["search"] = dataclasses.replace(base, precision_bits=args.precision)
        updates["subspace_precision"] = max(1, min(12, args.precision))
    return dataclasses.replace(config, **updates) if updates else config


def _restrict(config: ScenarioConfig, keep: str, window_overridden: bool) -> ScenarioConfig:
    """Strip the stages a single-purpose command does not run."""
    updates = {
        "hypotheses": config.hypotheses if keep == "check" else (),
        "search": config.search if keep == "relations" else None,
        "probe_bound": config.probe_bound if keep == "relations" else None,
        "subspace_orders": config.subspace_orders if keep == "subspace" else None,
    }
    if keep == "subspace" and (window_overridden or config.subspace_orders is None):
        updates["subspace_orders"] = config.window
    if keep == "relations" and config.search is None:
        updates["search"] = SearchConfig(coefficient_bound=5)
    return dataclasses.replace(config, **updates)


def _emit(report: Report, args, drop_convergents: bool = False) -> int:
    if drop_convergents:
        report.convergents = []
    if args.format == "json":
        text = report.to_json(include_timing=args.timing)
    else:
        text = report.to_table()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return report.exit_code()


def _add_common(parser: argparse.ArgumentParser, with_scenario: bool = True) -> None:
    if with_scenario:
        parser.add_argument("--scenario", help="builtin scenario name")
    parser.add_argument("--config", help="YAML scenario config file")
    parser.add_argument("--window", help="index window a..b")
    parser.add_argument("--delta", help="override delta (rational p/q)")
    parser.add_argument("--epsilon", help="override epsilon (rational p/q)")
    parser.add_argument("--bound", type=int, help="relation search sup-norm bound")
    parser.add_argument("--precision", type=int, help="precision in bits (search) "
                                                      "or digits (instances)")
    parser.add_argument("--format", choices=("json", "table"), default="table")
    parser.add_argument("--out", help="write the report to this path")
    parser.add_argument("--timing", action="store_true",
                        help="include wall time in JSON output (breaks "
                             "byte-determinism)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="transcheck",
        description="exact workbench for growth hypotheses and integer "
                    "relations of rapidly converging series",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser("check", help="run the hypothesis checks")
    _add_common(p_check)
    p_conv = sub.add_parser("converge", help="convergent and exponent tables")
    _add_common(p_conv)
    p_sub = sub.add_parser("subspace", help="linear-form instances over a window")
    _add_common(p_sub)
    p_rel = sub.add_parser("relations", help="relation search and independence probe")
    _add_common(p_rel)
    p_scen = sub.add_parser("scenario", help="run a builtin scenario end to end")
    p_scen.add_argument("name", nargs="?", help="builtin scenario name")
    p_scen.add_argument("--list", action="store_true", help="list builtin scenarios")
    _add_common(p_scen, with_scenario=False)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "scenario":
            if args.list:
                for name in list_scenarios():
                    sys.stdout.write(name + "\n")
                return 0
            if args.config:
                config = _load_base_config(args)
            elif args.name:
                config = builtin_scenario(args.name)
            else:
                raise ConfigError("scenario", "give a builtin name or --config")
            config = _apply_overrides(config, args)
            return _emit(run_scenario(config), args)
        config = _apply_overrides(_load_base_config(args), args)
        config = _restrict(config, args.command, bool(getattr(args, "window", None)))
        report = run_scenario(config)
        return _emit(report, args, drop_convergents=args.command
                     in ("check", "subspace", "relations"))
    except ConfigError as exc:
        sys.stderr.write(str(exc) + "\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
