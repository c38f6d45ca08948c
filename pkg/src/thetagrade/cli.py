"""Command line front end.

Subcommands: grade | cartan | weyl | kw | verify-all.  Reports are
canonical JSON (sorted keys, fixed separators), so identical
(scenario, seed) inputs produce byte-identical output; timing is only
attached when --timing is given.  Exit codes: 0 all checks pass,
1 a mathematical check failed, 2 invalid input.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from importlib import resources

from .classical import GroupError
from .field import FieldError
from .grading import CheckError, SpecError
from .pipeline import run_scenario, run_suite
from .scenario import Scenario


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False) + "\n"


def _load_scenario(args) -> Scenario:
    with open(args.scenario, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    if args.seed is not None:
        data["seed"] = args.seed
    if args.prime is not None:
        data["prime"] = args.prime
    return Scenario.from_dict(data)


def _emit(args, report):
    text = canonical_json(report)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _scenario_command(args, stages):
    started = time.perf_counter()
    scenario = _load_scenario(args)
    report = run_scenario(scenario, stages=stages)
    if args.timing:
        report["timing_ms"] = int((time.perf_counter() - started) * 1000)
    _emit(args, report)
    return 0 if report["ok"] else 1


def default_suite_path():
    return resources.files("thetagrade").joinpath("data/default_suite.json")


def cmd_verify_all(args):
    started = time.perf_counter()
    if args.suite:
        with open(args.suite, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    else:
        raw = json.loads(default_suite_path().read_text(encoding="utf-8"))
    scenarios = []
    for entry in raw["scenarios"]:
        if args.seed is not None:
            entry = dict(entry, seed=args.seed)
        if args.prime is not None:
            entry = dict(entry, prime=args.prime)
        scenarios.append(Scenario.from_dict(entry))
    report = run_suite(scenarios)
    if args.timing:
        report["timing_ms"] = int((time.perf_counter() - started) * 1000)
    _emit(args, report)
    for res in report["scenarios"]:
        status = "PASS" if res.get("ok") else "FAIL"
        line = f"[{status}] {res.get('description', '?')}"
        if "error" in res:
            line += f" ({res['error']})"
        print(line, file=sys.stderr)
    return 0 if report["ok"] else 1


def build_parser():
    ap = argparse.ArgumentParser(prog="theta-grade", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, scenario=True):
        if scenario:
            p.add_argument("--scenario", required=True, help="scenario JSON file")
        p.add_argument("--seed", type=int, default=None, help="seed override")
        p.add_argument("--prime", type=int, default=None, help="prime override")
        p.add_argument("--out", default=None, help="report file (stdout otherwise)")
        p.add_argument("--format", choices=["json"], default="json")
        p.add_argument("--timing", action="store_true", help="attach wall-clock timing")

    for name, stages in [
        ("grade", ("grade",)),
        ("cartan", ("grade", "cartan")),
        ("weyl", ("grade", "weyl")),
        ("kw", ("grade", "kw")),
    ]:
        p = sub.add_parser(name)
        common(p)
        p.set_defaults(func=lambda a, st=stages: _scenario_command(a, st))

    p = sub.add_parser("verify-all")
    p.add_argument("--suite", default=None, help="suite JSON file (bundled default otherwise)")
    common(p, scenario=False)
    p.set_defaults(func=cmd_verify_all)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (SpecError, GroupError, FieldError, FileNotFoundError, json.JSONDecodeError, KeyError, ValueError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return 2
    except CheckError as exc:
        print(f"mathematical check failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
