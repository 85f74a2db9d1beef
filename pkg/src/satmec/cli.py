"""Command-line drivers: ``satmec {validate,case-study,orchestrate,placement}``.

Exit status is 0 on success, 1 on a domain violation (invalid topology,
infeasible problem, broken ordering) and 2 on I/O or parse failures. Every
output file is a CSV with a fixed column order and ``\\n`` line endings, so
reruns with the same seed are byte-identical.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence

from .model import MecServer, validate_topology
from .optimizer import (
    MAX_EXACT_ASSIGNMENTS,
    PLAN_CSV_HEADER,
    build_process,
    exact_size,
    evaluate_plan,
    optimize_process,
    plan_objective,
    plan_rows,
    satellite_only_baseline,
    state_oriented_baseline,
)
from .orchestration import TIMELINE_CSV_HEADER, UavFleet, run_orchestration, timeline_rows
from .placement import PLACEMENT_CSV_HEADER, InfeasiblePlacementError, placement_rows
from .scenario import Scenario, ScenarioError, load_scenario

EXIT_OK, EXIT_DOMAIN, EXIT_IO = 0, 1, 2

BUNDLED = {
    "validate": "case_study.yaml",
    "case-study": "case_study.yaml",
    "orchestrate": "demand_periods.yaml",
    "placement": "placement_ring4.yaml",
}

COMPARISON_CSV_HEADER = ("scheme", "predicted_s", "realized_mean_s", "realized_p50_s", "realized_p95_s", "trials")


class CliError(Exception):
    def __init__(self, message: str, status: int):
        super().__init__(message)
        self.status = status


@dataclass(frozen=True)
class RunConfig:
    command: str
    scenario: Path
    out: Path
    seed: int = 1
    trials: int = 10000
    method: str = "all"

    def __post_init__(self) -> None:
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")
        if self.trials < 0:
            raise ValueError("trials must be nonnegative")
        if not str(self.scenario) or not str(self.out):
            raise ValueError("paths must be nonempty")


def bundled_path(name: str) -> Path:
    return Path(str(resources.files("satmec") / "data" / name))


def _load(path: Path) -> Scenario:
    try:
        return load_scenario(path)
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror or exc}", EXIT_IO) from None
    except ScenarioError as exc:
        raise CliError(f"{path}: {exc}", EXIT_IO) from None
    except ValueError as exc:
        raise CliError(f"{path}: {exc}", EXIT_IO) from None


def _write_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence[str]]) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc.strerror or exc}", EXIT_IO) from None


def _require_valid(scenario: Scenario) -> None:
    problems = validate_topology(scenario.topology)
    if problems:
        raise CliError("invalid topology:\n  " + "\n  ".join(problems), EXIT_DOMAIN)


def cmd_validate(cfg: RunConfig) -> int:
    scenario = _load(cfg.scenario)
    problems = validate_topology(scenario.topology)
    for p in problems:
        print(p)
    if problems:
        print(f"{len(problems)} violation(s)")
        return EXIT_DOMAIN
    print(f"{cfg.scenario}: ok")
    return EXIT_OK


def cmd_case_study(cfg: RunConfig) -> int:
    scenario = _load(cfg.scenario)
    _require_valid(scenario)
    if scenario.channel is None or not scenario.tasks or not scenario.durations:
        raise CliError("case study needs channel, tasks and process sections", EXIT_DOMAIN)
    try:
        proc = build_process(scenario.topology, scenario.channel, scenario.tasks, scenario.durations)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_DOMAIN) from None

    plans = []
    methods = ("exact", "alternating") if cfg.method == "all" else (cfg.method,)
    for method in methods:
        if method == "exact" and exact_size(proc) > MAX_EXACT_ASSIGNMENTS:
            print(
                f"warning: exact skipped, {exact_size(proc)} assignments exceed {MAX_EXACT_ASSIGNMENTS}",
                file=sys.stderr,
            )
            continue
        plans.append((method, optimize_process(proc, method)[0]))
    plans.append(("state-oriented", state_oriented_baseline(proc)))
    plans.append(("satellite-only", satellite_only_baseline(proc)))

    comparison, plan_csv, summary = [], [], {}
    for name, plan in plans:
        predicted = plan_objective(proc, plan).total
        row = [name, repr(predicted)]
        if cfg.trials:
            st = evaluate_plan(plan, proc, scenario.fading, cfg.trials, cfg.seed)
            row += [repr(st.mean), repr(st.p50), repr(st.p95), str(st.trials)]
            summary[name] = st.mean
        else:
            row += ["", "", "", "0"]
            summary[name] = predicted
        comparison.append(row)
        plan_csv.extend(plan_rows(proc, plan, name))
    _write_csv(cfg.out / "comparison.csv", COMPARISON_CSV_HEADER, comparison)
    _write_csv(cfg.out / "plans.csv", PLAN_CSV_HEADER, plan_csv)

    basis = "realized mean" if cfg.trials else "predicted"
    for name, value in sorted(summary.items(), key=lambda kv: (kv[1], kv[0])):
        print(f"{name:15s} {value:.6g} s ({basis})")
    proposed = [n for n in ("exact", "alternating") if n in summary]
    best = min(plan_objective(proc, p).total for n, p in plans if n in proposed)
    ok = all(best <= plan_objective(proc, p).total * (1 + 1e-9) for n, p in plans if n not in proposed)
    print(f"ordering proposed <= baselines (predicted): {'holds' if ok else 'VIOLATED'}")
    return EXIT_OK if ok else EXIT_DOMAIN


def cmd_orchestrate(cfg: RunConfig) -> int:
    scenario = _load(cfg.scenario)
    _require_valid(scenario)
    if not scenario.periods:
        raise CliError("scenario defines no demand periods", EXIT_DOMAIN)
    if scenario.channel is None:
        raise CliError("orchestration needs a channel section", EXIT_DOMAIN)
    fleet = scenario.fleet or UavFleet(0, 100.0, MecServer(1.0), 1.0, 1.0, 1.0, 0.0)
    timeline = run_orchestration(scenario.periods, scenario.topology, fleet, scenario.channel)
    _write_csv(cfg.out / "timeline.csv", TIMELINE_CSV_HEADER, timeline_rows(timeline))
    ref = timeline.reference_energy
    saving = 100.0 * (1.0 - timeline.energy / ref) if ref > 0 else 0.0
    print(f"on-demand energy {timeline.energy:.6g} J, always-on {ref:.6g} J, savings {saving:.2f}%")
    return EXIT_OK


def cmd_placement(cfg: RunConfig) -> int:
    scenario = _load(cfg.scenario)
    if scenario.placement is None:
        raise CliError("scenario has no placement section", EXIT_DOMAIN)
    methods = ("exhaustive", "greedy") if cfg.method in ("all", "both") else (cfg.method,)
    try:
        rows = placement_rows(scenario.placement, methods)
    except InfeasiblePlacementError as exc:
        raise CliError(f"infeasible placement: {exc}", EXIT_DOMAIN) from None
    _write_csv(cfg.out / "placement.csv", PLACEMENT_CSV_HEADER, rows)
    for subset, cost, method in rows:
        print(f"{method:10s} {{{subset}}} cost {cost}")
    return EXIT_OK


COMMANDS = {
    "validate": cmd_validate,
    "case-study": cmd_case_study,
    "orchestrate": cmd_orchestrate,
    "placement": cmd_placement,
}

METHODS = {
    "case-study": ("all", "exact", "alternating"),
    "placement": ("all", "both", "exhaustive", "greedy"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="satmec", description="Satellite-integrated MEC experiments.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--scenario", type=Path, help=f"scenario YAML (default: bundled {BUNDLED[name]})")
        if name != "validate":
            p.add_argument("--out", type=Path, default=Path("out"), help="output directory (default: out)")
        if name == "case-study":
            p.add_argument("--seed", type=int, default=1, help="master seed for fading draws")
            p.add_argument("--trials", type=int, default=10000, help="Monte Carlo trials, 0 for predicted only")
        if name in METHODS:
            p.add_argument("--method", choices=METHODS[name], default="all")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig(
            command=args.command,
            scenario=args.scenario or bundled_path(BUNDLED[args.command]),
            out=getattr(args, "out", Path("out")),
            seed=getattr(args, "seed", 1),
            trials=getattr(args, "trials", 0),
            method=getattr(args, "method", "all"),
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        return COMMANDS[cfg.command](cfg)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.status


if __name__ == "__main__":
    sys.exit(main())
