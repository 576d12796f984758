"""Command-line entry point.

Exit codes: 0 success, 1 validation error, 2 solver failure, 3 I/O error.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import costs, domain, metrics, mps, scenarios, toy
from .lp import LPError
from .simplex import solve
from .system import build_model

OK, INVALID, SOLVER, IO = 0, 1, 2, 3
log = logging.getLogger("hybridcap")


def _load(path: str):
    if not Path(path).is_dir():
        raise FileNotFoundError(f"input directory not found: {path}")
    system = domain.load_system(path)
    problems = domain.validate(system)
    if problems:
        for p in problems:
            print(f"invalid: {p}", file=sys.stderr)
        raise _Exit(INVALID)
    return system


class _Exit(Exception):
    def __init__(self, code: int):
        self.code = code


def _tables(input_dir: Path, case: str) -> dict[str, costs.AnnualizedCostTable]:
    path = input_dir / f"annualized_costs_{case}.csv"
    if path.exists():
        return {case: costs.read_cost_table(path, case)}
    tables = costs.build_cost_cases()
    if case not in tables:
        print(f"unknown cost case {case!r}", file=sys.stderr)
        raise _Exit(INVALID)
    return tables


def cmd_validate(args) -> int:
    system = _load(args.dir)
    print(f"ok: {len(system.zones)} zones, {len(system.colo_resources)} co-located resources, "
          f"{len(system.thermal_resources)} thermal, {len(system.lines)} lines, T={system.T}")
    return OK


def cmd_costs(args) -> int:
    for case, path in costs.run_cost_pipeline(args.dir, args.out).items():
        print(f"{case}: {path}")
    return OK


def cmd_solve(args) -> int:
    system = _load(args.dir)
    spec = scenarios.ScenarioSpec(0, args.mode, args.cost_case or "input",
                                  args.forced_battery_mw if args.forced_battery_mw is not None
                                  else (system.forced_battery_mw or 0.0))
    tables = _tables(Path(args.dir), args.cost_case) if args.cost_case else None
    model = build_model(scenarios.prepare(system, spec, tables), name="solve")
    if args.export_mps:
        mps.export_mps(model.lp, args.export_mps)
        print(f"wrote {args.export_mps}")
    if args.import_solution:
        sol = mps.import_solution(model.lp, args.import_solution)
    else:
        sol = solve(model.lp)
    print(f"status: {sol.status}")
    for k, v in sol.residuals.items():
        print(f"  {k}: {v:.3e}")
    if not sol.optimal:
        return SOLVER
    print(f"objective: {sol.objective:.10g}")
    m = metrics.compute_metrics(sol, model)
    out = Path(args.out)
    meta = {"mode": args.mode, "cost_case": spec.cost_case,
            "forced_battery_mw": repr(spec.forced_battery_mw)}
    metrics.write_reports(m, sol, model, out, meta)
    if not args.import_solution:
        mps.write_solution(sol, out / "solution.csv")
    print(f"reports in {out}")
    return OK


def cmd_matrix(args) -> int:
    system = _load(args.dir)
    manifest = scenarios.read_manifest(args.manifest)
    results = scenarios.run_matrix(system, manifest, args.out, workers=args.workers)
    for r in results:
        obj = "" if r.objective is None else f" {r.objective:.10g}"
        print(f"run {r.spec.run_id} {r.spec.mode} {r.spec.cost_case} "
              f"{r.spec.forced_battery_mw:g}: {r.status}{obj}")
    print(f"summary: {metrics.summarize(args.out)}")
    return OK if all(r.status == "optimal" for r in results) else SOLVER


def cmd_report(args) -> int:
    runs = Path(args.runs_dir)
    if not runs.is_dir():
        raise FileNotFoundError(runs)
    print(metrics.summarize(runs, args.out))
    return OK


def cmd_toy(args) -> int:
    out = Path(args.dir)
    domain.write_system(toy.two_zone_toy(args.hours), out)
    scenarios.write_manifest(scenarios.standard_manifest(), out / "scenarios.csv")
    print(f"wrote toy system and 24-run manifest to {out}")
    return OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hybridcap", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", help="load and check an input directory")
    s.add_argument("dir")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("costs", help="write annualized cost tables")
    s.add_argument("dir", help="directory with optional cost override CSVs")
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_costs)

    s = sub.add_parser("solve", help="solve one scenario")
    s.add_argument("dir")
    s.add_argument("--mode", choices=scenarios.MODES, default="colocated")
    s.add_argument("--cost-case", default=None,
                   help="low or mid; omit to use the costs in the input files")
    s.add_argument("--forced-battery-mw", type=float, default=None)
    s.add_argument("--export-mps", default=None, metavar="PATH")
    s.add_argument("--import-solution", default=None, metavar="PATH",
                   help="verify and report an external solution instead of solving")
    s.add_argument("--out", default="solve_out")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("matrix", help="run a scenario manifest")
    s.add_argument("dir")
    s.add_argument("--manifest", required=True)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--out", default="runs")
    s.set_defaults(func=cmd_matrix)

    s = sub.add_parser("report", help="aggregate run metrics into summary.csv")
    s.add_argument("runs_dir")
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_report)

    s = sub.add_parser("toy", help="write the two-zone demo system")
    s.add_argument("dir")
    s.add_argument("--hours", type=int, default=24)
    s.set_defaults(func=cmd_toy)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except _Exit as e:
        return e.code
    except domain.LoadError as e:
        print(f"invalid: {e}", file=sys.stderr)
        return INVALID
    except (ValueError, LPError, costs.CostError) as e:
        print(f"error: {e}", file=sys.stderr)
        return INVALID
    except OSError as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return IO


if __name__ == "__main__":
    sys.exit(main())
