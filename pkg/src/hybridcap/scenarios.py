"""Scenario modes, the run manifest and the matrix runner."""
from __future__ import annotations

import csv
import logging
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

from . import mps
from .costs import AnnualizedCostTable, apply_cost_table, build_cost_cases
from .domain import ILR_FREE, STORAGE_PARTS, ComponentKind, SystemDescription
from .lp import Solution
from .metrics import compute_metrics, write_reports
from .simplex import solve
from .system import Model, build_model

log = logging.getLogger(__name__)
C = ComponentKind

MODES = ("fixed", "optimized", "colocated")
COST_CASES = ("low", "mid")
FORCED_BATTERY_LEVELS_MW = (3750.0, 5000.0, 7500.0, 15000.0)
FIXED_ILR_PV = 1.3
FIXED_ILR_WIND = 1.0
MANIFEST_COLUMNS = ("run_id", "mode", "cost_case", "forced_battery_mw")


@dataclass(frozen=True)
class ScenarioSpec:
    run_id: int
    mode: str
    cost_case: str
    forced_battery_mw: float

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"run {self.run_id}: unknown mode {self.mode!r}")
        if self.forced_battery_mw < 0:
            raise ValueError(f"run {self.run_id}: forced_battery_mw must be >= 0")

    @property
    def key(self) -> tuple[str, str, float]:
        return (self.mode, self.cost_case, self.forced_battery_mw)


def apply_mode(system: SystemDescription, mode: str) -> SystemDescription:
    """Rewrite resource definitions for one interconnection scenario.

    ``fixed`` and ``optimized`` drop storage from VRE sites (standalone
    storage resources stay), ``fixed`` also pins the PV and wind sizing
    ratios; ``colocated`` frees the ratios and keeps every component.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    out = []
    for r in system.colo_resources:
        if r.is_standalone_storage:
            out.append(r)
            continue
        comps = dict(r.components)
        if mode != "colocated":
            for c in STORAGE_PARTS:
                comps.pop(c, None)
            if not r.has(C.PV):
                comps.pop(C.INVERTER, None)
        if mode == "fixed":
            ilr_pv, ilr_wind = FIXED_ILR_PV, FIXED_ILR_WIND
        else:
            ilr_pv = ilr_wind = ILR_FREE
        stripped = len(comps) != len(r.components)
        out.append(replace(
            r, components=comps, ilr_pv=ilr_pv, ilr_wind=ilr_wind,
            power_to_energy_dc=None if stripped else r.power_to_energy_dc,
            power_to_energy_ac=None if stripped else r.power_to_energy_ac))
    return system.with_resources(out)


def standard_manifest() -> list[ScenarioSpec]:
    """The 24-run matrix: cost case outermost, then forced storage, then mode."""
    specs = []
    run = 1
    for case in COST_CASES:
        for mw in FORCED_BATTERY_LEVELS_MW:
            for mode in MODES:
                specs.append(ScenarioSpec(run, mode, case, mw))
                run += 1
    return specs


def check_manifest(specs: list[ScenarioSpec]) -> None:
    ids, keys = set(), set()
    for s in specs:
        if s.run_id in ids:
            raise ValueError(f"duplicate run_id {s.run_id}")
        if s.key in keys:
            raise ValueError(f"duplicate scenario {s.key}")
        ids.add(s.run_id)
        keys.add(s.key)


def read_manifest(path: str | Path) -> list[ScenarioSpec]:
    specs = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = set(MANIFEST_COLUMNS) - set(reader.fieldnames or ())
        if missing:
            raise ValueError(f"{Path(path).name}: missing columns {sorted(missing)}")
        for lineno, row in enumerate(reader, 2):
            try:
                specs.append(ScenarioSpec(int(row["run_id"]), row["mode"].strip(),
                                          row["cost_case"].strip(),
                                          float(row["forced_battery_mw"])))
            except ValueError as exc:
                raise ValueError(f"{Path(path).name}:{lineno}: {exc}") from None
    check_manifest(specs)
    return specs


def write_manifest(specs: list[ScenarioSpec], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(MANIFEST_COLUMNS)
        for s in specs:
            w.writerow([s.run_id, s.mode, s.cost_case, repr(s.forced_battery_mw)])


def prepare(system: SystemDescription, spec: ScenarioSpec,
            tables: dict[str, AnnualizedCostTable] | None) -> SystemDescription:
    if tables is not None:
        if spec.cost_case not in tables:
            raise ValueError(f"run {spec.run_id}: unknown cost case {spec.cost_case!r}")
        system = apply_cost_table(system, tables[spec.cost_case])
    system = apply_mode(system, spec.mode)
    return replace(system, forced_battery_mw=spec.forced_battery_mw)


def solve_scenario(system: SystemDescription, spec: ScenarioSpec,
                   tables: dict[str, AnnualizedCostTable] | None = None
                   ) -> tuple[Model, Solution]:
    model = build_model(prepare(system, spec, tables), name=f"run_{spec.run_id}")
    return model, solve(model.lp)


@dataclass
class RunResult:
    spec: ScenarioSpec
    status: str
    objective: float | None = None
    out_dir: str | None = None
    error: str | None = None


def run_one(system: SystemDescription, spec: ScenarioSpec,
            tables: dict[str, AnnualizedCostTable] | None, out_root: str | Path,
            export_mps: bool = False) -> RunResult:
    out = Path(out_root) / str(spec.run_id)
    out.mkdir(parents=True, exist_ok=True)
    meta = {"run_id": spec.run_id, "mode": spec.mode, "cost_case": spec.cost_case,
            "forced_battery_mw": repr(spec.forced_battery_mw)}
    try:
        model, sol = solve_scenario(system, spec, tables)
        if export_mps:
            mps.export_mps(model.lp, out / "model.mps")
        if not sol.optimal:
            _write_status(out, meta, sol.status)
            return RunResult(spec, sol.status, None, str(out))
        write_reports(compute_metrics(sol, model), sol, model, out, meta)
        return RunResult(spec, sol.status, sol.objective, str(out))
    except Exception as exc:  # isolate failures per run
        log.error("run %s failed: %s", spec.run_id, exc)
        _write_status(out, meta, "error", traceback.format_exc())
        return RunResult(spec, "error", None, str(out), str(exc))


def _write_status(out: Path, meta: dict, status: str, detail: str | None = None) -> None:
    with open(out / "metrics.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["scope", "metric", "value"])
        for k, v in meta.items():
            w.writerow(["run", k, v])
        w.writerow(["run", "status", status])
    if detail:
        (out / "error.txt").write_text(detail, encoding="utf-8")


def run_matrix(system: SystemDescription, manifest: list[ScenarioSpec], out_root: str | Path,
               *, tables: dict[str, AnnualizedCostTable] | None = None,
               workers: int = 1) -> list[RunResult]:
    """Solve every manifest row; failures are recorded and do not stop the matrix."""
    check_manifest(manifest)
    if tables is None:
        tables = build_cost_cases()
    Path(out_root).mkdir(parents=True, exist_ok=True)
    if workers <= 1:
        return [run_one(system, s, tables, out_root) for s in manifest]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(run_one, system, s, tables, out_root) for s in manifest]
        return [f.result() for f in futures]
