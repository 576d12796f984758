"""Post-processing of solved models into reported quantities and CSV files."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

from . import colo
from .domain import ComponentKind
from .lp import Solution
from .system import FORCED_BATTERY_ROW, Model

C = ComponentKind
CAPACITY_FLOOR = 1e-3  # MW; smaller builds are left out of ratio statistics
DUAL_HEADER = "dual_d_obj_d_rhs"
DISPATCH_COLUMNS = ("theta_pv", "theta_wind", "theta_dc", "pi_dc", "theta_ac", "pi_ac",
                    "theta_grid", "pi_grid", "soc")
RATIO_PAIRS = {
    "ratio_pv_inverter": (C.PV, C.INVERTER),
    "ratio_pv_grid": (C.PV, C.GRID),
    "ratio_wind_grid": (C.WIND, C.GRID),
}


@dataclass
class RunMetrics:
    ratios: dict[str, dict[str, float]] = field(default_factory=dict)
    average_ratios: dict[str, float] = field(default_factory=dict)
    curtailment: dict[str, dict[str, float]] = field(default_factory=dict)
    interconnection_gw: float = 0.0
    interconnection_gw_km: float = 0.0
    interzonal_gw: float = 0.0
    interzonal_gw_km: float = 0.0
    new_line_gw_km: float = 0.0
    total_cost: float = math.nan
    costs: dict[str, float] = field(default_factory=dict)
    marginal_value_of_storage: float | None = None
    storage_split: dict[str, float] = field(default_factory=dict)

    def flat(self) -> dict[str, float]:
        """System-level scalars, in a stable order."""
        out = {
            "total_cost": self.total_cost,
            "interconnection_gw": self.interconnection_gw,
            "interconnection_gw_km": self.interconnection_gw_km,
            "interzonal_gw": self.interzonal_gw,
            "interzonal_gw_km": self.interzonal_gw_km,
            "new_line_gw_km": self.new_line_gw_km,
        }
        for k, v in self.costs.items():
            out[f"cost_{k}"] = v
        for k in RATIO_PAIRS:
            if k in self.average_ratios:
                out[f"avg_{k}"] = self.average_ratios[k]
        for kind in ("pv", "wind"):
            tot = sum(c[f"{kind}_mwh"] for c in self.curtailment.values() if f"{kind}_mwh" in c)
            avail = sum(c[f"{kind}_available_mwh"] for c in self.curtailment.values()
                        if f"{kind}_available_mwh" in c)
            out[f"curtailment_{kind}_mwh"] = tot
            if avail > 0:
                out[f"curtailment_{kind}_pct"] = 100.0 * tot / avail
        if self.marginal_value_of_storage is not None:
            out["marginal_value_of_storage"] = self.marginal_value_of_storage
        for k, v in self.storage_split.items():
            out[f"storage_{k}_pct"] = v
        return out


def _total(sol: Solution, res_id: str, c: ComponentKind) -> float | None:
    key = colo.cap_var(res_id, "total", c)
    return sol.primal.get(key)


def compute_ratios(sol: Solution, model: Model) -> tuple[dict, dict]:
    """Per-resource capacity ratios and their capacity-weighted averages.

    A ratio is reported only when both capacities exceed the floor; the
    weight is the built VRE capacity in the numerator.
    """
    per: dict[str, dict[str, float]] = {}
    acc: dict[str, list[float]] = {k: [0.0, 0.0] for k in RATIO_PAIRS}
    for r in model.system.colo_resources:
        out = {}
        for name, (num, den) in RATIO_PAIRS.items():
            a, b = _total(sol, r.id, num), _total(sol, r.id, den)
            if a is None or b is None or a <= CAPACITY_FLOOR or b <= CAPACITY_FLOOR:
                continue
            out[name] = a / b
            acc[name][0] += a
            acc[name][1] += a * out[name]
        if out:
            per[r.id] = out
    avg = {k: s / w for k, (w, s) in acc.items() if w > 0}
    return per, avg


def compute_gw_km(sol: Solution, model: Model) -> dict[str, float]:
    out = dict(interconnection_gw=0.0, interconnection_gw_km=0.0, interzonal_gw=0.0,
               interzonal_gw_km=0.0, new_line_gw_km=0.0)
    for r in model.system.colo_resources:
        g = _total(sol, r.id, C.GRID)
        if g is None:
            continue
        out["interconnection_gw"] += g / 1000.0
        out["interconnection_gw_km"] += g * r.interconnection_distance / 1000.0
    for ln in model.system.lines:
        new = sol.value(f"line/{ln.id}/new")
        cap = ln.existing_capacity + new
        out["interzonal_gw"] += cap / 1000.0
        out["interzonal_gw_km"] += cap * ln.length / 1000.0
        out["new_line_gw_km"] += new * ln.length / 1000.0
    return out


def compute_curtailment(sol: Solution, model: Model) -> dict[str, dict[str, float]]:
    """Available minus used VRE energy over the modelled horizon, per resource."""
    out: dict[str, dict[str, float]] = {}
    for r in model.system.colo_resources:
        entry = {}
        for kind, name, cf in ((C.PV, "theta_pv", r.cf_pv), (C.WIND, "theta_wind", r.cf_wind)):
            cap = _total(sol, r.id, kind)
            if cap is None:
                continue
            avail = sum(cf) * cap
            used = sum(sol.value(colo.op_var(r.id, name, t)) for t in range(1, model.system.T + 1))
            curt = max(avail - used, 0.0)
            entry[f"{kind.value}_mwh"] = curt
            entry[f"{kind.value}_available_mwh"] = avail
            entry[f"{kind.value}_pct"] = 100.0 * curt / avail if avail > 0 else 0.0
        if entry:
            out[r.id] = entry
    return out


def compute_costs(sol: Solution, model: Model) -> dict[str, float]:
    """Objective split into investment, fixed O&M, variable O&M and unserved energy.

    Rebuilt from the input data rather than the LP cost vector, so the sum
    matching the objective is a genuine check.
    """
    s = model.system
    w = s.time_weight
    inv = fom = vom = 0.0
    for r in s.colo_resources:
        for c in r.capacity_components():
            p = r.components[c]
            inv += p.invest_cost * sol.value(colo.cap_var(r.id, "new", c))
            fom += p.fom_cost * sol.value(colo.cap_var(r.id, "total", c))
        for c, name in colo.VOM_TARGETS:
            if c in r.components:
                flows = sum(sol.value(colo.op_var(r.id, name, t)) for t in range(1, s.T + 1))
                vom += r.components[c].vom_cost * w * flows
    for g in s.thermal_resources:
        new = sol.value(f"{g.id}/new")
        inv += g.invest_cost * new
        fom += g.fom_cost * (g.existing_capacity + new)
        vom += g.vom_plus_fuel_cost * w * sum(sol.value(f"{g.id}/gen/{t}")
                                              for t in range(1, s.T + 1))
    for ln in s.lines:
        inv += ln.expansion_cost * sol.value(f"line/{ln.id}/new")
    nse = s.nse_cost * w * sum(sol.value(f"{z.id}/nse/{t}")
                               for z in s.zones for t in range(1, s.T + 1))
    return {"invest": inv, "fom": fom, "vom": vom, "nse": nse}


def marginal_value_of_storage(sol: Solution) -> float:
    """Value of one more MW of forced storage, $/MW-yr; positive when it lowers cost."""
    if FORCED_BATTERY_ROW not in sol.duals:
        raise KeyError(f"solution has no {FORCED_BATTERY_ROW} row")
    return -sol.duals[FORCED_BATTERY_ROW]


def storage_split(sol: Solution, model: Model) -> dict[str, float]:
    """Share of new AC-deliverable storage power by siting, in percent."""
    buckets = {"with_pv": 0.0, "with_wind": 0.0, "standalone": 0.0}
    for r in model.system.colo_resources:
        coefs = colo.ac_deliverable_new_power(r, model.colo[r.id])
        mw = max(sum(val * sol.primal[model.lp.var_ids[j]] for j, val in coefs.items()), 0.0)
        key = "with_pv" if r.has(C.PV) else "with_wind" if r.has(C.WIND) else "standalone"
        buckets[key] += mw
    total = sum(buckets.values())
    if total <= CAPACITY_FLOOR:
        return {}
    return {k: 100.0 * v / total for k, v in buckets.items()}


def compute_metrics(sol: Solution, model: Model) -> RunMetrics:
    if not sol.optimal:
        raise ValueError(f"metrics need an optimal solution, got {sol.status}")
    per, avg = compute_ratios(sol, model)
    m = RunMetrics(ratios=per, average_ratios=avg, curtailment=compute_curtailment(sol, model),
                   total_cost=sol.objective, costs=compute_costs(sol, model),
                   storage_split=storage_split(sol, model))
    for k, v in compute_gw_km(sol, model).items():
        setattr(m, k, v)
    if FORCED_BATTERY_ROW in sol.duals:
        m.marginal_value_of_storage = marginal_value_of_storage(sol)
    return m


# -- files ------------------------------------------------------------------

def fmt6(v: float) -> str:
    return f"{v:.6g}" if v != 0 else "0"


def fmt_exact(v: float) -> str:
    return repr(float(v) + 0.0)  # + 0.0 drops the sign of negative zero


def _write(path: Path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def write_reports(metrics: RunMetrics, sol: Solution, model: Model, out_dir: str | Path,
                  meta: dict[str, object] | None = None) -> list[Path]:
    """Write capacity, dispatch, metrics, duals and costs CSVs.

    Capacity, dispatch and duals carry full precision so constraint
    residuals can be recomputed from them; metrics and costs use 6
    significant digits.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    s = model.system
    paths = []

    rows = []
    for r in s.colo_resources:
        for c in r.capacity_components():
            p = r.components[c]
            vals = [sol.value(colo.cap_var(r.id, k, c)) for k in ("new", "retired", "total")]
            rows.append([r.id, c.value, fmt_exact(p.existing), *map(fmt_exact, vals)])
    for g in s.thermal_resources:
        new = sol.value(f"{g.id}/new")
        rows.append([g.id, "thermal", fmt_exact(g.existing_capacity), fmt_exact(new), "0.0",
                     fmt_exact(g.existing_capacity + new)])
    for ln in s.lines:
        new = sol.value(f"line/{ln.id}/new")
        rows.append([f"line/{ln.id}", "line", fmt_exact(ln.existing_capacity), fmt_exact(new),
                     "0.0", fmt_exact(ln.existing_capacity + new)])
    paths.append(out / "capacity.csv")
    _write(paths[-1], ["resource", "component", "existing", "new", "retired", "total"], rows)

    rows = []
    for r in s.colo_resources:
        for t in range(1, s.T + 1):
            rows.append([r.id, t] + [fmt_exact(sol.value(colo.op_var(r.id, n, t)))
                                     for n in DISPATCH_COLUMNS])
    paths.append(out / "dispatch.csv")
    _write(paths[-1], ["resource", "t", *DISPATCH_COLUMNS], rows)

    rows = [["run", k, v] for k, v in (meta or {}).items()]
    rows.append(["run", "status", sol.status])
    rows += [["system", k, fmt6(v)] for k, v in metrics.flat().items()]
    for rid, vals in metrics.ratios.items():
        rows += [[rid, k, fmt6(v)] for k, v in vals.items()]
    for rid, vals in metrics.curtailment.items():
        rows += [[rid, f"curtailment_{k}", fmt6(v)] for k, v in vals.items()]
    paths.append(out / "metrics.csv")
    _write(paths[-1], ["scope", "metric", "value"], rows)

    paths.append(out / "duals.csv")
    _write(paths[-1], ["row_id", DUAL_HEADER],
           [[rid, fmt_exact(sol.duals[rid])] for rid in model.lp.row_ids])

    rows = [[k, fmt6(v)] for k, v in metrics.costs.items()]
    rows.append(["total", fmt6(sum(metrics.costs.values()))])
    rows.append(["objective", fmt6(sol.objective)])
    paths.append(out / "costs.csv")
    _write(paths[-1], ["component", "usd_per_yr"], rows)
    return paths


SUMMARY_KEYS = ("run_id", "mode", "cost_case", "forced_battery_mw", "status")


def read_metrics(path: str | Path) -> dict[str, str]:
    """System and run scopes of a metrics.csv as a flat dict."""
    out = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            if row["scope"] in ("run", "system"):
                out[row["metric"]] = row["value"]
    return out


def summarize(runs_dir: str | Path, out_path: str | Path | None = None) -> Path:
    """Collect ``runs/*/metrics.csv`` into one ``summary.csv``."""
    runs = Path(runs_dir)
    records = [read_metrics(p) for p in sorted(runs.glob("*/metrics.csv"))]

    def order(rec):
        try:
            return (0, int(rec.get("run_id", "")))
        except ValueError:
            return (1, rec.get("run_id", ""))

    records.sort(key=order)
    extra = []
    for rec in records:
        for k in rec:
            if k not in SUMMARY_KEYS and k not in extra:
                extra.append(k)
    out = Path(out_path) if out_path else runs / "summary.csv"
    _write(out, [*SUMMARY_KEYS, *extra],
           [[rec.get(k, "") for k in (*SUMMARY_KEYS, *extra)] for rec in records])
    return out
