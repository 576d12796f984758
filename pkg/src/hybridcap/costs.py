"""Cost pipeline: DC/AC cost split, annuitisation, tax credits, cost cases.

Overnight inputs are quoted per kW (or kWh); model-ready tables are per MW
(or MWh) per year.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping

from .domain import ColoResource, ComponentKind, ComponentParams, SystemDescription

C = ComponentKind

# 2021 bottom-up breakdown, $ million: standalone PV (100 MW DC), standalone
# storage (60 MW / 240 MWh), shared bidirectional inverter (77 MW AC)
BREAKDOWN_2021_ITEMS: dict[str, tuple[float, float, float]] = {
    "pv_module": (33.4, 0.0, 0.0),
    "lithium_ion_battery": (0.0, 53.2, 0.0),
    "solar_inverter": (0.0, 0.0, 0.0),
    "bidirectional_inverter": (0.0, 0.0, 4.5),
    "structural_bos": (12.5, 0.8, 0.0),
    "electrical_bos": (7.2, 9.2, 0.0),
    "installation_labor_equipment": (11.1, 4.1, 0.0),
    "epc_overhead": (5.4, 2.6, 0.0),
    "sales_tax": (3.4, 4.1, 0.3),
    "land_acquisition": (0.0, 0.0, 0.0),
    "permitting_fee": (0.2, 0.2, 0.0),
    "interconnection_fee": (1.4, 0.8, 0.0),
    "contingency": (2.1, 2.5, 0.2),
    "developer_overhead": (2.8, 3.4, 0.2),
    "epc_developer_net_profit": (3.7, 4.5, 0.3),
}
BREAKDOWN_TOTALS = (83.2, 85.4, 5.5)
PV_BASIS_MW_DC = 100.0
STORAGE_BASIS_MWH = 240.0
INVERTER_BASIS_MW_AC = 77.0
INVERTER_HARDWARE_ITEM = "bidirectional_inverter"


class CostError(ValueError):
    pass


@dataclass(frozen=True)
class CostBreakdown2021:
    items: dict[str, tuple[float, float, float]] = field(
        default_factory=lambda: dict(BREAKDOWN_2021_ITEMS))
    pv_basis_mw_dc: float = PV_BASIS_MW_DC
    storage_basis_mwh: float = STORAGE_BASIS_MWH
    inverter_basis_mw_ac: float = INVERTER_BASIS_MW_AC

    def totals(self) -> tuple[float, float, float]:
        sums = [0.0, 0.0, 0.0]
        for vals in self.items.values():
            for k in range(3):
                sums[k] += vals[k]
        return tuple(round(s, 10) for s in sums)

    def check(self, expected: tuple[float, float, float] = BREAKDOWN_TOTALS,
              tol: float = 1e-6) -> None:
        got = self.totals()
        for name, g, e in zip(("pv", "storage", "inverter"), got, expected):
            if abs(g - e) > tol:
                raise CostError(f"{name} column sums to {g}, expected {e}")


@dataclass(frozen=True)
class DcAcSplit:
    """Per-unit 2021 costs in $ million."""

    pv_dc_per_mw: float
    storage_dc_per_mwh: float
    inverter_per_mw_ac: float
    pv_ac_per_mw_ac: float
    storage_ac_per_mwh: float

    @property
    def pv_ratio(self) -> float:
        return self.pv_dc_per_mw / self.pv_ac_per_mw_ac

    @property
    def storage_ratio(self) -> float:
        return self.storage_dc_per_mwh / self.storage_ac_per_mwh


def split_dc_ac(breakdown: CostBreakdown2021 | None = None) -> DcAcSplit:
    """Per-unit DC costs and the DC:AC cost ratios for PV and storage.

    The AC reference cost of each technology is its DC total plus the
    inverter hardware line item, spread over the AC (PV) or energy
    (storage) basis.
    """
    b = breakdown or CostBreakdown2021()
    for name in ("pv_basis_mw_dc", "storage_basis_mwh", "inverter_basis_mw_ac"):
        if getattr(b, name) <= 0:
            raise CostError(f"{name} must be positive")
    pv, stor, inv = b.totals()
    inv_hw = b.items.get(INVERTER_HARDWARE_ITEM, (0.0, 0.0, 0.0))[2]
    return DcAcSplit(
        pv_dc_per_mw=pv / b.pv_basis_mw_dc,
        storage_dc_per_mwh=stor / b.storage_basis_mwh,
        inverter_per_mw_ac=inv / b.inverter_basis_mw_ac,
        pv_ac_per_mw_ac=(pv + inv_hw) / b.inverter_basis_mw_ac,
        storage_ac_per_mwh=(stor + inv_hw) / b.storage_basis_mwh,
    )


@dataclass(frozen=True)
class FinanceParams:
    wacc: float
    lifespan: float
    regional_multiplier: float = 1.0

    def __post_init__(self):
        if not self.wacc > 0:
            raise CostError(f"wacc must be > 0, got {self.wacc}")
        if not self.lifespan >= 1:
            raise CostError(f"lifespan must be >= 1, got {self.lifespan}")


def capital_recovery_factor(wacc: float, lifespan: float) -> float:
    if math.isinf(lifespan):
        return wacc
    return wacc / (1.0 - (1.0 + wacc) ** (-lifespan))


def annuitize(overnight: float, fin: FinanceParams) -> float:
    """Overnight cost (per unit) to an equal annual payment over the lifespan."""
    return overnight * fin.regional_multiplier * capital_recovery_factor(fin.wacc, fin.lifespan)


# (context, component) -> finance assumptions
SOLAR, STANDALONE_STORAGE, WIND = "solar", "standalone_storage", "wind"
CONTEXTS = (SOLAR, STANDALONE_STORAGE, WIND)
DEFAULT_FINANCE: dict[tuple[str, str], FinanceParams] = {
    (SOLAR, "pv"): FinanceParams(0.025, 30),
    (SOLAR, "storage_energy"): FinanceParams(0.025, 15),
    (SOLAR, "inverter"): FinanceParams(0.025, 15),
    (SOLAR, "grid"): FinanceParams(0.044, 60),
    (STANDALONE_STORAGE, "storage_energy"): FinanceParams(0.025, 15),
    (STANDALONE_STORAGE, "inverter"): FinanceParams(0.025, 30),
    (STANDALONE_STORAGE, "grid"): FinanceParams(0.025, 60),
    (WIND, "wind"): FinanceParams(0.032, 30),
    (WIND, "storage_energy"): FinanceParams(0.025, 15),
    (WIND, "inverter"): FinanceParams(0.025, 30),
    (WIND, "grid"): FinanceParams(0.044, 60),
}


@dataclass(frozen=True)
class CostCaseInputs:
    """2030 overnight costs: $/kW (PV per kW DC), $/kWh, $/kW-km; fixed O&M per year."""

    solar_capex: float
    solar_fom: float
    wind_capex: float
    wind_fom: float
    battery_capex: float
    battery_fom: float
    grid_capex_per_kw_km: tuple[float, float]
    inverter_capex: float
    inverter_fom: float


CASE_ENDPOINTS: dict[str, CostCaseInputs] = {
    "low": CostCaseInputs(710, 16.2, 1138, 43, 261, 6.5, (2.9, 6.8), 60, 2.4),
    "mid": CostCaseInputs(771, 17.3, 1308, 46, 290, 7.3, (2.9, 6.8), 83, 2.6),
}


@dataclass(frozen=True)
class TaxCredit:
    ptc_per_mwh: float = 0.0
    itc_fraction: float = 0.0


DEFAULT_CREDITS: dict[str, TaxCredit] = {
    "pv": TaxCredit(ptc_per_mwh=12.7),
    "wind": TaxCredit(ptc_per_mwh=13.5),
    "storage": TaxCredit(itc_fraction=0.351),
}
CCS_45Q_PER_TON = -57.28  # carried as metadata only


@dataclass(frozen=True)
class CostEntry:
    invest: float = 0.0  # $/MW-yr ($/MWh-yr storage; $/MW-km-yr grid)
    fom: float = 0.0
    vom: float = 0.0


@dataclass(frozen=True)
class AnnualizedCostTable:
    case: str
    entries: dict[tuple[str, str], CostEntry]
    overnight: CostCaseInputs | None = None
    grid_reference_rate: float = 2.9  # $/kW-km the grid rows are priced at

    def get(self, context: str, component: str) -> CostEntry:
        return self.entries.get((context, component), CostEntry())


def apply_tax_credits(table: AnnualizedCostTable,
                      policy: Mapping[str, TaxCredit] | None) -> AnnualizedCostTable:
    """Fold PTCs into VOM (negative) and ITCs into storage investment."""
    if not policy:
        return table
    tech_of = {"pv": "pv", "wind": "wind", "storage_energy": "storage"}
    for tech, credit in policy.items():
        if credit.ptc_per_mwh and credit.itc_fraction:
            raise CostError(f"{tech}: both PTC and ITC assigned; apply only one")
        if not 0 <= credit.itc_fraction < 1:
            raise CostError(f"{tech}: itc_fraction out of [0,1)")
    out = {}
    for key, e in table.entries.items():
        credit = policy.get(tech_of.get(key[1], ""))
        if credit is None:
            out[key] = e
            continue
        out[key] = CostEntry(
            invest=max(0.0, e.invest * (1.0 - credit.itc_fraction)),
            fom=e.fom,
            vom=e.vom - credit.ptc_per_mwh,
        )
    return replace(table, entries=out)


def project_overnight(base: CostCaseInputs, decline: Mapping[str, float]) -> CostCaseInputs:
    """Apply fractional cost declines (e.g. ``{"solar_capex": 0.3}``) to a base year."""
    changes = {}
    for name, frac in decline.items():
        if not hasattr(base, name) or name == "grid_capex_per_kw_km":
            raise CostError(f"unknown cost field {name!r}")
        changes[name] = getattr(base, name) * (1.0 - frac)
    return replace(base, **changes)


def annualize_case(case: str, inputs: CostCaseInputs,
                   finance: Mapping[tuple[str, str], FinanceParams] | None = None
                   ) -> AnnualizedCostTable:
    fin = dict(DEFAULT_FINANCE)
    fin.update(finance or {})
    k = 1000.0  # per kW -> per MW
    overnight = {
        "pv": (inputs.solar_capex * k, inputs.solar_fom * k),
        "wind": (inputs.wind_capex * k, inputs.wind_fom * k),
        "storage_energy": (inputs.battery_capex * k, inputs.battery_fom * k),
        "inverter": (inputs.inverter_capex * k, inputs.inverter_fom * k),
        "grid": (inputs.grid_capex_per_kw_km[0] * k, 0.0),
    }
    entries = {}
    for (ctx, comp), fp in fin.items():
        capex, fom = overnight[comp]
        entries[(ctx, comp)] = CostEntry(invest=annuitize(capex, fp), fom=fom)
    return AnnualizedCostTable(case, entries, inputs, inputs.grid_capex_per_kw_km[0])


def build_cost_cases(
    endpoints: Mapping[str, CostCaseInputs] | None = None,
    *,
    base: CostCaseInputs | None = None,
    decline: Mapping[str, Mapping[str, float]] | None = None,
    finance: Mapping[tuple[str, str], FinanceParams] | None = None,
    credits: Mapping[str, TaxCredit] | None = DEFAULT_CREDITS,
) -> dict[str, AnnualizedCostTable]:
    """Model-ready low/mid cost tables.

    Uses the shipped 2030 endpoints unless ``base`` plus per-case
    ``decline`` factors are given to project them.
    """
    if base is not None:
        if not decline:
            raise CostError("projection from a base year needs decline factors per case")
        endpoints = {case: project_overnight(base, d) for case, d in decline.items()}
    elif endpoints is None:
        endpoints = CASE_ENDPOINTS
    return {
        case: apply_tax_credits(annualize_case(case, inp, finance), credits)
        for case, inp in endpoints.items()
    }


def context_of(res: ColoResource) -> str:
    if res.has(C.PV):
        return SOLAR
    if res.has(C.WIND):
        return WIND
    return STANDALONE_STORAGE


def apply_cost_table(system: SystemDescription, table: AnnualizedCostTable) -> SystemDescription:
    """Rewrite every co-located resource's component costs from ``table``."""
    out = []
    for r in system.colo_resources:
        ctx = context_of(r)
        comps = {}
        for c, p in r.components.items():
            e = table.get(ctx, c.value)
            invest, fom = e.invest, e.fom
            if c is C.GRID:
                rate = r.grid_cost_per_kw_km
                scale = 1.0 if rate is None else rate / table.grid_reference_rate
                invest *= r.interconnection_distance * scale
                fom *= r.interconnection_distance * scale
            comps[c] = replace(p, invest_cost=invest, fom_cost=fom, vom_cost=e.vom)
        out.append(replace(r, components=comps))
    return system.with_resources(out)


# -- CSV -------------------------------------------------------------------

def write_cost_table(table: AnnualizedCostTable, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["context", "component", "invest", "fom", "vom"])
        w.writerow(["meta", "grid_reference_rate_per_kw_km", repr(table.grid_reference_rate), "", ""])
        for (ctx, comp), e in sorted(table.entries.items()):
            w.writerow([ctx, comp, repr(e.invest), repr(e.fom), repr(e.vom)])


def read_cost_table(path: str | Path, case: str | None = None) -> AnnualizedCostTable:
    path = Path(path)
    entries = {}
    ref = 2.9
    with open(path, newline="", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.DictReader(fh), 2):
            try:
                if row["context"] == "meta":
                    ref = float(row["invest"])
                    continue
                entries[(row["context"], row["component"])] = CostEntry(
                    float(row["invest"]), float(row["fom"]), float(row["vom"]))
            except (KeyError, TypeError, ValueError) as exc:
                raise CostError(f"{path.name}:{lineno}: malformed row ({exc})") from None
    if case is None:
        case = path.stem.replace("annualized_costs_", "")
    return AnnualizedCostTable(case, entries, None, ref)


def read_breakdown(path: str | Path) -> CostBreakdown2021:
    items = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.DictReader(fh), 2):
            try:
                items[row["line_item"]] = (float(row["standalone_pv"]),
                                           float(row["standalone_storage"]),
                                           float(row["inverter"]))
            except (KeyError, TypeError, ValueError) as exc:
                raise CostError(f"{Path(path).name}:{lineno}: malformed row ({exc})") from None
    return CostBreakdown2021(items)


def write_breakdown(b: CostBreakdown2021, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["line_item", "standalone_pv", "standalone_storage", "inverter"])
        for k, v in b.items.items():
            w.writerow([k, *v])


def read_finance(path: str | Path) -> dict[tuple[str, str], FinanceParams]:
    out = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.DictReader(fh), 2):
            try:
                out[(row["context"], row["component"])] = FinanceParams(
                    float(row["wacc"]), float(row["lifespan"]),
                    float(row.get("regional_multiplier") or 1.0))
            except (KeyError, TypeError, ValueError) as exc:
                raise CostError(f"{Path(path).name}:{lineno}: malformed row ({exc})") from None
    return out


def read_credits(path: str | Path) -> dict[str, TaxCredit]:
    out = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.DictReader(fh), 2):
            try:
                out[row["technology"]] = TaxCredit(float(row.get("ptc_per_mwh") or 0.0),
                                                   float(row.get("itc_fraction") or 0.0))
            except (KeyError, TypeError, ValueError) as exc:
                raise CostError(f"{Path(path).name}:{lineno}: malformed row ({exc})") from None
    return out


def run_cost_pipeline(input_dir: str | Path, out_dir: str | Path | None = None
                      ) -> dict[str, Path]:
    """Build both cost cases from optional CSV overrides in ``input_dir``."""
    d = Path(input_dir)
    out = Path(out_dir) if out_dir else d
    breakdown = read_breakdown(d / "cost_breakdown_2021.csv") \
        if (d / "cost_breakdown_2021.csv").exists() else CostBreakdown2021()
    breakdown.check()
    finance = read_finance(d / "finance_params.csv") if (d / "finance_params.csv").exists() else None
    credits = read_credits(d / "policy_credits.csv") \
        if (d / "policy_credits.csv").exists() else DEFAULT_CREDITS
    tables = build_cost_cases(finance=finance, credits=credits)
    out.mkdir(parents=True, exist_ok=True)
    paths = {}
    for case, table in tables.items():
        p = out / f"annualized_costs_{case}.csv"
        write_cost_table(table, p)
        paths[case] = p
    return paths


def unit_params(invest: float = 0.0, fom: float = 0.0, **kw) -> ComponentParams:
    return ComponentParams(invest_cost=invest, fom_cost=fom, **kw)
