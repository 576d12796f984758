"""System description types, CSV ingestion and validation.

All magnitudes are in MW, MWh, hours, $/yr and km. Series are 1-indexed in
the CSV files (``t = 1..T``) and stored as tuples.
"""
from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Iterable


class ComponentKind(str, enum.Enum):
    GRID = "grid"
    PV = "pv"
    WIND = "wind"
    STORAGE_ENERGY = "storage_energy"
    INVERTER = "inverter"
    CHARGE_DC = "charge_dc"
    DISCHARGE_DC = "discharge_dc"
    CHARGE_AC = "charge_ac"
    DISCHARGE_AC = "discharge_ac"

    def __str__(self) -> str:
        return self.value


C = ComponentKind
COMPONENT_ORDER = tuple(ComponentKind)
STORAGE_PARTS = (C.STORAGE_ENERGY, C.CHARGE_DC, C.DISCHARGE_DC, C.CHARGE_AC, C.DISCHARGE_AC)
ILR_FREE = -1.0
DEFAULT_NSE_COST = 50_000.0


class LoadError(ValueError):
    """Input file problem; message names the file and line."""

    def __init__(self, path: Path | str, line: int | None, message: str):
        self.path = Path(path)
        self.line = line
        where = f"{self.path.name}:{line}" if line is not None else self.path.name
        super().__init__(f"{where}: {message}")


@dataclass(frozen=True)
class ComponentParams:
    existing: float = 0.0
    max_capacity: float | None = None  # None means unbounded
    min_capacity: float = 0.0
    invest_cost: float = 0.0
    fom_cost: float = 0.0
    vom_cost: float = 0.0


@dataclass(frozen=True)
class Zone:
    id: str
    demand: tuple[float, ...]


@dataclass(frozen=True)
class TransportLine:
    from_zone: str
    to_zone: str
    existing_capacity: float = 0.0
    max_expansion: float = 0.0
    expansion_cost: float = 0.0
    length: float = 0.0

    @property
    def id(self) -> str:
        return f"{self.from_zone}-{self.to_zone}"


@dataclass(frozen=True)
class ColoResource:
    """One interconnection point with any mix of PV, wind and storage.

    ``components`` maps each present component to its capacity bounds and
    costs. DC (or AC) storage flows exist when both ``charge_dc`` and
    ``discharge_dc`` (or the AC pair) are present; the side is symmetric when
    its power-to-energy ratio is set, otherwise its charge and discharge
    capacities are sized separately.
    """

    id: str
    zone: str
    components: dict[ComponentKind, ComponentParams]
    cf_pv: tuple[float, ...] = ()
    cf_wind: tuple[float, ...] = ()
    inverter_efficiency: float = 1.0
    eta_dc_charge: float = 1.0
    eta_dc_discharge: float = 1.0
    eta_ac_charge: float = 1.0
    eta_ac_discharge: float = 1.0
    self_discharge: float = 0.0
    power_to_energy_dc: float | None = None
    power_to_energy_ac: float | None = None
    ilr_pv: float = ILR_FREE
    ilr_wind: float = ILR_FREE
    interconnection_distance: float = 0.0
    grid_cost_per_kw_km: float | None = None

    def has(self, kind: ComponentKind) -> bool:
        return kind in self.components

    @property
    def components_present(self) -> frozenset[ComponentKind]:
        return frozenset(self.components)

    @property
    def has_dc_storage(self) -> bool:
        return self.has(C.STORAGE_ENERGY) and self.has(C.CHARGE_DC) and self.has(C.DISCHARGE_DC)

    @property
    def has_ac_storage(self) -> bool:
        return self.has(C.STORAGE_ENERGY) and self.has(C.CHARGE_AC) and self.has(C.DISCHARGE_AC)

    @property
    def symmetric_dc(self) -> bool:
        return self.has_dc_storage and self.power_to_energy_dc is not None

    @property
    def symmetric_ac(self) -> bool:
        return self.has_ac_storage and self.power_to_energy_ac is not None

    @property
    def is_standalone_storage(self) -> bool:
        return self.has(C.STORAGE_ENERGY) and not (self.has(C.PV) or self.has(C.WIND))

    def capacity_components(self) -> list[ComponentKind]:
        """Present components that carry their own capacity decision.

        Charge/discharge pairs on a symmetric side are sized through the
        energy capacity and so carry no separate capacity variables.
        """
        out = []
        for c in COMPONENT_ORDER:
            if c not in self.components:
                continue
            if c in (C.CHARGE_DC, C.DISCHARGE_DC) and self.symmetric_dc:
                continue
            if c in (C.CHARGE_AC, C.DISCHARGE_AC) and self.symmetric_ac:
                continue
            out.append(c)
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ColoResource):
            return NotImplemented
        return all(getattr(self, f.name) == getattr(other, f.name) for f in fields(self))

    __hash__ = None  # type: ignore[assignment]


@dataclass(frozen=True)
class ThermalResource:
    id: str
    zone: str
    existing_capacity: float = 0.0
    max_new: float = 0.0
    invest_cost: float = 0.0
    fom_cost: float = 0.0
    vom_plus_fuel_cost: float = 0.0
    qualifies_rps: bool = False


@dataclass(frozen=True)
class SystemDescription:
    zones: tuple[Zone, ...]
    lines: tuple[TransportLine, ...] = ()
    colo_resources: tuple[ColoResource, ...] = ()
    thermal_resources: tuple[ThermalResource, ...] = ()
    forced_battery_mw: float | None = None
    rps_share: float | None = None
    nse_cost: float = DEFAULT_NSE_COST
    time_weight: float = 1.0
    horizon: int = field(default=0)

    def __post_init__(self):
        if self.horizon == 0 and self.zones:
            object.__setattr__(self, "horizon", len(self.zones[0].demand))

    @property
    def T(self) -> int:
        return self.horizon

    def zone_ids(self) -> list[str]:
        return [z.id for z in self.zones]

    def resource(self, rid: str) -> ColoResource:
        for r in self.colo_resources:
            if r.id == rid:
                return r
        raise KeyError(rid)

    def with_resources(self, resources: Iterable[ColoResource]) -> "SystemDescription":
        return replace(self, colo_resources=tuple(resources))


@dataclass(frozen=True)
class Violation:
    entity: str
    field: str
    rule: str

    def __str__(self) -> str:
        return f"{self.entity}: {self.field} {self.rule}"


# -- validation -------------------------------------------------------------

def _fraction_open_closed(v: float) -> bool:
    return 0.0 < v <= 1.0


def validate(system: SystemDescription) -> list[Violation]:
    """Check every type invariant; an empty list means the system is valid."""
    out: list[Violation] = []
    T = system.T
    zone_ids = set()
    if T < 1:
        out.append(Violation("system", "horizon", "must be >= 1"))
    for z in system.zones:
        if z.id in zone_ids:
            out.append(Violation(f"zone {z.id}", "id", "duplicated"))
        zone_ids.add(z.id)
        if len(z.demand) != T:
            out.append(Violation(f"zone {z.id}", "demand", f"length {len(z.demand)} != T={T}"))
        if any(d < 0 or math.isnan(d) for d in z.demand):
            out.append(Violation(f"zone {z.id}", "demand", "must be >= 0"))

    seen_lines = set()
    for ln in system.lines:
        ent = f"line {ln.id}"
        if ln.from_zone == ln.to_zone:
            out.append(Violation(ent, "to_zone", "must differ from from_zone"))
        for zf in ("from_zone", "to_zone"):
            if getattr(ln, zf) not in zone_ids:
                out.append(Violation(ent, zf, f"unknown zone {getattr(ln, zf)!r}"))
        for f in ("existing_capacity", "max_expansion", "expansion_cost", "length"):
            if getattr(ln, f) < 0:
                out.append(Violation(ent, f, "must be >= 0"))
        if ln.id in seen_lines:
            out.append(Violation(ent, "id", "duplicated"))
        seen_lines.add(ln.id)

    ids = set()
    for r in system.colo_resources:
        out.extend(_validate_colo(r, T, zone_ids))
        if r.id in ids:
            out.append(Violation(f"resource {r.id}", "id", "duplicated"))
        ids.add(r.id)
    for g in system.thermal_resources:
        ent = f"thermal {g.id}"
        if g.zone not in zone_ids:
            out.append(Violation(ent, "zone", f"unknown zone {g.zone!r}"))
        for f in ("existing_capacity", "max_new", "invest_cost", "fom_cost", "vom_plus_fuel_cost"):
            if getattr(g, f) < 0:
                out.append(Violation(ent, f, "must be >= 0"))
        if g.id in ids:
            out.append(Violation(ent, "id", "duplicated"))
        ids.add(g.id)

    if system.forced_battery_mw is not None and system.forced_battery_mw < 0:
        out.append(Violation("policy", "forced_battery_mw", "must be >= 0"))
    if system.rps_share is not None and not 0.0 <= system.rps_share <= 1.0:
        out.append(Violation("policy", "rps_share", "out of [0,1]"))
    if system.nse_cost < 0:
        out.append(Violation("policy", "nse_cost", "must be >= 0"))
    if system.time_weight <= 0:
        out.append(Violation("policy", "time_weight", "must be > 0"))
    return out


def _validate_colo(r: ColoResource, T: int, zone_ids: set[str]) -> list[Violation]:
    out = []
    ent = f"resource {r.id}"
    if r.zone not in zone_ids:
        out.append(Violation(ent, "zone", f"unknown zone {r.zone!r}"))
    for f in ("inverter_efficiency", "eta_dc_charge", "eta_dc_discharge",
              "eta_ac_charge", "eta_ac_discharge"):
        if not _fraction_open_closed(getattr(r, f)):
            out.append(Violation(ent, f, "out of (0,1]"))
    if not 0.0 <= r.self_discharge < 1.0:
        out.append(Violation(ent, "self_discharge", "out of [0,1)"))
    for f in ("power_to_energy_dc", "power_to_energy_ac"):
        v = getattr(r, f)
        if v is not None and v <= 0:
            out.append(Violation(ent, f, "must be > 0"))
    for f in ("ilr_pv", "ilr_wind"):
        v = getattr(r, f)
        if v != ILR_FREE and v <= 0:
            out.append(Violation(ent, f, "must be > 0 or -1"))
    if r.interconnection_distance < 0:
        out.append(Violation(ent, "interconnection_distance", "must be >= 0"))
    if r.grid_cost_per_kw_km is not None and r.grid_cost_per_kw_km < 0:
        out.append(Violation(ent, "grid_cost_per_kw_km", "must be >= 0"))

    for c, p in r.components.items():
        cf = f"{c.value}"
        for attr in ("existing", "min_capacity", "invest_cost", "fom_cost"):
            if getattr(p, attr) < 0:
                out.append(Violation(ent, f"{cf}_{attr}", "must be >= 0"))
        if p.max_capacity is not None:
            if p.max_capacity < 0:
                out.append(Violation(ent, f"{cf}_max_capacity", "must be >= 0"))
            elif p.min_capacity > p.max_capacity:
                out.append(Violation(ent, f"{cf}_min_capacity",
                                     f"{p.min_capacity} > max_capacity {p.max_capacity}"))

    for name, series, kind in (("cf_pv", r.cf_pv, C.PV), ("cf_wind", r.cf_wind, C.WIND)):
        if r.has(kind) and len(series) != T:
            out.append(Violation(ent, name, f"length {len(series)} != T={T}"))
        if any(not 0.0 <= v <= 1.0 for v in series):
            out.append(Violation(ent, name, "values out of [0,1]"))

    if r.has(C.STORAGE_ENERGY) and not (r.has_dc_storage or r.has_ac_storage):
        out.append(Violation(ent, "components_present",
                             "storage requires charge_dc+discharge_dc or charge_ac+discharge_ac"))
    uses_inverter = r.has(C.PV) or r.has(C.CHARGE_DC) or r.has(C.DISCHARGE_DC)
    if uses_inverter and not r.has(C.INVERTER):
        out.append(Violation(ent, "components_present", "pv or dc storage requires an inverter"))
    return out


# -- CSV I/O ----------------------------------------------------------------

COLO_SCALARS = (
    "inverter_efficiency", "eta_dc_charge", "eta_dc_discharge", "eta_ac_charge",
    "eta_ac_discharge", "self_discharge", "power_to_energy_dc", "power_to_energy_ac",
    "ilr_pv", "ilr_wind", "interconnection_distance", "grid_cost_per_kw_km",
)
COMPONENT_FIELDS = ("existing", "max", "min", "invest", "fom", "vom")
_PARAM_ATTR = dict(zip(COMPONENT_FIELDS, (
    "existing", "max_capacity", "min_capacity", "invest_cost", "fom_cost", "vom_cost")))
OPTIONAL_SCALARS = {"power_to_energy_dc", "power_to_energy_ac", "grid_cost_per_kw_km"}
COLO_DEFAULTS = {
    "inverter_efficiency": 1.0, "eta_dc_charge": 1.0, "eta_dc_discharge": 1.0,
    "eta_ac_charge": 1.0, "eta_ac_discharge": 1.0, "self_discharge": 0.0,
    "ilr_pv": ILR_FREE, "ilr_wind": ILR_FREE, "interconnection_distance": 0.0,
}
# negative values allowed only here: ILR sentinel, PTC as negative VOM
_SIGNED = {"ilr_pv", "ilr_wind"}


def colo_columns() -> list[str]:
    cols = ["id", "zone", "components_present"]
    for c in COMPONENT_ORDER:
        cols.extend(f"{c.value}_{f}" for f in COMPONENT_FIELDS)
    cols.extend(COLO_SCALARS)
    return cols


def _read_csv(path: Path, required: Iterable[str]) -> list[tuple[int, dict[str, str]]]:
    if not path.exists():
        raise LoadError(path, None, "file not found")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in required if c not in header]
        if missing:
            raise LoadError(path, 1, f"missing columns {missing}")
        return [(i, row) for i, row in enumerate(reader, 2)]


def _num(path: Path, line: int, row: dict[str, str], key: str, *, optional: bool = False,
         default: float | None = None, signed: bool = False) -> float | None:
    raw = (row.get(key) or "").strip()
    if raw == "":
        if optional:
            return default
        if default is not None:
            return default
        raise LoadError(path, line, f"missing value for {key!r}")
    try:
        v = float(raw)
    except ValueError:
        raise LoadError(path, line, f"{key!r} is not a number: {raw!r}") from None
    if math.isnan(v):
        raise LoadError(path, line, f"{key!r} is NaN")
    if v < 0 and not signed:
        raise LoadError(path, line, f"{key!r} must not be negative ({v})")
    return v


def _series(path: Path, rows, key_col: str, value_cols: list[str], T: int | None):
    """Group ``(key, t, values...)`` rows into per-key tuples ordered by t."""
    grouped: dict[str, dict[int, tuple[float, ...]]] = {}
    first_line: dict[str, int] = {}
    for line, row in rows:
        key = (row.get(key_col) or "").strip()
        if not key:
            raise LoadError(path, line, f"missing {key_col!r}")
        try:
            t = int(row["t"])
        except (TypeError, ValueError):
            raise LoadError(path, line, f"bad time index {row.get('t')!r}") from None
        vals = tuple(_num(path, line, row, c, default=0.0 if c.startswith("cf_") else None)
                     for c in value_cols)
        slot = grouped.setdefault(key, {})
        first_line.setdefault(key, line)
        if t in slot:
            raise LoadError(path, line, f"duplicate t={t} for {key!r}")
        slot[t] = vals
    out = {}
    for key, slot in grouped.items():
        n = len(slot)
        if sorted(slot) != list(range(1, n + 1)):
            raise LoadError(path, first_line[key], f"{key!r}: t must run 1..{n} without gaps")
        if T is not None and n != T:
            raise LoadError(path, first_line[key], f"{key!r}: series length {n} != T={T}")
        out[key] = tuple(slot[t] for t in range(1, n + 1))
    return out


def load_system(input_dir: str | Path) -> SystemDescription:
    d = Path(input_dir)
    zone_rows = _read_csv(d / "zones.csv", ["id"])
    zone_ids = []
    for line, row in zone_rows:
        zid = (row.get("id") or "").strip()
        if not zid:
            raise LoadError(d / "zones.csv", line, "empty zone id")
        if zid in zone_ids:
            raise LoadError(d / "zones.csv", line, f"duplicate zone {zid!r}")
        zone_ids.append(zid)

    dpath = d / "demand.csv"
    demand = _series(dpath, _read_csv(dpath, ["zone", "t", "mwh"]), "zone", ["mwh"], None)
    lengths = {len(v) for v in demand.values()}
    if len(lengths) > 1:
        raise LoadError(dpath, None, f"demand series lengths differ: {sorted(lengths)}")
    T = lengths.pop() if lengths else 0
    for zid in demand:
        if zid not in zone_ids:
            raise LoadError(dpath, None, f"unknown zone {zid!r}")
    zones = tuple(Zone(z, tuple(v[0] for v in demand.get(z, ((0.0,),) * T))) for z in zone_ids)
    if T < 1:
        raise LoadError(dpath, None, "empty demand series")

    lines = []
    lpath = d / "lines.csv"
    if lpath.exists():
        for line, row in _read_csv(lpath, ["from", "to", "existing_mw", "max_new_mw",
                                           "cost_per_mw_yr", "km"]):
            fz, tz = row["from"].strip(), row["to"].strip()
            for z in (fz, tz):
                if z not in zone_ids:
                    raise LoadError(lpath, line, f"unknown zone {z!r}")
            lines.append(TransportLine(
                fz, tz,
                _num(lpath, line, row, "existing_mw"),
                _num(lpath, line, row, "max_new_mw"),
                _num(lpath, line, row, "cost_per_mw_yr"),
                _num(lpath, line, row, "km"),
            ))

    cpath = d / "colo_resources.csv"
    colo_rows = _read_csv(cpath, ["id", "zone", "components_present"]) if cpath.exists() else []
    cfpath = d / "colo_capacity_factors.csv"
    cfs = {}
    if cfpath.exists():
        cfs = _series(cfpath, _read_csv(cfpath, ["resource", "t", "cf_pv", "cf_wind"]),
                      "resource", ["cf_pv", "cf_wind"], T)
    colo = []
    for line, row in colo_rows:
        rid = row["id"].strip()
        zone = row["zone"].strip()
        if zone not in zone_ids:
            raise LoadError(cpath, line, f"unknown zone {zone!r}")
        comps = {}
        for name in filter(None, (s.strip() for s in row["components_present"].split(";"))):
            try:
                kind = ComponentKind(name)
            except ValueError:
                raise LoadError(cpath, line, f"unknown component {name!r}") from None
            p = {}
            for f in COMPONENT_FIELDS:
                key = f"{kind.value}_{f}"
                if f == "max":
                    p[_PARAM_ATTR[f]] = _num(cpath, line, row, key, optional=True)
                else:
                    p[_PARAM_ATTR[f]] = _num(cpath, line, row, key, default=0.0,
                                             signed=(f == "vom"))
            comps[kind] = ComponentParams(**p)
        scal = {}
        for k in COLO_SCALARS:
            if k in OPTIONAL_SCALARS:
                scal[k] = _num(cpath, line, row, k, optional=True)
            else:
                scal[k] = _num(cpath, line, row, k, default=COLO_DEFAULTS[k], signed=k in _SIGNED)
        series = cfs.get(rid)
        if series is None and (ComponentKind.PV in comps or ComponentKind.WIND in comps):
            raise LoadError(cfpath, None, f"no capacity factors for resource {rid!r}")
        cf_pv = tuple(v[0] for v in series) if series and ComponentKind.PV in comps else ()
        cf_wind = tuple(v[1] for v in series) if series and ComponentKind.WIND in comps else ()
        colo.append(ColoResource(rid, zone, comps, cf_pv=cf_pv, cf_wind=cf_wind, **scal))
    known = {r.id for r in colo}
    for rid in cfs:
        if rid not in known:
            raise LoadError(cfpath, None, f"unknown resource {rid!r}")

    thermal = []
    tpath = d / "thermal.csv"
    if tpath.exists():
        cols = ["id", "zone", "existing_mw", "max_new_mw", "invest_cost", "fom_cost",
                "vom_cost", "qualifies_rps"]
        for line, row in _read_csv(tpath, cols):
            zone = row["zone"].strip()
            if zone not in zone_ids:
                raise LoadError(tpath, line, f"unknown zone {zone!r}")
            flag = (row["qualifies_rps"] or "").strip().lower()
            if flag not in ("true", "false", "1", "0", ""):
                raise LoadError(tpath, line, f"qualifies_rps must be true/false, got {flag!r}")
            thermal.append(ThermalResource(
                row["id"].strip(), zone,
                _num(tpath, line, row, "existing_mw"),
                _num(tpath, line, row, "max_new_mw"),
                _num(tpath, line, row, "invest_cost"),
                _num(tpath, line, row, "fom_cost"),
                _num(tpath, line, row, "vom_cost"),
                flag in ("true", "1"),
            ))

    policy: dict[str, float] = {}
    ppath = d / "policy.csv"
    if ppath.exists():
        allowed = {"forced_battery_mw", "rps_share", "nse_cost", "time_weight"}
        for line, row in _read_csv(ppath, ["key", "value"]):
            key = row["key"].strip()
            if key not in allowed:
                raise LoadError(ppath, line, f"unknown policy key {key!r}")
            v = _num(ppath, line, row, "value", optional=True)
            if v is not None:
                policy[key] = v

    return SystemDescription(
        zones=zones,
        lines=tuple(lines),
        colo_resources=tuple(colo),
        thermal_resources=tuple(thermal),
        forced_battery_mw=policy.get("forced_battery_mw"),
        rps_share=policy.get("rps_share"),
        nse_cost=policy.get("nse_cost", DEFAULT_NSE_COST),
        time_weight=policy.get("time_weight", 1.0),
        horizon=T,
    )


def _fmt(v: float | None) -> str:
    return "" if v is None else repr(float(v))


def write_system(system: SystemDescription, out_dir: str | Path) -> Path:
    """Write ``system`` as the CSV tables read by :func:`load_system`."""
    d = Path(out_dir)
    d.mkdir(parents=True, exist_ok=True)

    def dump(name, header, rows):
        with open(d / name, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            w.writerows(rows)

    dump("zones.csv", ["id"], [[z.id] for z in system.zones])
    dump("demand.csv", ["zone", "t", "mwh"],
         [[z.id, t, _fmt(v)] for z in system.zones for t, v in enumerate(z.demand, 1)])
    dump("lines.csv", ["from", "to", "existing_mw", "max_new_mw", "cost_per_mw_yr", "km"],
         [[ln.from_zone, ln.to_zone, _fmt(ln.existing_capacity), _fmt(ln.max_expansion),
           _fmt(ln.expansion_cost), _fmt(ln.length)] for ln in system.lines])

    rows = []
    for r in system.colo_resources:
        rec = {"id": r.id, "zone": r.zone,
               "components_present": ";".join(c.value for c in COMPONENT_ORDER if c in r.components)}
        for c, p in r.components.items():
            for f in COMPONENT_FIELDS:
                rec[f"{c.value}_{f}"] = _fmt(getattr(p, _PARAM_ATTR[f]))
        for k in COLO_SCALARS:
            rec[k] = _fmt(getattr(r, k))
        rows.append([rec.get(col, "") for col in colo_columns()])
    dump("colo_resources.csv", colo_columns(), rows)

    cf_rows = []
    for r in system.colo_resources:
        if not (r.cf_pv or r.cf_wind):
            continue
        for t in range(system.T):
            cf_rows.append([r.id, t + 1,
                            _fmt(r.cf_pv[t]) if r.cf_pv else "",
                            _fmt(r.cf_wind[t]) if r.cf_wind else ""])
    dump("colo_capacity_factors.csv", ["resource", "t", "cf_pv", "cf_wind"], cf_rows)

    dump("thermal.csv", ["id", "zone", "existing_mw", "max_new_mw", "invest_cost", "fom_cost",
                         "vom_cost", "qualifies_rps"],
         [[g.id, g.zone, _fmt(g.existing_capacity), _fmt(g.max_new), _fmt(g.invest_cost),
           _fmt(g.fom_cost), _fmt(g.vom_plus_fuel_cost), "true" if g.qualifies_rps else "false"]
          for g in system.thermal_resources])

    policy = [["nse_cost", _fmt(system.nse_cost)], ["time_weight", _fmt(system.time_weight)]]
    if system.forced_battery_mw is not None:
        policy.append(["forced_battery_mw", _fmt(system.forced_battery_mw)])
    if system.rps_share is not None:
        policy.append(["rps_share", _fmt(system.rps_share)])
    dump("policy.csv", ["key", "value"], policy)
    return d
