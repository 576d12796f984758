"""Rows and objective terms for co-located VRE + storage resources.

Each resource contributes capacity variables per sized component (new,
retired, total) and hourly operating variables. Row ids follow
``<resource>/<family>/<component>/<t>`` with ``-`` in place of ``t`` for
rows that are not time-indexed.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .domain import ILR_FREE, ColoResource, ComponentKind
from .lp import INF, LinearProgram

C = ComponentKind

OPERATIONAL = ("theta_pv", "theta_wind", "theta_dc", "pi_dc", "theta_ac", "pi_ac",
               "theta_grid", "pi_grid", "soc")


def row_id(resource: str, family: str, component: str, t: int | None = None) -> str:
    return f"{resource}/{family}/{component}/{'-' if t is None else t}"


def cap_var(resource: str, kind: str, component: ComponentKind | str) -> str:
    return f"{resource}/{kind}/{component}"


def op_var(resource: str, name: str, t: int) -> str:
    return f"{resource}/{name}/{t}"


@dataclass
class ColoVariables:
    """Indices of one resource's variables inside the LP."""

    resource: str
    T: int
    new: dict[ComponentKind, int] = field(default_factory=dict)
    retired: dict[ComponentKind, int] = field(default_factory=dict)
    total: dict[ComponentKind, int] = field(default_factory=dict)
    ops: dict[str, list[int]] = field(default_factory=dict)

    def op(self, name: str) -> list[int] | None:
        return self.ops.get(name)


def register_variables(res: ColoResource, lp: LinearProgram, T: int) -> ColoVariables:
    v = ColoVariables(res.id, T)
    for c in res.capacity_components():
        v.new[c] = lp.add_var(cap_var(res.id, "new", c))
        v.retired[c] = lp.add_var(cap_var(res.id, "retired", c))
        v.total[c] = lp.add_var(cap_var(res.id, "total", c))
    names = ["theta_grid", "pi_grid"]
    if res.has(C.PV):
        names.append("theta_pv")
    if res.has(C.WIND):
        names.append("theta_wind")
    if res.has_dc_storage:
        names += ["theta_dc", "pi_dc"]
    if res.has_ac_storage:
        names += ["theta_ac", "pi_ac"]
    if res.has(C.STORAGE_ENERGY):
        names.append("soc")
    for name in OPERATIONAL:
        if name in names:
            v.ops[name] = [lp.add_var(op_var(res.id, name, t)) for t in range(1, T + 1)]
    return v


def emit_capacity_constraints(res: ColoResource, lp: LinearProgram, v: ColoVariables) -> list[str]:
    """Total = existing + new - retired; retired <= existing; min/max bounds."""
    rows = []
    for c in res.capacity_components():
        p = res.components[c]
        tot, new, ret = v.total[c], v.new[c], v.retired[c]
        rows.append(lp.add_row(row_id(res.id, "total", c), {tot: 1.0, new: -1.0, ret: 1.0},
                               "=", p.existing))
        rows.append(lp.add_row(row_id(res.id, "retire", c), {ret: 1.0}, "<=", p.existing))
        if p.max_capacity is not None and p.max_capacity < INF:
            rows.append(lp.add_row(row_id(res.id, "max_cap", c), {tot: 1.0}, "<=", p.max_capacity))
        if p.min_capacity > 0:
            rows.append(lp.add_row(row_id(res.id, "min_cap", c), {tot: 1.0}, ">=", p.min_capacity))
    return rows


def _check_ratio(name: str, value: float) -> None:
    if value != ILR_FREE and value <= 0:
        raise ValueError(f"{name} must be positive or {ILR_FREE:g} (free), got {value}")


def emit_ratio_constraints(res: ColoResource, lp: LinearProgram, v: ColoVariables) -> list[str]:
    """Fixed VRE-to-inverter / VRE-to-grid ratios unless set to the free sentinel."""
    _check_ratio("ilr_pv", res.ilr_pv)
    _check_ratio("ilr_wind", res.ilr_wind)
    rows = []
    if res.ilr_pv != ILR_FREE and C.PV in v.total:
        pv = v.total[C.PV]
        if C.INVERTER in v.total:
            rows.append(lp.add_row(row_id(res.id, "ilr_inverter", C.PV),
                                   {pv: 1.0, v.total[C.INVERTER]: -res.ilr_pv}, "=", 0.0))
        if C.GRID in v.total:
            rows.append(lp.add_row(row_id(res.id, "ilr_grid", C.PV),
                                   {pv: 1.0, v.total[C.GRID]: -res.ilr_pv}, "=", 0.0))
    if res.ilr_wind != ILR_FREE and C.WIND in v.total and C.GRID in v.total:
        rows.append(lp.add_row(row_id(res.id, "ilr_grid", C.WIND),
                               {v.total[C.WIND]: 1.0, v.total[C.GRID]: -res.ilr_wind}, "=", 0.0))
    return rows


def _dc_side(res: ColoResource, v: ColoVariables, t: int, sign: float) -> dict[int, float]:
    """AC-equivalent of the DC bus flows at hour index ``t`` (0-based)."""
    eta = res.inverter_efficiency
    out: dict[int, float] = {}
    if v.op("theta_pv"):
        out[v.ops["theta_pv"][t]] = eta * sign
    if v.op("theta_dc"):
        out[v.ops["theta_dc"][t]] = eta * sign
        out[v.ops["pi_dc"][t]] = -sign / eta
    return out


def emit_energy_balance(res: ColoResource, lp: LinearProgram, v: ColoVariables) -> list[str]:
    """Grid injection minus withdrawal equals net AC plus inverted DC power."""
    rows = []
    for t in range(v.T):
        coefs = {v.ops["theta_grid"][t]: 1.0, v.ops["pi_grid"][t]: -1.0}
        if v.op("theta_wind"):
            coefs[v.ops["theta_wind"][t]] = -1.0
        if v.op("theta_ac"):
            coefs[v.ops["theta_ac"][t]] = -1.0
            coefs[v.ops["pi_ac"][t]] = 1.0
        coefs.update(_dc_side(res, v, t, -1.0))
        rows.append(lp.add_row(row_id(res.id, "balance", C.GRID, t + 1), coefs, "=", 0.0))
    return rows


def emit_export_limits(res: ColoResource, lp: LinearProgram, v: ColoVariables) -> list[str]:
    rows = []
    grid = v.total.get(C.GRID)
    for t in range(v.T):
        coefs = {v.ops["theta_grid"][t]: 1.0, v.ops["pi_grid"][t]: 1.0}
        if grid is not None:
            coefs[grid] = -1.0
        rows.append(lp.add_row(row_id(res.id, "grid_max", C.GRID, t + 1), coefs, "<=", 0.0))
    if C.INVERTER in v.total:
        inv = v.total[C.INVERTER]
        eta = res.inverter_efficiency
        for t in range(v.T):
            coefs = {}
            if v.op("theta_pv"):
                coefs[v.ops["theta_pv"][t]] = eta
            if v.op("theta_dc"):
                coefs[v.ops["theta_dc"][t]] = eta
                coefs[v.ops["pi_dc"][t]] = 1.0 / eta
            coefs[inv] = -1.0
            rows.append(lp.add_row(row_id(res.id, "inverter_max", C.INVERTER, t + 1),
                                   coefs, "<=", 0.0))
    return rows


def emit_generation_limits(res: ColoResource, lp: LinearProgram, v: ColoVariables) -> list[str]:
    rows = []
    for kind, name, cf in ((C.PV, "theta_pv", res.cf_pv), (C.WIND, "theta_wind", res.cf_wind)):
        if not v.op(name) or kind not in v.total:
            continue
        cap = v.total[kind]
        for t in range(v.T):
            rows.append(lp.add_row(row_id(res.id, "gen_max", kind, t + 1),
                                   {v.ops[name][t]: 1.0, cap: -cf[t]}, "<=", 0.0))
    return rows


def emit_soc_dynamics(res: ColoResource, lp: LinearProgram, v: ColoVariables) -> list[str]:
    """Cyclic state-of-charge balance and the energy-capacity ceiling.

    ``soc[t] = (1 - self_discharge) * soc[t-1] + charging - discharging``,
    with ``soc[0]`` taken as ``soc[T]``.
    """
    if not v.op("soc"):
        return []
    rows = []
    soc = v.ops["soc"]
    keep = 1.0 - res.self_discharge
    for t in range(v.T):
        coefs: dict[int, float] = {soc[t]: 1.0}
        prev = soc[t - 1]  # wraps to the last hour at t = 0
        coefs[prev] = coefs.get(prev, 0.0) - keep
        if v.op("theta_dc"):
            coefs[v.ops["pi_dc"][t]] = -res.eta_dc_charge
            coefs[v.ops["theta_dc"][t]] = 1.0 / res.eta_dc_discharge
        if v.op("theta_ac"):
            coefs[v.ops["pi_ac"][t]] = -res.eta_ac_charge
            coefs[v.ops["theta_ac"][t]] = 1.0 / res.eta_ac_discharge
        rows.append(lp.add_row(row_id(res.id, "soc", C.STORAGE_ENERGY, t + 1), coefs, "=", 0.0))
    energy = v.total[C.STORAGE_ENERGY]
    for t in range(v.T):
        rows.append(lp.add_row(row_id(res.id, "soc_max", C.STORAGE_ENERGY, t + 1),
                               {soc[t]: 1.0, energy: -1.0}, "<=", 0.0))
    return rows


def emit_symmetric_storage_limits(res: ColoResource, lp: LinearProgram,
                                  v: ColoVariables) -> list[str]:
    """Charge plus discharge within power-to-energy ratio times energy capacity.

    Asymmetric sides instead cap each flow by its own sized capacity.
    """
    rows = []
    sides = (("dc", res.has_dc_storage, res.symmetric_dc, res.power_to_energy_dc,
              C.CHARGE_DC, C.DISCHARGE_DC),
             ("ac", res.has_ac_storage, res.symmetric_ac, res.power_to_energy_ac,
              C.CHARGE_AC, C.DISCHARGE_AC))
    for side, present, symmetric, mu, cha, dis in sides:
        if not present:
            continue
        theta, pi = v.ops[f"theta_{side}"], v.ops[f"pi_{side}"]
        if symmetric:
            energy = v.total[C.STORAGE_ENERGY]
            for t in range(v.T):
                rows.append(lp.add_row(row_id(res.id, f"sym_{side}", C.STORAGE_ENERGY, t + 1),
                                       {theta[t]: 1.0, pi[t]: 1.0, energy: -mu}, "<=", 0.0))
            continue
        for t in range(v.T):
            rows.append(lp.add_row(row_id(res.id, "asym_max", dis, t + 1),
                                   {theta[t]: 1.0, v.total[dis]: -1.0}, "<=", 0.0))
            rows.append(lp.add_row(row_id(res.id, "asym_max", cha, t + 1),
                                   {pi[t]: 1.0, v.total[cha]: -1.0}, "<=", 0.0))
    return rows


VOM_TARGETS = (
    (C.PV, "theta_pv"), (C.WIND, "theta_wind"),
    (C.DISCHARGE_DC, "theta_dc"), (C.CHARGE_DC, "pi_dc"),
    (C.DISCHARGE_AC, "theta_ac"), (C.CHARGE_AC, "pi_ac"),
)


def emit_objective_terms(res: ColoResource, lp: LinearProgram, v: ColoVariables,
                         time_weight: float = 1.0) -> None:
    """Investment on new capacity, fixed O&M on total capacity, VOM on flows."""
    for c in res.capacity_components():
        p = res.components[c]
        lp.add_cost(v.new[c], p.invest_cost)
        lp.add_cost(v.total[c], p.fom_cost)
    for c, name in VOM_TARGETS:
        if c in res.components and v.op(name) and res.components[c].vom_cost:
            w = res.components[c].vom_cost * time_weight
            for j in v.ops[name]:
                lp.add_cost(j, w)


def ac_deliverable_new_power(res: ColoResource, v: ColoVariables) -> dict[int, float]:
    """Coefficients turning new storage capacity into AC-deliverable MW.

    Symmetric DC storage counts ``eta_inv * mu_dc * new_energy``, symmetric
    AC storage ``mu_ac * new_energy``; asymmetric sides count their new
    discharge capacity (DC through the inverter).
    """
    coefs: dict[int, float] = {}
    if C.STORAGE_ENERGY not in v.new:
        return coefs

    def add(j, val):
        coefs[j] = coefs.get(j, 0.0) + val

    if res.has_dc_storage:
        if res.symmetric_dc:
            add(v.new[C.STORAGE_ENERGY], res.inverter_efficiency * res.power_to_energy_dc)
        else:
            add(v.new[C.DISCHARGE_DC], res.inverter_efficiency)
    if res.has_ac_storage:
        if res.symmetric_ac:
            add(v.new[C.STORAGE_ENERGY], res.power_to_energy_ac)
        else:
            add(v.new[C.DISCHARGE_AC], 1.0)
    return coefs


def emit_resource(res: ColoResource, lp: LinearProgram, T: int,
                  time_weight: float = 1.0) -> tuple[ColoVariables, list[str]]:
    """Register variables and emit every row family for one resource."""
    v = register_variables(res, lp, T)
    rows = []
    rows += emit_capacity_constraints(res, lp, v)
    rows += emit_ratio_constraints(res, lp, v)
    rows += emit_energy_balance(res, lp, v)
    rows += emit_export_limits(res, lp, v)
    rows += emit_generation_limits(res, lp, v)
    rows += emit_soc_dynamics(res, lp, v)
    rows += emit_symmetric_storage_limits(res, lp, v)
    emit_objective_terms(res, lp, v, time_weight)
    return v, rows
