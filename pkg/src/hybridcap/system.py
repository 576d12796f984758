"""System-level rows and full model assembly.

Zonal balance, lossless inter-zonal transport with expandable capacity,
thermal dispatch, non-served energy, the system-wide forced storage row and
an optional single renewable-share floor.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from . import colo
from .colo import ColoVariables
from .domain import ComponentKind, SystemDescription
from .lp import LinearProgram

C = ComponentKind

FORCED_BATTERY_ROW = "sys/forced_battery"
RPS_ROW = "sys/rps"


@dataclass
class SystemVariables:
    thermal_new: dict[str, int] = field(default_factory=dict)
    thermal_gen: dict[str, list[int]] = field(default_factory=dict)
    nse: dict[str, list[int]] = field(default_factory=dict)
    line_new: dict[str, int] = field(default_factory=dict)
    flow_fwd: dict[str, list[int]] = field(default_factory=dict)
    flow_bwd: dict[str, list[int]] = field(default_factory=dict)


@dataclass
class Model:
    """An assembled LP plus the index maps needed to read a solution back."""

    system: SystemDescription
    lp: LinearProgram
    colo: dict[str, ColoVariables]
    sysvars: SystemVariables
    rows: dict[str, list[str]] = field(default_factory=dict)


def register_system_variables(system: SystemDescription, lp: LinearProgram) -> SystemVariables:
    sv = SystemVariables()
    T, w = system.T, system.time_weight
    for g in system.thermal_resources:
        sv.thermal_new[g.id] = lp.add_var(f"{g.id}/new", 0.0, g.max_new, g.invest_cost + g.fom_cost)
        sv.thermal_gen[g.id] = [lp.add_var(f"{g.id}/gen/{t}", cost=g.vom_plus_fuel_cost * w)
                                for t in range(1, T + 1)]
        lp.objective_offset += g.fom_cost * g.existing_capacity
    for ln in system.lines:
        sv.line_new[ln.id] = lp.add_var(f"line/{ln.id}/new", 0.0, ln.max_expansion,
                                        ln.expansion_cost)
        sv.flow_fwd[ln.id] = [lp.add_var(f"line/{ln.id}/fwd/{t}") for t in range(1, T + 1)]
        sv.flow_bwd[ln.id] = [lp.add_var(f"line/{ln.id}/bwd/{t}") for t in range(1, T + 1)]
    for z in system.zones:
        sv.nse[z.id] = [lp.add_var(f"{z.id}/nse/{t}", cost=system.nse_cost * w)
                        for t in range(1, T + 1)]
    return sv


def emit_thermal_limits(system: SystemDescription, lp: LinearProgram,
                        sv: SystemVariables) -> list[str]:
    rows = []
    for g in system.thermal_resources:
        for t, j in enumerate(sv.thermal_gen[g.id], 1):
            rows.append(lp.add_row(f"sys/thermal/{g.id}/{t}",
                                   {j: 1.0, sv.thermal_new[g.id]: -1.0}, "<=",
                                   g.existing_capacity))
    return rows


def emit_zonal_balance(system: SystemDescription, lp: LinearProgram, sv: SystemVariables,
                       cv: dict[str, ColoVariables]) -> list[str]:
    """Supply + imports - exports + unserved = demand, per zone and hour."""
    rows = []
    for z in system.zones:
        for t in range(system.T):
            coefs: dict[int, float] = {sv.nse[z.id][t]: 1.0}
            for g in system.thermal_resources:
                if g.zone == z.id:
                    coefs[sv.thermal_gen[g.id][t]] = 1.0
            for r in system.colo_resources:
                if r.zone == z.id:
                    v = cv[r.id]
                    coefs[v.ops["theta_grid"][t]] = 1.0
                    coefs[v.ops["pi_grid"][t]] = -1.0
            for ln in system.lines:
                fwd, bwd = sv.flow_fwd[ln.id][t], sv.flow_bwd[ln.id][t]
                if ln.to_zone == z.id:
                    coefs[fwd] = coefs.get(fwd, 0.0) + 1.0
                    coefs[bwd] = coefs.get(bwd, 0.0) - 1.0
                if ln.from_zone == z.id:
                    coefs[fwd] = coefs.get(fwd, 0.0) - 1.0
                    coefs[bwd] = coefs.get(bwd, 0.0) + 1.0
            rows.append(lp.add_row(f"sys/balance/{z.id}/{t + 1}", coefs, "=", z.demand[t]))
    return rows


def emit_transport_constraints(system: SystemDescription, lp: LinearProgram,
                               sv: SystemVariables) -> list[str]:
    """Flow in both directions within existing plus new line capacity."""
    rows = []
    for ln in system.lines:
        for t in range(system.T):
            rows.append(lp.add_row(
                f"sys/line/{ln.id}/{t + 1}",
                {sv.flow_fwd[ln.id][t]: 1.0, sv.flow_bwd[ln.id][t]: 1.0,
                 sv.line_new[ln.id]: -1.0},
                "<=", ln.existing_capacity))
    return rows


def emit_forced_battery(system: SystemDescription, lp: LinearProgram,
                        cv: dict[str, ColoVariables], forced_mw: float | None = None) -> str:
    """New AC-deliverable storage power summed over resources equals the target."""
    target = system.forced_battery_mw if forced_mw is None else forced_mw
    if target is None:
        raise ValueError("forced battery requested but policy forced_battery_mw is not set")
    coefs: dict[int, float] = {}
    for r in system.colo_resources:
        for j, val in colo.ac_deliverable_new_power(r, cv[r.id]).items():
            coefs[j] = coefs.get(j, 0.0) + val
    return lp.add_row(FORCED_BATTERY_ROW, coefs, "=", target)


def emit_rps(system: SystemDescription, lp: LinearProgram, sv: SystemVariables,
             cv: dict[str, ColoVariables], share: float | None = None) -> str:
    """Qualifying energy over the horizon >= share of total demand."""
    share = system.rps_share if share is None else share
    coefs: dict[int, float] = {}
    for r in system.colo_resources:
        v = cv[r.id]
        if v.op("theta_pv"):
            for j in v.ops["theta_pv"]:
                coefs[j] = r.inverter_efficiency
        if v.op("theta_wind"):
            for j in v.ops["theta_wind"]:
                coefs[j] = 1.0
    for g in system.thermal_resources:
        if g.qualifies_rps:
            for j in sv.thermal_gen[g.id]:
                coefs[j] = 1.0
    total = sum(sum(z.demand) for z in system.zones)
    return lp.add_row(RPS_ROW, coefs, ">=", share * total)


def build_model(system: SystemDescription, *, forced_battery: bool | None = None,
                name: str = "capacity_expansion") -> Model:
    """Assemble the complete LP for ``system``.

    The forced-storage row is emitted whenever the policy value is set
    (or when ``forced_battery`` is True); the RPS row whenever
    ``rps_share`` is set.
    """
    lp = LinearProgram(name)
    T = system.T
    cv: dict[str, ColoVariables] = {}
    rows: dict[str, list[str]] = {}
    for r in system.colo_resources:
        v, r_rows = colo.emit_resource(r, lp, T, system.time_weight)
        cv[r.id] = v
        rows[r.id] = r_rows
    sv = register_system_variables(system, lp)
    rows["sys/thermal"] = emit_thermal_limits(system, lp, sv)
    rows["sys/balance"] = emit_zonal_balance(system, lp, sv, cv)
    rows["sys/line"] = emit_transport_constraints(system, lp, sv)
    want_forced = system.forced_battery_mw is not None if forced_battery is None else forced_battery
    if want_forced:
        rows["sys/forced_battery"] = [emit_forced_battery(system, lp, cv)]
    if system.rps_share is not None:
        rows["sys/rps"] = [emit_rps(system, lp, sv, cv)]
    return Model(system, lp, cv, sv, rows)
