"""Small synthetic systems used by the tests, the acceptance suite and the CLI demo."""
from __future__ import annotations

import math

from .domain import (ColoResource, ComponentKind, ComponentParams, SystemDescription,
                     ThermalResource, TransportLine, Zone)

C = ComponentKind
P = ComponentParams

ETA_INV = 0.96
ETA_ONE_WAY = 0.95
MU = 0.25
SELF_DISCHARGE = 0.05


def solar_profile(T: int, shift: float = 0.0) -> tuple[float, ...]:
    out = []
    for t in range(T):
        h = (t + shift) % 24
        out.append(round(max(0.0, math.sin(math.pi * (h - 6) / 12)) * 0.9, 6) if 6 <= h <= 18 else 0.0)
    return tuple(out)


def wind_profile(T: int) -> tuple[float, ...]:
    return tuple(round(0.4 + 0.25 * math.cos(2 * math.pi * (t % 24 - 2) / 24)
                       + 0.1 * math.sin(2 * math.pi * t / 7), 6) for t in range(T))


def demand_profile(T: int, base: float, swing: float) -> tuple[float, ...]:
    # evening peak around 19h
    return tuple(round(base + swing * math.cos(2 * math.pi * (t % 24 - 19) / 24), 3)
                 for t in range(T))


def pv_hybrid(id: str, zone: str, T: int, distance: float, *, storage: bool = True,
              self_discharge: float = SELF_DISCHARGE, max_pv: float | None = None) -> ColoResource:
    comps = {C.PV: P(max_capacity=max_pv), C.INVERTER: P(), C.GRID: P()}
    if storage:
        comps.update({C.STORAGE_ENERGY: P(), C.CHARGE_DC: P(), C.DISCHARGE_DC: P()})
    return ColoResource(
        id, zone, comps, cf_pv=solar_profile(T),
        inverter_efficiency=ETA_INV, eta_dc_charge=ETA_ONE_WAY, eta_dc_discharge=ETA_ONE_WAY,
        self_discharge=self_discharge, power_to_energy_dc=MU if storage else None,
        interconnection_distance=distance)


def wind_hybrid(id: str, zone: str, T: int, distance: float, *, storage: bool = True,
                self_discharge: float = SELF_DISCHARGE) -> ColoResource:
    comps = {C.WIND: P(), C.GRID: P()}
    if storage:
        comps.update({C.STORAGE_ENERGY: P(), C.CHARGE_AC: P(), C.DISCHARGE_AC: P()})
    return ColoResource(
        id, zone, comps, cf_wind=wind_profile(T),
        eta_ac_charge=ETA_ONE_WAY, eta_ac_discharge=ETA_ONE_WAY,
        self_discharge=self_discharge, power_to_energy_ac=MU if storage else None,
        interconnection_distance=distance)


def standalone_battery(id: str, zone: str, distance: float, *,
                       self_discharge: float = SELF_DISCHARGE) -> ColoResource:
    comps = {C.STORAGE_ENERGY: P(), C.CHARGE_AC: P(), C.DISCHARGE_AC: P(), C.GRID: P()}
    return ColoResource(
        id, zone, comps, eta_ac_charge=ETA_ONE_WAY, eta_ac_discharge=ETA_ONE_WAY,
        self_discharge=self_discharge, power_to_energy_ac=MU,
        interconnection_distance=distance)


def two_zone_toy(T: int = 24, *, self_discharge: float = SELF_DISCHARGE) -> SystemDescription:
    """Resource-rich zone ``north`` exporting to load zone ``south``.

    Peak demand is about 150 GW so the forced storage levels of the
    scenario matrix (3.75 to 15 GW) are 2.5 to 10% of peak. Component
    costs are zero placeholders until a cost case is applied.
    """
    zones = (
        Zone("north", demand_profile(T, 20_000, 5_000)),
        Zone("south", demand_profile(T, 110_000, 40_000)),
    )
    lines = (TransportLine("north", "south", existing_capacity=20_000, max_expansion=200_000,
                           expansion_cost=300 * 200.0, length=300),)
    colo = (
        pv_hybrid("north_pv", "north", T, 60, self_discharge=self_discharge),
        wind_hybrid("north_wind", "north", T, 90, self_discharge=self_discharge),
        pv_hybrid("south_pv", "south", T, 40, self_discharge=self_discharge, max_pv=60_000),
        standalone_battery("north_batt", "north", 20, self_discharge=self_discharge),
        standalone_battery("south_batt", "south", 10, self_discharge=self_discharge),
    )
    thermal = (
        ThermalResource("south_gas", "south", existing_capacity=60_000, max_new=200_000,
                        invest_cost=95_000, fom_cost=12_000, vom_plus_fuel_cost=45.0),
        ThermalResource("north_gas", "north", existing_capacity=10_000, max_new=50_000,
                        invest_cost=95_000, fom_cost=12_000, vom_plus_fuel_cost=48.0),
    )
    return SystemDescription(zones, lines, colo, thermal, forced_battery_mw=3750.0,
                             rps_share=0.3, time_weight=8760.0 / T)


def ilr_toy(grid_cost_per_mw_yr: float, T: int = 24) -> SystemDescription:
    """One zone, one PV site with inverter and grid connection, gas backup.

    ``grid_cost_per_mw_yr`` is the annualised grid-connection cost; the
    other costs are fixed low-case-like values in $/MW-yr.
    """
    res = ColoResource(
        "pv", "z", {
            C.PV: P(invest_cost=33_900, fom_cost=16_200, vom_cost=-12.7),
            C.INVERTER: P(invest_cost=3_600, fom_cost=2_400),
            C.GRID: P(invest_cost=grid_cost_per_mw_yr),
        },
        cf_pv=solar_profile(T), inverter_efficiency=ETA_INV, interconnection_distance=1.0)
    gas = ThermalResource("gas", "z", existing_capacity=2_000, vom_plus_fuel_cost=45.0)
    return SystemDescription((Zone("z", demand_profile(T, 1_000, 300)),), (), (res,), (gas,),
                             time_weight=8760.0 / T)


ENUM_LEVELS = 5
ENUM_MAX = {C.PV: 400.0, C.INVERTER: 200.0, C.GRID: 200.0, C.STORAGE_ENERGY: 100.0}


def enumeration_toy(T: int = 6) -> SystemDescription:
    """1 zone, T=6, a single PV + DC storage site with bounded capacities."""
    cf = (0.0, 0.3, 0.8, 0.9, 0.4, 0.0)[:T]
    comps = {
        C.PV: P(max_capacity=ENUM_MAX[C.PV], invest_cost=40.0, fom_cost=10.0),
        C.INVERTER: P(max_capacity=ENUM_MAX[C.INVERTER], invest_cost=8.0, fom_cost=2.0),
        C.GRID: P(max_capacity=ENUM_MAX[C.GRID], invest_cost=12.0),
        C.STORAGE_ENERGY: P(max_capacity=ENUM_MAX[C.STORAGE_ENERGY], invest_cost=4.0,
                            fom_cost=1.0),
        C.CHARGE_DC: P(), C.DISCHARGE_DC: P(),
    }
    res = ColoResource("hyb", "z", comps, cf_pv=cf, inverter_efficiency=ETA_INV,
                       eta_dc_charge=ETA_ONE_WAY, eta_dc_discharge=ETA_ONE_WAY,
                       self_discharge=0.0, power_to_energy_dc=MU)
    gas = ThermalResource("gas", "z", existing_capacity=400.0, vom_plus_fuel_cost=40.0)
    demand = (200.0, 120.0, 100.0, 120.0, 300.0, 320.0)[:T]
    return SystemDescription((Zone("z", demand),), (), (res,), (gas,), nse_cost=500.0)
