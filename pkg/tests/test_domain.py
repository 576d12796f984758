import dataclasses

import pytest
from hypothesis import given, strategies as st

from hybridcap.domain import (ColoResource, ComponentKind, ComponentParams, LoadError,
                              SystemDescription, ThermalResource, TransportLine, Zone,
                              load_system, validate, write_system)
from hybridcap.toy import enumeration_toy, ilr_toy, pv_hybrid, two_zone_toy

C = ComponentKind
P = ComponentParams


def one_zone_fixture(T=4):
    res = pv_hybrid("site", "z1", T, 25.0)
    return SystemDescription((Zone("z1", (10.0, 20.0, 30.0, 40.0)[:T]),), (), (res,), ())


def test_component_kind_has_nine_members():
    assert [c.value for c in ComponentKind] == [
        "grid", "pv", "wind", "storage_energy", "inverter",
        "charge_dc", "discharge_dc", "charge_ac", "discharge_ac"]


def test_load_small_fixture(tmp_path):
    write_system(one_zone_fixture(), tmp_path)
    s = load_system(tmp_path)
    assert (len(s.zones), len(s.colo_resources), s.T) == (1, 1, 4)


@pytest.mark.parametrize("factory", [two_zone_toy, enumeration_toy, lambda: ilr_toy(1e4),
                                     one_zone_fixture])
def test_round_trip_fixtures(tmp_path, factory):
    s = factory()
    assert validate(s) == []
    write_system(s, tmp_path)
    assert load_system(tmp_path) == s


def test_short_capacity_factor_series_names_file(tmp_path):
    write_system(one_zone_fixture(), tmp_path)
    p = tmp_path / "colo_capacity_factors.csv"
    lines = p.read_text().splitlines()
    p.write_text("\n".join(lines[:-1]) + "\n")
    with pytest.raises(LoadError, match="colo_capacity_factors.csv"):
        load_system(tmp_path)


def test_unknown_zone_reference(tmp_path):
    write_system(one_zone_fixture(), tmp_path)
    p = tmp_path / "colo_resources.csv"
    p.write_text(p.read_text().replace("site,z1,", "site,XX,"))
    with pytest.raises(LoadError, match=r"colo_resources.csv:2.*XX"):
        load_system(tmp_path)


def test_missing_file(tmp_path):
    write_system(one_zone_fixture(), tmp_path)
    (tmp_path / "zones.csv").unlink()
    with pytest.raises(LoadError, match="zones.csv"):
        load_system(tmp_path)


def test_malformed_number_names_line(tmp_path):
    write_system(one_zone_fixture(), tmp_path)
    p = tmp_path / "demand.csv"
    p.write_text(p.read_text().replace("z1,3,30.0", "z1,3,thirty"))
    with pytest.raises(LoadError, match=r"demand.csv:4"):
        load_system(tmp_path)


def test_negative_magnitude_rejected(tmp_path):
    write_system(one_zone_fixture(), tmp_path)
    p = tmp_path / "demand.csv"
    p.write_text(p.read_text().replace("z1,3,30.0", "z1,3,-30.0"))
    with pytest.raises(LoadError, match="demand.csv"):
        load_system(tmp_path)


def _mutate_resource(s, **changes):
    return s.with_resources([dataclasses.replace(s.colo_resources[0], **changes)])


def _mutate_component(s, kind, **changes):
    r = s.colo_resources[0]
    comps = dict(r.components)
    comps[kind] = dataclasses.replace(comps[kind], **changes)
    return s.with_resources([dataclasses.replace(r, components=comps)])


def _drop(s, *kinds):
    r = s.colo_resources[0]
    return s.with_resources([dataclasses.replace(
        r, components={k: v for k, v in r.components.items() if k not in kinds})])


def test_inverter_efficiency_violation():
    v = validate(_mutate_resource(one_zone_fixture(), inverter_efficiency=1.2))
    assert [str(x) for x in v] == ["resource site: inverter_efficiency out of (0,1]"]


def test_min_above_max_violation():
    v = validate(_mutate_component(one_zone_fixture(), C.PV, min_capacity=50, max_capacity=10))
    assert len(v) == 1 and v[0].field == "pv_min_capacity"


BROKEN = {
    "demand_negative": lambda s: dataclasses.replace(s, zones=(Zone("z1", (1, -1, 1, 1)),)),
    "demand_length": lambda s: dataclasses.replace(s, zones=(Zone("z1", (1, 1, 1)),), horizon=4),
    "eta_dc_charge": lambda s: _mutate_resource(s, eta_dc_charge=0.0),
    "eta_ac_discharge": lambda s: _mutate_resource(s, eta_ac_discharge=1.01),
    "self_discharge": lambda s: _mutate_resource(s, self_discharge=1.0),
    "cf_range": lambda s: _mutate_resource(s, cf_pv=(0.1, 1.2, 0.3, 0.0)),
    "cf_length": lambda s: _mutate_resource(s, cf_pv=(0.1, 0.2)),
    "ilr": lambda s: _mutate_resource(s, ilr_pv=0.0),
    "mu": lambda s: _mutate_resource(s, power_to_energy_dc=-0.25),
    "zone_ref": lambda s: _mutate_resource(s, zone="XX"),
    "storage_without_flows": lambda s: _drop(s, C.CHARGE_DC),
    "pv_without_inverter": lambda s: _drop(s, C.INVERTER),
    "negative_existing": lambda s: _mutate_component(s, C.GRID, existing=-1.0),
    "line_self_loop": lambda s: dataclasses.replace(s, lines=(TransportLine("z1", "z1"),)),
    "line_negative": lambda s: dataclasses.replace(
        s, zones=s.zones + (Zone("z2", (0, 0, 0, 0)),),
        lines=(TransportLine("z1", "z2", existing_capacity=-5),)),
    "thermal_cost": lambda s: dataclasses.replace(
        s, thermal_resources=(ThermalResource("g", "z1", vom_plus_fuel_cost=-1),)),
    "rps": lambda s: dataclasses.replace(s, rps_share=1.5),
}


@pytest.mark.parametrize("name", sorted(BROKEN))
def test_each_broken_invariant_is_reported(name):
    s = one_zone_fixture()
    assert validate(s) == []
    assert len(validate(BROKEN[name](s))) >= 1


finite = st.floats(0, 1e6, allow_nan=False)
frac = st.floats(0.01, 1.0)


@st.composite
def systems(draw):
    T = draw(st.integers(1, 6))
    demand = tuple(draw(st.lists(finite, min_size=T, max_size=T)))
    comps = {}
    for kind in (C.GRID, C.PV, C.WIND, C.INVERTER):
        if kind in (C.GRID, C.INVERTER) or draw(st.booleans()):
            lo = draw(finite)
            hi = draw(st.one_of(st.none(), st.floats(lo, 2e6)))
            comps[kind] = P(draw(finite), hi, lo, draw(finite), draw(finite),
                            draw(st.floats(-50, 50)))
    side = draw(st.sampled_from(["none", "dc", "ac"]))
    if side != "none":
        comps[C.STORAGE_ENERGY] = P(draw(finite))
        pair = (C.CHARGE_DC, C.DISCHARGE_DC) if side == "dc" else (C.CHARGE_AC, C.DISCHARGE_AC)
        for k in pair:
            comps[k] = P(invest_cost=draw(finite))
    cf = st.lists(st.floats(0, 1), min_size=T, max_size=T).map(tuple)
    res = ColoResource(
        "r 1", "zone,a", comps,
        cf_pv=draw(cf) if C.PV in comps else (),
        cf_wind=draw(cf) if C.WIND in comps else (),
        inverter_efficiency=draw(frac), eta_dc_charge=draw(frac), eta_dc_discharge=draw(frac),
        eta_ac_charge=draw(frac), eta_ac_discharge=draw(frac),
        self_discharge=draw(st.floats(0, 0.99)),
        power_to_energy_dc=draw(st.one_of(st.none(), frac)) if side == "dc" else None,
        power_to_energy_ac=draw(st.one_of(st.none(), frac)) if side == "ac" else None,
        ilr_pv=draw(st.one_of(st.just(-1.0), st.floats(0.1, 3))),
        ilr_wind=draw(st.one_of(st.just(-1.0), st.floats(0.1, 3))),
        interconnection_distance=draw(finite),
        grid_cost_per_kw_km=draw(st.one_of(st.none(), st.floats(0, 10))))
    thermal = (ThermalResource("g", "zone,a", draw(finite), draw(finite), draw(finite),
                               draw(finite), draw(finite), draw(st.booleans())),)
    return SystemDescription((Zone("zone,a", demand),), (), (res,), thermal,
                             forced_battery_mw=draw(st.one_of(st.none(), finite)),
                             rps_share=draw(st.one_of(st.none(), st.floats(0, 1))),
                             nse_cost=draw(st.floats(1, 1e5)),
                             time_weight=draw(st.floats(0.1, 8760)))


@given(systems())
def test_write_then_load_is_identity(tmp_path_factory, s):
    assert validate(s) == []
    d = tmp_path_factory.mktemp("sys")
    write_system(s, d)
    assert load_system(d) == s
