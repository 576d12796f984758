import dataclasses
from collections import defaultdict
from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from hybridcap import scenarios
from hybridcap.costs import build_cost_cases
from hybridcap.domain import (ILR_FREE, STORAGE_PARTS, ComponentKind, SystemDescription,
                              ThermalResource, Zone, validate)
from hybridcap.metrics import read_metrics
from hybridcap.scenarios import (MODES, ScenarioSpec, apply_mode, check_manifest,
                                 standard_manifest, read_manifest, run_matrix, write_manifest)
from hybridcap.toy import enumeration_toy, ilr_toy, two_zone_toy

C = ComponentKind
REPORT_FILES = {"capacity.csv", "dispatch.csv", "metrics.csv", "duals.csv", "costs.csv"}


# -- apply_mode -----------------------------------------------------------------------------

def test_fixed_mode_strips_storage_and_pins_ratios():
    s = apply_mode(two_zone_toy(), "fixed")
    pv = s.resource("north_pv")
    assert pv.components_present == {C.PV, C.INVERTER, C.GRID}
    assert pv.ilr_pv == 1.3
    assert pv.power_to_energy_dc is None
    wind = s.resource("north_wind")
    assert wind.components_present == {C.WIND, C.GRID}
    assert wind.ilr_wind == 1.0
    # the standalone option stays available
    assert s.resource("north_batt") == two_zone_toy().resource("north_batt")
    assert validate(s) == []


def test_optimized_mode_matches_fixed_resource_set():
    fixed, opt = apply_mode(two_zone_toy(), "fixed"), apply_mode(two_zone_toy(), "optimized")
    for a, b in zip(fixed.colo_resources, opt.colo_resources):
        assert a.components_present == b.components_present
    assert all(r.ilr_pv == ILR_FREE and r.ilr_wind == ILR_FREE for r in opt.colo_resources)


def test_colocated_keeps_components():
    base = two_zone_toy()
    s = apply_mode(base, "colocated")
    for a, b in zip(base.colo_resources, s.colo_resources):
        assert a.components == b.components
        assert a.power_to_energy_dc == b.power_to_energy_dc


def test_vre_sites_have_no_storage_outside_colocated():
    for mode in ("fixed", "optimized"):
        for r in apply_mode(two_zone_toy(), mode).colo_resources:
            if not r.is_standalone_storage:
                assert not any(r.has(c) for c in STORAGE_PARTS)


def test_unknown_mode():
    with pytest.raises(ValueError, match="mode"):
        apply_mode(two_zone_toy(), "islanded")


@given(st.sampled_from(MODES), st.sampled_from([two_zone_toy, enumeration_toy,
                                               lambda: ilr_toy(1e4)]))
def test_apply_mode_idempotent(mode, factory):
    once = apply_mode(factory(), mode)
    assert apply_mode(once, mode) == once


# -- manifest -------------------------------------------------------------------------------

def test_standard_manifest_shape():
    m = standard_manifest()
    assert len(m) == 24
    assert [s.run_id for s in m] == list(range(1, 25))
    assert {s.mode for s in m} == set(MODES)
    assert {s.cost_case for s in m} == {"low", "mid"}
    assert {s.forced_battery_mw for s in m} == {3750.0, 5000.0, 7500.0, 15000.0}
    assert len({s.key for s in m}) == 24


def test_manifest_round_trip(tmp_path):
    p = tmp_path / "scenarios.csv"
    write_manifest(standard_manifest(), p)
    assert p.read_text().splitlines()[0] == "run_id,mode,cost_case,forced_battery_mw"
    assert read_manifest(p) == standard_manifest()


def test_duplicate_rows_rejected():
    with pytest.raises(ValueError, match="run_id"):
        check_manifest([ScenarioSpec(1, "fixed", "low", 1.0), ScenarioSpec(1, "fixed", "mid", 1.0)])
    with pytest.raises(ValueError, match="duplicate scenario"):
        check_manifest([ScenarioSpec(1, "fixed", "low", 1.0), ScenarioSpec(2, "fixed", "low", 1.0)])


def test_bad_manifest_rows(tmp_path):
    p = tmp_path / "m.csv"
    p.write_text("run_id,mode,cost_case,forced_battery_mw\n1,fixed,low,10\n2,hybrid,low,10\n")
    with pytest.raises(ValueError, match="m.csv:3"):
        read_manifest(p)
    p.write_text("run_id,mode,cost_case\n1,fixed,low\n")
    with pytest.raises(ValueError, match="missing columns"):
        read_manifest(p)
    with pytest.raises(ValueError, match=">= 0"):
        ScenarioSpec(1, "fixed", "low", -5.0)


# -- running ---------------------------------------------------------------------------------

def gas_only(forced):
    return SystemDescription((Zone("z", (5.0, 5.0)),),
                             thermal_resources=(ThermalResource("g", "z", existing_capacity=10,
                                                                vom_plus_fuel_cost=20.0),),
                             forced_battery_mw=forced)


def test_single_row_manifest(tmp_path):
    res = run_matrix(two_zone_toy(), [ScenarioSpec(7, "colocated", "mid", 5000.0)], tmp_path)
    assert [r.status for r in res] == ["optimal"]
    assert [p.name for p in tmp_path.iterdir()] == ["7"]
    assert {p.name for p in (tmp_path / "7").iterdir()} == REPORT_FILES


def test_failures_are_isolated(tmp_path):
    manifest = [ScenarioSpec(1, "fixed", "low", 0.0),
                ScenarioSpec(2, "fixed", "low", 10.0),     # nothing can satisfy the forcing
                ScenarioSpec(3, "fixed", "high", 0.0)]     # no such cost case
    res = run_matrix(gas_only(None), manifest, tmp_path)
    assert [r.status for r in res] == ["optimal", "infeasible", "error"]
    assert res[0].objective == pytest.approx(2 * 5.0 * 20.0)
    assert read_metrics(tmp_path / "2" / "metrics.csv")["status"] == "infeasible"
    assert "high" in (tmp_path / "3" / "error.txt").read_text()
    assert read_metrics(tmp_path / "3" / "metrics.csv")["status"] == "error"


def test_parallel_workers_match_serial(tmp_path):
    manifest = [ScenarioSpec(i + 1, mode, "low", 5000.0) for i, mode in enumerate(MODES)]
    serial = run_matrix(two_zone_toy(), manifest, tmp_path / "a")
    parallel = run_matrix(two_zone_toy(), manifest, tmp_path / "b", workers=3)
    assert [r.objective for r in parallel] == [r.objective for r in serial]
    for i in ("1", "2", "3"):
        for f in REPORT_FILES:
            assert (tmp_path / "a" / i / f).read_bytes() == (tmp_path / "b" / i / f).read_bytes()


def test_prepare_sets_forced_level_and_costs():
    spec = ScenarioSpec(1, "optimized", "mid", 1234.0)
    tables = build_cost_cases()
    s = scenarios.prepare(two_zone_toy(), spec, tables)
    assert s.forced_battery_mw == 1234.0
    assert s.resource("north_pv").components[C.PV].invest_cost == \
        tables["mid"].get("solar", "pv").invest


def test_toy_matrix_all_optimal(toy_matrix):
    out, results, _ = toy_matrix
    assert len(results) == 24
    assert all(r.status == "optimal" for r in results)
    assert sorted(int(p.name) for p in Path(out).iterdir() if p.is_dir()) == list(range(1, 25))


def test_toy_matrix_nesting(toy_matrix):
    _, results, _ = toy_matrix
    by = defaultdict(dict)
    for r in results:
        by[(r.spec.cost_case, r.spec.forced_battery_mw)][r.spec.mode] = r.objective
    for key, obj in by.items():
        tol = 1e-6 * abs(obj["fixed"])
        assert obj["fixed"] >= obj["optimized"] - tol, key
        assert obj["optimized"] >= obj["colocated"] - tol, key


def test_relaxing_mode_never_hurts_on_small_fixture():
    s = dataclasses.replace(enumeration_toy(), forced_battery_mw=None)
    objs = [scenarios.solve_scenario(s, ScenarioSpec(1, m, "low", 0.0))[1].objective
            for m in MODES]
    assert objs[0] >= objs[1] - 1e-9 and objs[1] >= objs[2] - 1e-9
