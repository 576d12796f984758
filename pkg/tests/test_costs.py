import dataclasses
from decimal import Decimal, getcontext

import pytest
from hypothesis import given, strategies as st

from hybridcap import costs
from hybridcap.costs import (AnnualizedCostTable, CostBreakdown2021, CostEntry, CostError,
                             FinanceParams, TaxCredit, annuitize, apply_cost_table,
                             apply_tax_credits, build_cost_cases, split_dc_ac)
from hybridcap.domain import ComponentKind
from hybridcap.toy import two_zone_toy

C = ComponentKind


def crf_oracle(wacc: float, years: int) -> Decimal:
    """Capital recovery factor in 60-digit decimal arithmetic."""
    getcontext().prec = 60
    w = Decimal(str(wacc))
    return w / (1 - (1 + w) ** -years)


# -- breakdown and DC/AC split -------------------------------------------------------

def test_breakdown_column_sums():
    assert CostBreakdown2021().totals() == (83.2, 85.4, 5.5)
    CostBreakdown2021().check()


def test_breakdown_check_rejects_bad_sum():
    b = CostBreakdown2021()
    items = dict(b.items)
    items["pv_module"] = (30.0, 0.0, 0.0)
    with pytest.raises(CostError, match="pv"):
        CostBreakdown2021(items).check()


def test_per_unit_figures():
    s = split_dc_ac()
    assert s.pv_dc_per_mw == pytest.approx(0.832)
    assert s.inverter_per_mw_ac == pytest.approx(5.5 / 77)
    assert round(s.pv_dc_per_mw, 2) == 0.83
    assert round(s.inverter_per_mw_ac, 2) == 0.07
    assert abs(s.storage_dc_per_mwh - 0.35) < 0.01


def test_ratios_to_two_decimals():
    s = split_dc_ac()
    assert round(s.pv_ratio, 2) == 0.73
    assert round(s.storage_ratio, 2) == 0.95
    assert abs(s.pv_ac_per_mw_ac - 1.14) < 0.01
    assert abs(s.storage_ac_per_mwh - 0.38) < 0.01


def test_zero_basis_rejected():
    with pytest.raises(CostError):
        split_dc_ac(dataclasses.replace(CostBreakdown2021(), pv_basis_mw_dc=0.0))


# -- annuitisation -----------------------------------------------------------------------

def test_annuitize_against_decimal_oracle():
    got = annuitize(710.0, FinanceParams(0.025, 30))
    want = float(Decimal(710) * crf_oracle(0.025, 30))
    assert got == pytest.approx(want, rel=1e-12)
    assert got == pytest.approx(33.9, rel=1e-3)


def test_long_life_tends_to_wacc():
    assert annuitize(1000.0, FinanceParams(0.025, 10_000)) == pytest.approx(25.0, rel=1e-9)


def test_regional_multiplier_scales_exactly():
    base = annuitize(500.0, FinanceParams(0.04, 20))
    assert annuitize(500.0, FinanceParams(0.04, 20, 1.1)) == pytest.approx(1.1 * base, rel=1e-15)


def test_finance_params_validation():
    with pytest.raises(CostError):
        FinanceParams(0.0, 10)
    with pytest.raises(CostError):
        FinanceParams(0.05, 0.5)


@given(st.floats(0.001, 0.2), st.integers(1, 80), st.floats(0, 1e6), st.floats(0, 1e6))
def test_annuitize_is_linear(wacc, years, a, b):
    fp = FinanceParams(wacc, years)
    assert annuitize(a + b, fp) == pytest.approx(annuitize(a, fp) + annuitize(b, fp),
                                                 rel=1e-12, abs=1e-9)
    assert annuitize(3 * a, fp) == pytest.approx(3 * annuitize(a, fp), rel=1e-12, abs=1e-9)


@given(st.floats(0.001, 0.2), st.floats(0.0005, 0.05), st.integers(1, 80))
def test_annuitize_increases_with_wacc(wacc, step, years):
    lo = annuitize(100.0, FinanceParams(wacc, years))
    hi = annuitize(100.0, FinanceParams(wacc + step, years))
    assert hi > lo


def test_annuitize_grid_of_parameters_matches_oracle():
    for w in (0.01, 0.025, 0.032, 0.044, 0.08):
        for n in (1, 15, 30, 60):
            want = float(Decimal(1000) * crf_oracle(w, n))
            assert annuitize(1000.0, FinanceParams(w, n)) == pytest.approx(want, rel=1e-12)


# -- tax credits ---------------------------------------------------------------------------

def raw_tables():
    return build_cost_cases(credits=None)


def test_ptc_enters_as_negative_vom():
    t = build_cost_cases()["low"]
    assert t.get("solar", "pv").vom == pytest.approx(-12.7)
    assert t.get("wind", "wind").vom == pytest.approx(-13.5)


def test_itc_on_storage():
    raw = raw_tables()["low"]
    t = apply_tax_credits(raw, {"storage": TaxCredit(itc_fraction=0.351)})
    ratio = t.get("solar", "storage_energy").invest / raw.get("solar", "storage_energy").invest
    assert ratio == pytest.approx(0.649)
    assert 261 * ratio == pytest.approx(169.4, abs=0.05)


def test_itc_floors_at_zero():
    table = AnnualizedCostTable("x", {("solar", "storage_energy"): CostEntry(invest=-5.0)})
    out = apply_tax_credits(table, {"storage": TaxCredit(itc_fraction=0.5)})
    assert out.get("solar", "storage_energy").invest == 0.0


def test_no_policy_is_identity():
    raw = raw_tables()["mid"]
    assert apply_tax_credits(raw, None) is raw
    assert apply_tax_credits(raw, {}) == raw


def test_both_credits_rejected():
    with pytest.raises(CostError, match="both"):
        apply_tax_credits(raw_tables()["low"], {"pv": TaxCredit(12.7, 0.3)})


# -- cost cases ---------------------------------------------------------------------------

def test_case_endpoints_pass_through():
    t = build_cost_cases()
    low, mid = t["low"].overnight, t["mid"].overnight
    assert (low.solar_capex, mid.solar_capex) == (710, 771)
    assert (low.wind_capex, mid.wind_capex) == (1138, 1308)
    assert (low.battery_capex, mid.battery_capex) == (261, 290)
    assert (low.inverter_capex, mid.inverter_capex) == (60, 83)
    assert low.grid_capex_per_kw_km == mid.grid_capex_per_kw_km == (2.9, 6.8)
    assert low.solar_fom == 16.2
    assert t["low"].get("solar", "pv").fom == pytest.approx(16_200)


def test_low_case_never_above_mid():
    t = build_cost_cases()
    for key, lo in t["low"].entries.items():
        hi = t["mid"].entries[key]
        assert lo.invest <= hi.invest and lo.fom <= hi.fom


def test_fom_nonnegative():
    for table in build_cost_cases().values():
        assert all(e.fom >= 0 for e in table.entries.values())


def test_projection_needs_decline_factors():
    base = costs.CASE_ENDPOINTS["mid"]
    with pytest.raises(CostError, match="decline"):
        build_cost_cases(base=base)
    t = build_cost_cases(base=base, decline={"future": {"solar_capex": 0.1}})
    assert t["future"].overnight.solar_capex == pytest.approx(771 * 0.9)


def test_pv_invest_in_model_units():
    t = build_cost_cases()["low"]
    assert t.get("solar", "pv").invest == pytest.approx(33_923, rel=1e-3)


def test_apply_cost_table_uses_context_and_distance():
    t = build_cost_cases()["low"]
    s = apply_cost_table(two_zone_toy(), t)
    pv = s.resource("north_pv")
    assert pv.components[C.PV].invest_cost == t.get("solar", "pv").invest
    assert pv.components[C.GRID].invest_cost == pytest.approx(
        t.get("solar", "grid").invest * pv.interconnection_distance)
    batt = s.resource("south_batt")
    assert batt.components[C.STORAGE_ENERGY].invest_cost == \
        t.get("standalone_storage", "storage_energy").invest
    wind = s.resource("north_wind")
    assert wind.components[C.WIND].vom_cost == pytest.approx(-13.5)


def test_site_specific_grid_rate():
    t = build_cost_cases()["low"]
    s = two_zone_toy()
    r = dataclasses.replace(s.resource("north_pv"), grid_cost_per_kw_km=5.8)
    out = apply_cost_table(s.with_resources([r]), t).resource("north_pv")
    assert out.components[C.GRID].invest_cost == pytest.approx(
        2 * t.get("solar", "grid").invest * r.interconnection_distance)


# -- files ---------------------------------------------------------------------------------

def test_cost_table_csv_round_trip(tmp_path):
    t = build_cost_cases()["mid"]
    p = tmp_path / "annualized_costs_mid.csv"
    costs.write_cost_table(t, p)
    back = costs.read_cost_table(p)
    assert back.case == "mid"
    assert back.entries == t.entries
    assert back.grid_reference_rate == t.grid_reference_rate


def test_pipeline_with_overrides(tmp_path):
    costs.write_breakdown(CostBreakdown2021(), tmp_path / "cost_breakdown_2021.csv")
    (tmp_path / "finance_params.csv").write_text(
        "context,component,wacc,lifespan,regional_multiplier\nsolar,pv,0.05,25,1.2\n")
    (tmp_path / "policy_credits.csv").write_text("technology,ptc_per_mwh,itc_fraction\n")
    paths = costs.run_cost_pipeline(tmp_path)
    low = costs.read_cost_table(paths["low"])
    assert low.get("solar", "pv").invest == pytest.approx(
        annuitize(710e3, FinanceParams(0.05, 25, 1.2)))
    assert low.get("solar", "pv").vom == 0.0


def test_bad_breakdown_file(tmp_path):
    (tmp_path / "cost_breakdown_2021.csv").write_text(
        "line_item,standalone_pv,standalone_storage,inverter\npv_module,abc,0,0\n")
    with pytest.raises(CostError, match=":2"):
        costs.run_cost_pipeline(tmp_path)
