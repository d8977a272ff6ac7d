import math

import pytest

from agni.costmodel import (
    AGNI_LATENCY_NS,
    ANCHORS,
    ChargePumpTable,
    LayoutModel,
    agni_cost,
    compare,
    cost_for,
    fit_baseline_constants,
    full_adder_count,
    parallel_pc_cost,
    serial_pc_cost,
    shipped_constants,
)
from agni.errors import ConfigError, RangeError

SIZES = (16, 32, 64, 128, 256)


def test_layout_added_strip():
    layout = LayoutModel()
    assert layout.added_height_f == 164.0
    assert layout.added_area_f2_per_pitch == 492.0
    assert layout.um2_per_f2 == pytest.approx(0.002025)


def test_charge_pump_exact_at_rows():
    cp = ChargePumpTable()
    assert cp.lookup(16) == (0.0087, 1.30e-9, 3.91e-9)
    assert cp.lookup(256) == (0.158, 2.28e-8, 6.85e-8)


def test_charge_pump_interpolation_monotone_and_bounded():
    cp = ChargePumpTable()
    prev = cp.lookup(16)
    for n in (20, 48, 100, 200):
        cur = cp.lookup(n)
        assert all(a < b for a, b in zip(prev, cur))
        prev = cur
    with pytest.raises(RangeError):
        cp.lookup(8)
    with pytest.raises(RangeError):
        cp.lookup(512)


def test_charge_pump_rejects_nonmonotone_table():
    with pytest.raises(ConfigError):
        ChargePumpTable(rows={16: (1.0, 1.0, 1.0), 32: (0.5, 2.0, 2.0)})


def test_full_adder_count():
    assert full_adder_count(16) == 11
    assert full_adder_count(256) == 247
    with pytest.raises(ConfigError):
        full_adder_count(12)


def test_agni_cost_components():
    layout = LayoutModel()
    r = agni_cost(16)
    cp_area = 0.0087
    expect_f2 = 492.0 * 16 + cp_area / layout.um2_per_f2
    assert r.area_f2 == pytest.approx(expect_f2)
    assert r.latency_ns == AGNI_LATENCY_NS
    switching = 3.0 * 16 * 8e-15 * 1.2**2
    cp_dyn = 1.30e-9 * 55e-9
    assert r.energy_j == pytest.approx(switching + cp_dyn)


def test_agni_iso_latency_all_sizes():
    for n in SIZES:
        assert agni_cost(n).latency_ns == AGNI_LATENCY_NS


def test_fit_residuals_vanish_at_anchors():
    consts, residuals = fit_baseline_constants()
    assert max(abs(v) for v in residuals.values()) < 1e-9


def test_shipped_constants_match_refit():
    consts, _ = fit_baseline_constants()
    shipped = shipped_constants()
    for k, v in consts.to_dict().items():
        assert getattr(shipped, k) == pytest.approx(v, rel=1e-6), k


def test_anchor_ratios_reproduced():
    for design in ("ParallelPC", "SerialPC"):
        for n, (r_area, r_al, r_edp) in ANCHORS[design].items():
            a = agni_cost(n)
            b = cost_for(design, n)
            assert b.area_um2 / a.area_um2 == pytest.approx(r_area, rel=1e-6)
            assert b.area_latency / a.area_latency == pytest.approx(r_al, rel=1e-6)
            assert b.edp / a.edp == pytest.approx(r_edp, rel=1e-6)


def test_advantage_ratios_monotone_in_n():
    rows = compare(SIZES)
    for design in ("ParallelPC", "SerialPC"):
        for idx in range(3):
            vals = [row.ratios[design][idx] for row in rows]
            assert all(b > a for a, b in zip(vals, vals[1:])), (design, idx)


def test_parallel_latency_grows_with_depth():
    lats = [parallel_pc_cost(n).latency_ns for n in SIZES]
    assert all(b > a for a, b in zip(lats, lats[1:]))
    # deeper tree and heavier wires: growth beats pure log2 scaling
    assert lats[-1] / lats[0] > math.log2(256) / math.log2(16)


def test_serial_latency_affine():
    c = shipped_constants()
    for n in SIZES:
        expect = c.spc_lat_slope_ns * n + c.spc_lat_fixed_ns
        assert serial_pc_cost(n).latency_ns == pytest.approx(expect)
    assert c.spc_lat_fixed_ns > 0


def test_cost_for_unknown_design():
    with pytest.raises(ConfigError):
        cost_for("Mystery", 16)


def test_compare_requires_sizes():
    with pytest.raises(ValueError):
        compare([])


def test_report_serialization():
    row = compare([64])[0]
    d = row.to_dict()
    assert d["n"] == 64
    assert set(d["reports"]) == {"AGNI", "ParallelPC", "SerialPC"}
    assert d["agni_advantage"]["SerialPC"]["edp"] > 1.0
