from dataclasses import replace
import json
from pathlib import Path

import pytest

from timrbs.errors import ConfigurationError
from timrbs.field_grid import GridSpec
from timrbs.receiver import receive
from timrbs.scenario import (
    CSV_COLUMNS, ModeCache, Scenario, compare_layouts, emit_results, load_scenario,
    make_row, max_reach, read_results, run_sweep, scenario_from_dict,
)
from timrbs.cavity import fox_li_solve

SCENARIO_DIR = Path(__file__).resolve().parents[1] / "scenarios"
HEADER = ("D_t_m,P_in_W,theta,eta1,eta2,eta3,eta4,eta_ce,eta_cx,eta_m,eta_t,eta_roundtrip,"
          "gamma_mag,beam_radius_gain_m,P_out_W,P_th_W,P_e_W,C_bpsHz,iterations,converged")


def small(d=None, n=64):
    d = dict(d or {})
    d.setdefault("grid", {"n": n, "window": 0.02})
    return scenario_from_dict(d)


@pytest.fixture(scope="module")
def rows():
    return run_sweep(small({"sweep": {"values": [4, 8]}, "fixed": {"theta": [0.3, 0.7]}}))


def test_empty_object_gives_reference_defaults(tmp_path):
    p = tmp_path / "s.json"
    p.write_text("{}")
    s = load_scenario(p)
    assert s == Scenario()
    assert s.layout.with_tim
    assert s.sweep.variable == "D_t"
    assert s.sweep.values == tuple(float(x) for x in range(2, 21, 2))
    assert s.P_in == (200.0,)
    g = s.gain_params()
    assert g.I_s == pytest.approx(1.26e7)
    assert (g.eta_s, g.eta_g) == (0.99, 0.72)
    assert s.layout.R2 == 0.7 and s.layout.r_gain == 1.5e-3
    assert s.pv.n_s == 40 and s.apd.B_n == 811.7e6


def test_no_tim_flag():
    assert not scenario_from_dict({"layout": {"with_tim": False}}).layout.with_tim


@pytest.mark.parametrize("d, key, text", [
    ({"sweep": {"values": [5, 3]}}, "sweep.values", "sweep values strictly increasing"),
    ({"sweep": {"values": []}}, "sweep.values", "non-empty"),
    ({"sweep": {"variable": "R2"}}, "sweep.variable", "unknown sweep variable"),
    ({"layout": {"R2": 1.2}}, "layout.R2", ""),
    ({"layout": {"colour": 1}}, "layout", "unknown key"),
    ({"lasers": {}}, None, "unknown top-level"),
    ({"grid": {"n": 100}}, "grid", "power of two"),
    ({"fixed": {"theta": 2}}, "fixed.theta", ""),
    ({"fixed": {"P_in": "lots"}}, "fixed.P_in", ""),
    ({"solver": {"tol": -1}}, "solver.tol", ""),
    ({"solver": {"max_iter": 0.5}}, "solver.max_iter", ""),
    ({"seed": {"kind": "nope"}}, "seed", ""),
    ({"outputs": ["xlsx"]}, "outputs", ""),
    ({"pv": {"D": 0.3}}, "pv.D", ""),
    ({"gain": {"eta_s": 2}}, "gain.eta_s", ""),
])
def test_configuration_errors_carry_key_path(d, key, text):
    with pytest.raises(ConfigurationError) as err:
        scenario_from_dict(d)
    assert err.value.key_path == key
    assert text in str(err.value)


def test_file_errors(tmp_path):
    with pytest.raises(ConfigurationError, match="not found"):
        load_scenario(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{layout: }")
    with pytest.raises(ConfigurationError, match="malformed"):
        load_scenario(bad)
    arr = tmp_path / "arr.json"
    arr.write_text("[]")
    with pytest.raises(ConfigurationError, match="JSON object"):
        load_scenario(arr)


@pytest.mark.parametrize("name", ["fig9.json", "fig10.json", "fig11.json", "fig12.json"])
def test_shipped_scenarios_load(name):
    s = load_scenario(SCENARIO_DIR / name)
    assert s.grid.n == 1024
    assert s.sweep.variable == "D_t"


def test_rows_cover_every_combination(rows):
    assert [(r.D_t, r.theta) for r in rows] == [(4.0, 0.3), (4.0, 0.7), (8.0, 0.3), (8.0, 0.7)]


def test_rows_are_self_consistent(rows):
    for r in rows:
        rx = receive(r.P_out, r.theta)
        assert (rx.P_e, rx.C) == (r.P_e, r.C)
        assert r.eta_t == pytest.approx(r.eta1 * r.eta2 * r.eta3 * r.eta4)
        assert r.eta_roundtrip == pytest.approx(r.eta_t * r.eta_m ** 2)
        assert r.eta_m == pytest.approx(r.eta_ce * r.eta_cx)


def test_input_power_sweep_is_increasing():
    rs = run_sweep(small({"sweep": {"variable": "P_in", "values": [100, 200, 300]},
                          "layout": {"D_t": 5.0}}))
    p = [r.P_out for r in rs]
    assert p[0] < p[1] < p[2]
    assert len({r.eta_roundtrip for r in rs}) == 1


def test_csv_format(tmp_path, rows):
    path = tmp_path / "one.csv"
    emit_results(rows[:1], "csv", str(path))
    lines = path.read_text().splitlines()
    assert len(lines) == 2
    assert lines[0] == HEADER
    assert ",".join(CSV_COLUMNS) == HEADER
    fields = lines[1].split(",")
    assert fields[-1] in ("true", "false")
    assert all("e" in x for x in fields[:-2])


def test_csv_and_json_round_trip(tmp_path, rows):
    c, j = tmp_path / "r.csv", tmp_path / "r.json"
    emit_results(rows, "csv", str(c))
    emit_results(rows, "json", str(j))
    from_csv, from_json = read_results(str(c)), read_results(str(j))
    originals = [r.as_record() for r in rows]
    assert from_csv == originals
    assert from_json == originals
    assert list(json.loads(j.read_text())[0]) == list(CSV_COLUMNS)


def test_emit_errors(tmp_path, rows):
    with pytest.raises(ValueError):
        emit_results([], "csv", str(tmp_path / "x.csv"))
    with pytest.raises(ValueError):
        emit_results(rows, "xml", str(tmp_path / "x.xml"))
    with pytest.raises(OSError):
        emit_results(rows, "csv", str(tmp_path / "nope" / "x.csv"))


def test_deterministic_and_thread_independent(tmp_path):
    s = small({"sweep": {"values": [3, 6, 9]}, "seed": {"kind": "random-phase", "seed": 4,
                                                        "radius": 0.0025}})
    paths = []
    for k, threads in enumerate((1, 1, 3)):
        p = tmp_path / f"run{k}.csv"
        emit_results(run_sweep(s, threads=threads), "csv", str(p))
        paths.append(p.read_bytes())
    assert paths[0] == paths[1] == paths[2]


def test_cache_is_transparent():
    s = small({"sweep": {"values": [5, 7]}, "fixed": {"P_in": [150, 250]}})
    cache = ModeCache()
    cached = run_sweep(s, cache=cache)
    assert len(cache) == 2
    uncached = [make_row(s, fox_li_solve(replace(s.layout, D_t=r.D_t), s.grid,
                                         tol=s.tol, max_iter=s.max_iter), r.P_in, r.theta)
                for r in cached]
    assert cached == uncached


def test_nonconverged_rows_are_flagged():
    rs = run_sweep(small({"sweep": {"values": [5]}, "solver": {"max_iter": 2}}))
    assert rs[0].converged is False


def test_telescope_loses_at_one_meter():
    # a larger spot on the gain medium wins when diffraction loss is small
    s = small({"sweep": {"values": [1.0]}}, n=256)
    cmp = compare_layouts(replace(s, reach_P_in=()), threads=1)
    assert cmp.rows[True][0].P_out < cmp.rows[False][0].P_out
    assert cmp.max_reach[True][200.0] > cmp.max_reach[False][200.0]
    assert set(cmp.summary()["max_reach_m"]) == {"TIM", "no-TIM"}


def test_max_reach_edges():
    s = replace(small({}), reach_resolution=1.0)
    assert max_reach(s, 1.0, D_lo=1.0, D_hi=10.0) == 0.0
    assert max_reach(s, 1e5, D_lo=1.0, D_hi=10.0) == 10.0
    s256 = replace(s, grid=GridSpec(256, 0.02))
    r = max_reach(s256, 200.0, D_lo=2.0, D_hi=60.0)
    assert 20.0 < r < 45.0


def test_cache_drops_fields_unless_asked():
    s = small({"sweep": {"values": [5]}})
    lean, full = ModeCache(), ModeCache(keep_fields=True)
    a = lean.get(s.layout, s.grid, s.seed_profile, s.tol, s.max_iter)
    b = full.get(s.layout, s.grid, s.seed_profile, s.tol, s.max_iter)
    assert a.mode_at == {} and "gain" in b.mode_at
    assert a.summary() == b.summary()
