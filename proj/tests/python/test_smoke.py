import json
import math

import pytest

import harnacklab as hl


def test_scenario_library_lists_and_describes():
    names = hl.list_scenarios()
    assert "hamilton_gaussian" in names
    assert "scalar_nongradient" in names
    for name in names:
        assert hl.scenario_description(name)
        cfg = json.loads(hl.scenario_json(name))
        assert cfg["id"] == name
        assert hl.validate(hl.scenario_json(name)) == name


def test_validate_rejects_bad_config_naming_the_field():
    cfg = json.loads(hl.scenario_json("refinement_line"))
    cfg["time"]["dt"] = -1.0
    with pytest.raises(ValueError, match="time.dt"):
        hl.validate(json.dumps(cfg))
    with pytest.raises(ValueError, match="no built-in"):
        hl.scenario_json("no_such_scenario")


def test_run_writes_summary_and_reports_pass(tmp_path):
    cfg = json.loads(hl.scenario_json("refinement_line"))
    out = hl.run(json.dumps(cfg), str(tmp_path / "run"))
    assert out["exit_code"] == 0
    assert out["all_pass"] is True
    summary = json.loads(out["summary"])
    assert summary["schema_version"] == 1
    assert summary["id"] == "refinement_line"
    assert summary["checks"]["matrix"]["pass"] is True
    assert (tmp_path / "run" / "summary.json").exists()
    assert out["files"][0].endswith("summary.json")


def test_undersized_k_fails_honestly(tmp_path):
    out = hl.run(hl.scenario_json("honesty_undersized_k"), str(tmp_path))
    assert out["exit_code"] == 1
    summary = json.loads(out["summary"])
    assert summary["checks"]["matrix"]["pass"] is False
    assert summary["checks"]["matrix"]["global_min_margin"] < -0.05


def test_sweep_produces_one_row_per_value(tmp_path):
    out = hl.sweep(
        hl.scenario_json("scalar_nongradient"),
        "constants.lambda",
        [0.25, 0.5],
        str(tmp_path),
    )
    assert out["exit_code"] == 0
    rows = [r for r in out["csv"].strip().splitlines() if r]
    assert rows[0].startswith("value,exit_code,pass")
    assert len(rows) == 3


def test_hypotheses_and_geometry(tmp_path):
    out = hl.hypotheses(hl.scenario_json("matrix_potential"), str(tmp_path / "hyp"))
    summary = json.loads(out["summary"])
    assert summary["hypotheses"]["required_flags_ok"] is True
    geo = hl.geometry_tests(hl.scenario_json("sphere_geometry"), str(tmp_path / "geo"))
    assert geo["exit_code"] == 0


def test_closed_form_helpers():
    assert hl.kcoth(0.0, 0.25) == pytest.approx(4.0, rel=1e-15)
    assert hl.kcoth(2.0, 1.0) == pytest.approx(2.0 / math.tanh(2.0), rel=1e-15)
    v = hl.abc_parameters(K=0.7, lam=0.0, k1=0.0, k2=0.0, n=2, t=1.3)
    assert v["chi"] == pytest.approx(0.7, rel=1e-15)
    assert v["a"] + v["b"] == pytest.approx(math.sinh(0.7 * 1.3) ** 2, rel=1e-12)
    assert hl.riccati_comparison(0.5, 0.1, 2.0) < 1e-9
