import json
import math
import os
import subprocess

import pytest

import rpnv


def test_presets_and_canonical_config():
    names = rpnv.preset_names()
    assert "appendix-axial3" in names
    text = rpnv.preset_config("appendix-axial3")
    cfg = json.loads(text)
    assert cfg["name"] == "appendix-axial3"
    assert rpnv.canonical_config(text) == text
    assert rpnv.config_hash("appendix-axial3") == rpnv.config_hash(text)
    assert len(rpnv.config_hash(text)) == 16


def test_geometry_helpers():
    assert list(rpnv.coupling_factors(0.0)) == [0.0, 0.0, 2.0]
    magic = math.acos(1.0 / math.sqrt(3.0))
    assert abs(rpnv.coupling_factors(magic)[2]) < 1e-12
    d = rpnv.dipolar_prefactor(2.0)
    assert d < 0.0
    assert abs(abs(d) / (2 * math.pi) - 6.50e6) / 6.50e6 < 5e-3
    assert rpnv.g_eff(2.0, 0.0, 0.0) == pytest.approx(2 * abs(d) * 2.0, rel=1e-14)


def test_errors_map_to_python_exceptions():
    with pytest.raises(KeyError):
        rpnv.preset_config("no-such-preset")
    with pytest.raises(ValueError, match="did you mean 'field'"):
        rpnv.canonical_config('{"feild": {}}')
    with pytest.raises(ValueError):
        rpnv.dipolar_prefactor(0.0)


def test_angle_sweep_respects_geometric_zeros():
    cfg = json.loads(rpnv.preset_config("appendix-axial3"))
    out = rpnv.angle_sweep(json.dumps(cfg), [0.0, 45.0, 90.0])
    assert list(out["theta_deg"]) == [0.0, 45.0, 90.0]
    assert out["x"][0] == 0.0
    assert all(v == 0.0 for v in out["y"])
    assert all(0.0 < v < 1.0 for v in out["singlet_yield"])


def test_run_writes_outputs(tmp_path):
    res = rpnv.run("fig3-coupling-map", str(tmp_path / "map"))
    files = [os.path.basename(f) for f in res["files"]]
    assert "coupling_map.csv" in files
    manifest = json.loads((tmp_path / "map" / "manifest.json").read_text())
    assert manifest["config_hash"] == rpnv.config_hash("fig3-coupling-map")


def test_run_with_oracle(tmp_path):
    cfg = json.loads(rpnv.preset_config("appendix-axial3"))
    cfg["sweep"]["theta_step_deg"] = 45.0
    res = rpnv.run(json.dumps(cfg), str(tmp_path / "ax"), oracle=True)
    assert res["oracle_deviation"] is not None
    assert res["oracle_deviation"] < 1e-6


@pytest.mark.skipif("RPNV_CLI" not in os.environ, reason="CLI path not provided")
def test_cli_and_module_agree(tmp_path):
    subprocess.run([os.environ["RPNV_CLI"], "--preset", "fig3-coupling-map", "--out", str(tmp_path / "cli")], check=True)
    rpnv.run("fig3-coupling-map", str(tmp_path / "py"))
    a = (tmp_path / "cli" / "coupling_map.csv").read_bytes()
    b = (tmp_path / "py" / "coupling_map.csv").read_bytes()
    assert a == b
