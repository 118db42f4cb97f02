import json
import math

import pytest

from ganphotocell.cli import main


def _body(path):
    return [line for line in path.read_text().splitlines() if not line.startswith("#")]


def _run(tmp_path, *args):
    return main([*args, "--out", str(tmp_path / "run")])


def test_rates(tmp_path, capsys):
    assert _run(tmp_path, "rates", "--model", "coupled") == 0
    out = capsys.readouterr().out
    assert "J" in out and "eV" in out and "gamma_h" in out and "1/ns" in out
    summary = json.loads((tmp_path / "run_summary.json").read_text())
    assert summary["rates"]["coupled"]["J"] == pytest.approx(0.20735, abs=1e-4)
    assert (tmp_path / "run_config.toml").exists()


def test_dynamics_csv(tmp_path):
    assert _run(tmp_path, "dynamics", "--set", "grids.n_checkpoints=20") == 0
    for kind, labels in (("coupled", "x1,rho_x2"), ("uncoupled", "a1,rho_a2")):
        body = _body(tmp_path / f"run_dynamics_{kind}.csv")
        assert body[0] == f"t_ns,rho_{labels},rho_alpha,rho_beta,rho_b"
        rows = [list(map(float, r.split(","))) for r in body[1:]]
        assert len(rows) == 21 and rows[-1][0] == 200.0
        assert all(min(r[1:]) >= 0 for r in rows)
        assert all(abs(sum(r[1:]) - 1) <= 1e-10 for r in rows)


def test_steady(tmp_path):
    assert _run(tmp_path, "steady", "--model", "uncoupled") == 0
    summary = json.loads((tmp_path / "run_summary.json").read_text())
    assert summary["steady"]["uncoupled"]["residual"] <= 1e-11


def test_iv_outputs(tmp_path):
    assert _run(tmp_path, "iv") == 0
    header = "Gamma_per_ns,V_volts,j_e_per_ns,P_eV_per_ns,P_sun_eV_per_ns,flag"
    for kind in ("coupled", "uncoupled"):
        body = _body(tmp_path / f"run_iv_{kind}.csv")
        assert body[0] == header and len(body) == 61
        for row in body[1:]:
            assert all(math.isfinite(float(x)) for x in row.split(",")[:5])
    s = json.loads((tmp_path / "run_summary.json").read_text())
    assert s["eta"] == pytest.approx(0.1477, abs=5e-4)
    prov = s["provenance"]
    for key in ("E_star_eV", "Gamma_beta_b_rule", "Gamma_unit", "gamma_x_rule", "E_b_eV", "gamma_grid_per_ns"):
        assert key in prov
    assert prov["Gamma_unit"] == "1/ns"


def test_flagged_rows_keep_numbers_out(tmp_path):
    # Gamma grid starting at 0 would be invalid; an open-circuit device gives flagged rows instead
    assert _run(tmp_path, "iv", "--model", "coupled", "--set", "n_h=0", "--set", "grids.gamma_points=3") == 0
    for row in _body(tmp_path / "run_iv_coupled.csv")[1:]:
        cells = row.split(",")
        if not all(math.isfinite(float(x)) for x in cells[:5]):
            assert cells[5] != ""


def test_config_file_and_hash(tmp_path):
    cfg = tmp_path / "c.toml"
    cfg.write_text("w_br_nm = 0.7\n[grids]\ngamma_points = 12\n")
    assert main(["iv", "--config", str(cfg), "--out", str(tmp_path / "a"), "--model", "coupled"]) == 0
    text = (tmp_path / "a_iv_coupled.csv").read_text()
    assert text.startswith("# ganphotocell")
    assert "config_sha256" in text and "created" in text
    echo = (tmp_path / "a_config.toml").read_text()
    assert "w_br_nm = 0.7" in echo and "gamma_points = 12" in echo


def test_sweep_geometry_partial_failure(tmp_path):
    code = _run(tmp_path, "sweep-geometry", "--set", "grids.d_perp_nm=[1.0, 1.5]", "--set", "grids.w_br_nm=[0.5]")
    assert code == 2
    body = _body(tmp_path / "run_sweep_geometry.csv")
    assert body[0].startswith("d_perp_nm,w_br_nm,eta")
    assert body[1].endswith("failed") and not body[2].endswith("failed")


def test_sweep_gamma_x(tmp_path):
    assert _run(tmp_path, "sweep-gamma-x", "--set", "grids.gamma_x_multipliers=[0.5, 1.0]") == 0
    s = json.loads((tmp_path / "run_summary.json").read_text())
    assert s["eta"][1] == pytest.approx(0.1477, abs=5e-4)


@pytest.mark.parametrize("argv", [["bogus"], ["iv", "--set", "Gamma_load=1"], ["iv", "--config", "/nonexistent.toml"]])
def test_fatal_errors(tmp_path, argv, capsys):
    assert main([*argv, "--out", str(tmp_path / "x")] if argv[0] != "bogus" else argv) == 1


def test_help_exits_zero(capsys):
    assert main(["--help"]) == 0
