import json
import math

import numpy as np
import pytest

from hopfknot.cli_io import (ConfigError, RunConfig, main, parse_config)

FAST_QUAD = ("quad.radial_nodes = 48\n"
             "quad.angular_nodes_theta = 24\n"
             "quad.angular_nodes_phi = 48\n")


def write_config(tmp_path, body, name="run.cfg"):
    p = tmp_path / name
    p.write_text(body)
    return str(p)


def test_parse_config_minimal_defaults():
    cfg = parse_config("g = 1.0\nt_end = 1.5\n")
    assert cfg.g == 1.0
    assert cfg.t_end == 1.5
    assert cfg.t_start == 0.0
    assert cfg.rel_tol == 1e-9
    assert cfg.seed == 0
    assert cfg.threads == 1
    assert cfg.output_stride is None
    assert cfg.grid_shape() == (41, 41, 41)


def test_parse_config_comments_and_colons():
    cfg = parse_config("# a comment\ng: 2.5  # trailing\n\ntime: 1.0\n")
    assert cfg.g == 2.5
    assert cfg.time == 1.0


def test_parse_config_energy_pair_resolves_coupling():
    cfg = parse_config("energy_joules = 1.0\nl0_meters = 1.0\n")
    assert cfg.g is None
    assert cfg.coupling() == pytest.approx(0.14804, abs=2e-5)


def test_parse_config_g_and_energy_are_exclusive():
    with pytest.raises(ConfigError):
        parse_config("g = 1.0\nenergy_joules = 1.0\nl0_meters = 1.0\n")


def test_parse_config_energy_needs_both_halves():
    with pytest.raises(ConfigError):
        parse_config("energy_joules = 1.0\n")
    with pytest.raises(ConfigError):
        parse_config("l0_meters = 1.0\n")


def test_parse_config_unknown_key_reports_line():
    with pytest.raises(ConfigError) as err:
        parse_config("g = 1.0\nwavelength = 3\n")
    assert "line 2" in str(err.value)
    assert "wavelength" in str(err.value)


def test_parse_config_duplicate_key_rejected():
    with pytest.raises(ConfigError) as err:
        parse_config("g = 1.0\ng = 2.0\n")
    assert "line 2" in str(err.value)


def test_parse_config_bad_number_reports_key():
    with pytest.raises(ConfigError) as err:
        parse_config("rel_tol = tight\n")
    assert "rel_tol" in str(err.value)


def test_parse_config_validation_errors():
    with pytest.raises(ConfigError):
        parse_config("g = 1.0\nt_start = 2.0\nt_end = 1.0\n")
    with pytest.raises(ConfigError):
        parse_config("g = 1.0\ngrid.xmin = 3.0\n")
    with pytest.raises(ConfigError):
        parse_config("g = 1.0\nthreads = 0\n")
    with pytest.raises(ConfigError):
        parse_config("g = 1.0\nseed = -1\n")


def test_run_config_helpers():
    cfg = RunConfig(g=2.0)
    assert cfg.coupling() == 2.0
    push = cfg.push_config(cfg.coupling())
    assert push.g == 2.0 and push.t_end == 1.5
    spec = cfg.grid_spec()
    assert spec.radial_nodes == 96
    (x0, x1), _, _ = cfg.grid_bounds()
    assert (x0, x1) == (-2.0, 2.0)


def test_fields_sample_at_point(capsys):
    rc = main(["fields", "sample", "--at", "0,0,0", "--T", "0"])
    assert rc == 0
    out = capsys.readouterr().out
    lines = out.strip().splitlines()
    header = lines[-2].split(",")
    row = lines[-1].split(",")
    vals = dict(zip(header, (float(v) for v in row)))
    assert vals["Ex"] == 4.0
    assert vals["Bz"] == -4.0
    assert vals["U"] == pytest.approx(16.0 / math.pi ** 2, rel=1e-8)


def test_fields_sample_grid_export(tmp_path):
    cfg = write_config(tmp_path, "g = 1.0\n"
                                 "grid.nx = 5\ngrid.ny = 4\ngrid.nz = 3\n")
    rc = main(["fields", "sample", "--config", cfg,
               "--out-dir", str(tmp_path), "--T", "1.5"])
    assert rc == 0
    text = (tmp_path / "fields.csv").read_text()
    lines = text.splitlines()
    assert lines[0].startswith("# hopfknot ")
    assert lines[1].startswith("# config:")
    assert lines[2] == "X,Y,Z,U,Bx,By,Bz,Ex,Ey,Ez"
    data = np.loadtxt(str(tmp_path / "fields.csv"), delimiter=",",
                      skiprows=3)
    assert data.shape == (60, 10)
    # z fastest
    assert data[0, 2] == -2.0 and data[1, 2] == 0.0 and data[2, 2] == 2.0


def test_energy_report_outputs(tmp_path):
    cfg = write_config(tmp_path, "g = 1.0\n" + FAST_QUAD)
    rc = main(["energy", "report", "--config", cfg,
               "--out-dir", str(tmp_path), "--T", "0"])
    assert rc == 0
    payload = json.loads((tmp_path / "energy_report.json").read_text())
    assert payload["total_energy"] == pytest.approx(2.0, abs=1e-6)
    assert payload["fraction_within_unit_ball"] == pytest.approx(
        0.5 + 2.0 / (3.0 * math.pi), abs=1e-4)
    assert "time=0" in payload["meta"]["config"]
    csv_lines = (tmp_path / "energy_report.csv").read_text().splitlines()
    assert csv_lines[2].split(",")[0] == "time"
    assert len(csv_lines) == 4


def test_trajectories_run_preset(tmp_path):
    rc = main(["trajectories", "run", "--preset", "g1",
               "--out-dir", str(tmp_path)])
    assert rc == 0
    payload = json.loads((tmp_path / "ensemble.json").read_text())
    assert payload["g"] == 1.0
    assert payload["failures"] == []
    assert len(payload["final_states"]) == 60
    assert payload["v_min"] == pytest.approx(0.5167, abs=2e-4)
    assert payload["v_max"] == pytest.approx(0.8456, abs=2e-4)
    speeds = [s["speed"] for s in payload["final_states"]]
    assert min(speeds) == payload["v_min"]
    assert max(speeds) == payload["v_max"]
    csv_lines = (tmp_path / "trajectories.csv").read_text().splitlines()
    assert csv_lines[2].lstrip("# ") == \
        "particle_id,T,X,Y,Z,VX,VY,VZ,speed"
    first = csv_lines[3].split(",")
    assert first[0] == "0"
    assert float(first[1]) == 0.0


def test_trajectories_run_explicit_g(tmp_path):
    cfg = write_config(tmp_path, "g = 0.0\noutput_stride = 0.5\n")
    rc = main(["trajectories", "run", "--config", cfg,
               "--out-dir", str(tmp_path)])
    assert rc == 0
    payload = json.loads((tmp_path / "ensemble.json").read_text())
    # with the coupling off nobody moves
    assert payload["v_min"] == 0.0
    assert payload["v_max"] == 0.0


def test_lines_trace_default_set(tmp_path):
    rc = main(["lines", "trace", "--out-dir", str(tmp_path)])
    assert rc == 0
    payload = json.loads((tmp_path / "linking.json").read_text())
    assert len(payload["lines"]) == 3
    for summary in payload["lines"]:
        assert summary["closed"] is True
        assert summary["closure_gap"] < 1e-3
    assert len(payload["linking"]) == 3
    for pair in payload["linking"]:
        assert abs(pair["rounded"]) == 1
        assert abs(pair["raw"] - pair["rounded"]) < 1e-4
    csv_lines = (tmp_path / "lines.csv").read_text().splitlines()
    assert csv_lines[2].lstrip("# ") == "line_id,idx,X,Y,Z"
    assert len(csv_lines) == 3 + 3 * 2000


def test_lines_trace_explicit_lines(tmp_path):
    rc = main(["lines", "trace", "--out-dir", str(tmp_path),
               "--line", "magnetic:0.4,0,0", "--line", "magnetic:0.7,0,0"])
    assert rc == 0
    payload = json.loads((tmp_path / "linking.json").read_text())
    assert len(payload["lines"]) == 2
    assert len(payload["linking"]) == 1
    assert abs(payload["linking"][0]["rounded"]) == 1


def test_verify_all_passes(tmp_path, capsys):
    cfg = write_config(tmp_path, "g = 1.0\n" + FAST_QUAD)
    rc = main(["verify", "all", "--config", cfg, "--out-dir", str(tmp_path),
               "--seed", "42"])
    assert rc == 0
    out = capsys.readouterr().out
    assert out.count("PASS") == 5
    assert "FAIL" not in out
    payload = json.loads((tmp_path / "verification.json").read_text())
    checks = payload["checks"]
    assert [c["check_name"] for c in checks] == [
        "null_field", "maxwell_residuals", "representations",
        "energy_conservation", "momentum_conservation"]
    assert all(c["passed"] for c in checks)


def test_verify_bytes_ignore_thread_count(tmp_path, capsys):
    cfg = write_config(tmp_path, "g = 1.0\n" + FAST_QUAD)
    d1 = tmp_path / "a"
    d2 = tmp_path / "b"
    assert main(["verify", "all", "--config", cfg, "--seed", "42",
                 "--threads", "1", "--out-dir", str(d1)]) == 0
    assert main(["verify", "all", "--config", cfg, "--seed", "42",
                 "--threads", "4", "--out-dir", str(d2)]) == 0
    capsys.readouterr()
    a = (d1 / "verification.json").read_bytes()
    b = (d2 / "verification.json").read_bytes()
    assert a == b


def test_out_dir_env_var(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("HOPFKNOT_OUTDIR", str(tmp_path))
    cfg = write_config(tmp_path, "g = 1.0\n" + FAST_QUAD)
    assert main(["verify", "all", "--config", cfg]) == 0
    capsys.readouterr()
    assert (tmp_path / "verification.json").exists()


def test_flag_overrides_config(tmp_path):
    cfg = write_config(tmp_path, "g = 1.0\nseed = 7\n" + FAST_QUAD)
    d1 = tmp_path / "a"
    rc = main(["verify", "all", "--config", cfg, "--seed", "9",
               "--out-dir", str(d1)])
    assert rc == 0
    payload = json.loads((d1 / "verification.json").read_text())
    assert "seed=9" in payload["meta"]["config"]


def test_config_error_exit_code(tmp_path, capsys):
    cfg = write_config(tmp_path, "g = 1.0\nunknown_knob = 2\n")
    rc = main(["verify", "all", "--config", cfg])
    assert rc == 2
    err = capsys.readouterr().err
    assert err.startswith("hopfknot: config error:")
    assert "line 2" in err


def test_missing_config_file_exit_code(tmp_path, capsys):
    rc = main(["verify", "all", "--config", str(tmp_path / "nope.cfg")])
    assert rc == 2
    assert "hopfknot: error" in capsys.readouterr().err


def test_bad_at_argument(tmp_path, capsys):
    rc = main(["fields", "sample", "--at", "1,2"])
    assert rc == 2
