import json
import os
import subprocess
import sys

import numpy as np
import pytest

from qxform.cli import ConfigError, JobConfig, main

TM_BAD_F = {
    "command": "transform",
    "action": "tm-to-to",
    "system": {"class": "TM", "coeffs": {"f": {"kind": "poly", "coeffs": [1.0, -2.0]},
                                          "f2": {"kind": "constant", "value": 0.5}}},
    "time_grid": {"t0": 0.0, "t1": 1.0, "n": 200},
}

OSC = {
    "command": "propagate",
    "system": {"class": "TO", "coeffs": {"g2": {"kind": "constant", "value": 0.5}}},
    "space": {"x_min": -10.0, "x_max": 10.0, "n": 256},
    "time_grid": {"t0": 0.0, "t1": 0.5},
    "initial_state": {"x0": 1.0},
    "steps": 100,
    "save_every": 10,
}


def _run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def _write(tmp_path, d, name="job.json"):
    p = tmp_path / name
    p.write_text(json.dumps(d))
    return str(p)


def test_config_round_trip():
    cfg = JobConfig.from_dict(OSC)
    assert JobConfig.from_json(cfg.to_json()) == cfg
    assert cfg.to_dict() == OSC


def test_config_rejects_unknown_key():
    with pytest.raises(ConfigError, match="Additional properties"):
        JobConfig.from_dict({**OSC, "stepz": 3})


def test_config_rejects_bad_action():
    with pytest.raises(ValueError):
        JobConfig(command="verify", action="everything")


def test_unknown_key_exit_2(tmp_path, capsys):
    code, _, err = _run(capsys, "propagate", "--config", _write(tmp_path, {**OSC, "bogus": 1}))
    assert code == 2
    assert json.loads(err)["exit"] == 2


def test_bad_flag_exit_2(capsys):
    assert _run(capsys, "verify", "nothing")[0] == 2


def test_noninvertible_map_exit_3(tmp_path, capsys):
    code, _, err = _run(capsys, "transform", "tm-to-to", "--config", _write(tmp_path, TM_BAD_F))
    assert code == 3
    msg = json.loads(err)
    assert "time map not invertible" in msg["message"] and msg["exit"] == 3


def test_example_report(capsys):
    code, out, _ = _run(capsys, "example", "ex1", "--upsilon", "-0.5", "--grid-n", "500")
    assert code == 0
    rep = json.loads(out)
    assert rep["params"]["upsilon"] == -0.5
    assert rep["map"]["t_prime_domain"]["hi"] == pytest.approx(2.0)
    assert max(rep["pipeline_deviation"].values()) < 1e-7


def test_example2_report(capsys):
    code, out, _ = _run(capsys, "example", "ex2", "--a", "1", "--b", "0.5", "--grid-n", "2000")
    assert code == 0
    assert max(json.loads(out)["pipeline_deviation"].values()) < 1e-7


def test_verify_roundtrip_flags_printed_formula(capsys):
    code, out, _ = _run(capsys, "verify", "roundtrip")
    assert code == 0
    s = json.loads(out)["summary"]
    assert s["max_deviation"] < 1e-8
    assert s["printed_g_deviation"] > 1e-3 and s["derived_g_deviation"] < 1e-8


def test_verify_failure_exit_3(capsys):
    code, _, err = _run(capsys, "verify", "degeneracy", "--tol", "1e-30")
    assert code == 3
    assert json.loads(err)["error"] == "VerificationFailed"


def test_report_written_deterministically(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        assert _run(capsys, "verify", "algebra", "--seed", "7", "--out", str(p))[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_propagate_exports(tmp_path, capsys):
    out = tmp_path / "traj.csv"
    code, stdout, _ = _run(capsys, "propagate", "--config", _write(tmp_path, OSC), "--out", str(out), "--dump-amps")
    assert code == 0
    rep = json.loads(stdout)
    lines = out.read_text().splitlines()
    assert lines[0] == "t,norm,mean_x,mean_p,dx,dp" and len(lines) == 12
    amps = np.fromfile(rep["amps"]["path"], dtype="<c8")
    assert amps.size == 11 * 256
    assert rep["norm_drift"] < 1e-10


def test_quiet_logging_subprocess(tmp_path):
    env = {**os.environ, "QXFORM_LOG": "quiet"}
    r = subprocess.run([sys.executable, "-m", "qxform", "verify", "algebra"], capture_output=True, text=True, env=env)
    assert r.returncode == 0 and r.stderr == ""
    env["QXFORM_LOG"] = "debug"
    r = subprocess.run([sys.executable, "-m", "qxform", "transform", "tm-to-to", "--config",
                        _write(tmp_path, TM_BAD_F)], capture_output=True, text=True, env=env)
    assert r.returncode == 3
    assert json.loads(r.stderr.strip().splitlines()[-1])["exit"] == 3
