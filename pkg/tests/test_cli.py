import json
import subprocess
import sys

import pytest

from johnforge.cli import main


def run(args, cwd):
    return subprocess.run([sys.executable, "-m", "johnforge.cli", *args], cwd=cwd,
                          capture_output=True, text=True)


def test_whitney_writes_json_and_svg(tmp_path):
    rc = main(["whitney", "--shape", "disk:0.5", "--level", "7",
               "--out", str(tmp_path / "w.json"), "--svg", str(tmp_path / "w.svg")])
    assert rc == 0
    doc = json.loads((tmp_path / "w.json").read_text())
    assert doc["schema"] == "johnforge/1" and doc["kind"] == "whitney"
    assert (tmp_path / "w.svg").read_text().startswith("<?xml")


def test_simplify_bound_violation_and_round_trip(tmp_path, capsys):
    w, s, v = (str(tmp_path / n) for n in ("w.json", "s.json", "v.json"))
    assert main(["whitney", "--shape", "disks:2", "--level", "7", "--out", w]) == 0
    assert main(["simplify", "--in", w, "--A", "8", "--delta", "0.2", "--out", s]) == 1
    err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert err["error"] == "ParameterError" and "bound" in err["message"]
    assert main(["simplify", "--in", w, "--A", "8", "--delta", "0.1", "--out", s]) == 0
    assert main(["verify", "--in", s, "--samples", "8", "--out", v]) == 0
    assert json.loads(open(v).read())["report"]["ok"] is True


def test_capacity_segment(tmp_path):
    out = tmp_path / "c.json"
    assert main(["capacity", "--shape", "segment:4", "--method", "energy", "--points", "512",
                 "--out", str(out)]) == 0
    assert json.loads(out.read_text())["estimate"]["value"] == pytest.approx(1.0, rel=0.02)


def test_usage_errors_exit_2(tmp_path):
    assert run(["capacity"], tmp_path).returncode == 2
    assert run(["nonsense"], tmp_path).returncode == 2
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"shape": "disk:0.5", "bogus": 1}))
    assert run(["capacity", "--config", str(cfg)], tmp_path).returncode == 2


def test_config_supplies_defaults(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"shape": "disk:0.3", "level": 6, "method": "fekete"}))
    out = tmp_path / "c.json"
    assert main(["capacity", "--config", str(cfg), "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["config"]["method"] == "fekete" and doc["config"]["level"] == 6


def test_computation_error_exit_1(tmp_path):
    r = run(["witness", "--shape", "segment:1", "--level", "7"], tmp_path)
    assert r.returncode == 1
    assert json.loads(r.stderr.strip().splitlines()[-1])["error"] == "WitnessInapplicableError"


def test_missing_input_file_exit_1(tmp_path):
    r = run(["verify", "--in", str(tmp_path / "absent.json")], tmp_path)
    assert r.returncode == 1


def test_same_seed_same_bytes(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        assert main(["john-estimate", "--shape", "cantor:0.25:3", "--level", "7", "--samples", "8",
                     "--seed", "5", "--out", str(p)]) == 0
    assert a.read_bytes() == b.read_bytes()
