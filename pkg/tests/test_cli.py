import csv
import io
import json

import pytest

from cwsaddle import __version__
from cwsaddle.cli import main


def _run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_verify_all_pass(capsys):
    code, out, _ = _run(capsys, "verify", "--set", "verify_samples=200")
    doc = json.loads(out)
    assert code == 0 and doc["result"]["passed"]
    assert doc["version"] == __version__ and doc["config"]["verify_samples"] == 200
    for c in doc["result"]["checks"]:
        assert {"name", "passed", "residual", "tolerance"} <= set(c)


def test_verify_tampered_m3_fails(capsys):
    code, out, _ = _run(capsys, "verify", "--modules", "plmap", "--set", "m3=0.5,0,-1,2")
    assert code == 1
    checks = json.loads(out)["result"]["checks"]
    assert not next(c for c in checks if c["name"] == "m3_derivation")["passed"]


def test_verify_unknown_module(capsys):
    code, _, err = _run(capsys, "verify", "--modules", "nope")
    assert code == 2 and "unknown module" in err


def test_usage_errors(capsys):
    assert _run(capsys, "frobnicate")[0] == 2
    assert _run(capsys, "rho", "--point", "1")[0] == 2
    assert _run(capsys, "rho", "--point", "1,1", "--set", "bogus=1")[0] == 2


def test_io_errors(tmp_path, capsys):
    code, _, err = _run(capsys, "rho", "--point", "0.5,0.25", "--out", str(tmp_path / "no" / "x.json"))
    assert code == 3 and "x.json" in err
    assert _run(capsys, "rho", "--point", "0,0", "--config", str(tmp_path / "missing.cfg"))[0] == 3


def test_config_file_then_flags(tmp_path, capsys):
    p = tmp_path / "run.cfg"
    p.write_text("seed = 5\neta = 0.02\n")
    _, out, _ = _run(capsys, "rho", "--point", "0.5,0.25", "--config", str(p), "--seed", "11")
    cfg = json.loads(out)["config"]
    assert cfg["seed"] == 11 and cfg["eta"] == 0.02


def test_rho(capsys):
    _, out, _ = _run(capsys, "rho", "--point", "0.5,0.25")
    res = json.loads(out)["result"]
    assert res["rho"] == 0.0 and res["in_e"]


def test_orbit_csv(capsys):
    code, out, _ = _run(capsys, "orbit", "--point", "0.75,0.375", "--n", "6")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 7
    for n, r in enumerate(rows):
        assert float(r["x"]) == 0.75 / 2 ** n
        assert float(r["y"]) == pytest.approx(0.375 / 2 ** n, abs=1e-9)
    _, out, _ = _run(capsys, "orbit", "--point", "0.3,0.1", "--n", "0")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 1 and (float(rows[0]["x"]), float(rows[0]["y"])) == (0.3, 0.1)


def test_other_orbits(capsys):
    code, out, _ = _run(capsys, "da-orbit", "--point", "0.3,0.6", "--n", "3", "--format", "json")
    assert code == 0 and len(json.loads(out)["result"]["rows"]) == 4
    code, out, _ = _run(capsys, "da-orbit", "--point", "0.3,0.6", "--n", "3", "--anomalous")
    assert code == 0 and len(out.splitlines()) == 5
    code, out, _ = _run(capsys, "surface-orbit", "--point", "2,0", "--chart", "--n", "2")
    assert code == 0 and len(out.splitlines()) == 4


def test_verdict_grid(capsys):
    code, out, _ = _run(capsys, "verdict-grid", "--resolution", "10")
    assert code == 0 and json.loads(out)["result"]


def test_track_falsify_gamma(capsys):
    code, out, _ = _run(capsys, "track", "--start", "0,1", "--end", "0,1.6",
                        "--set", "n_back=5", "--set", "n_fwd=5")
    rep = json.loads(out)["result"]
    assert code == 0 and rep
    code, out, _ = _run(capsys, "falsify", "--set", "trials=12", "--set", "n_back=10", "--set", "n_fwd=10")
    res = json.loads(out)["result"]
    assert code == 0 and res["candidate_count"] == len(res["candidates"])
    code, out, _ = _run(capsys, "gamma", "--center", "0,1", "--frame", "chart", "--set", "horizon=10",
                        "--set", "grid_resolution=20")
    assert code == 0 and json.loads(out)["result"]["report"]["survivor_count"] >= 1


def test_render_to_file(tmp_path, capsys):
    out = tmp_path / "e.svg"
    assert _run(capsys, "render", "--figure", "E", "--out", str(out))[0] == 0
    assert out.read_text().count('class="segment"') == 96
    code, svg, _ = _run(capsys, "render", "--figure", "orbit", "--point", "0.9,0.2", "--n", "20")
    assert code == 0 and svg.count('class="marker"') == 21


def test_byte_identical_reports(tmp_path, capsys):
    for k in (1, 2):
        assert main(["falsify", "--set", "trials=6", "--set", "n_back=5", "--set", "n_fwd=5",
                     "--seed", "3", "--out", str(tmp_path / f"f{k}.json")]) == 0
    assert (tmp_path / "f1.json").read_bytes() == (tmp_path / "f2.json").read_bytes()


def test_version(capsys):
    assert _run(capsys, "--version")[0] == 0
