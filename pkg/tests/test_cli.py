import json
import subprocess
import sys

import pytest

from bargmann.cli import main
from bargmann.reports import ConfigError, RunConfig, dumps, read_config_file, resolve_config


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_classify_exit_codes(capsys):
    code, out, _ = run(["classify", "poly:1,0,1"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["schema"] == 1 and doc["command"] == "classify"
    code, _, err = run(["classify", "poly:1,,2"], capsys)
    assert code == 1 and "^" in err


def test_classify_boundary_unknown(capsys):
    # exactly on the membership boundary the asymptotic verdict cannot decide
    code, out, _ = run(["classify", "sum:(exp:0.5,0,0)+(exp:-0.5,0,0)"], capsys)
    rep = json.loads(out)["report"]
    assert code == 2 and rep["fock_verdict"] == "BoundaryUnknown"
    # a single Gaussian on the boundary is settled in closed form
    code, out, _ = run(["classify", "exp:0.5,0,0"], capsys)
    assert code == 0 and json.loads(out)["report"]["fock_verdict"] == "NotInF"


def test_verify_pass_fail_and_empty_window(capsys):
    code, out, _ = run(["verify", "thm4a", "poly:0,0,1", "--N", "32"], capsys)
    assert code == 0 and json.loads(out)["pass"] is True
    code, out, _ = run(["verify", "thm4a", "--A", "annihilation", "--N", "32"], capsys)
    assert code == 1 and json.loads(out)["pass"] is False
    code, _, err = run(["verify", "remark5", "exp:0.2,0,0", "--N", "8"], capsys)
    assert code == 3 and err
    code, _, _ = run(["verify", "commute", "--A", "creation"], capsys)
    assert code == 1


def test_verify_q_p_default_tol(capsys):
    code, out, _ = run(["verify", "remark5", "poly:0,0,1"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["tol"] == 1e-12 and len(doc["reports"]) == 2


def test_counterexample_and_matrix(capsys, tmp_path):
    code, out, _ = run(["counterexample", "shifted", "--k", "1", "--j", "2", "--M", "20000"], capsys)
    assert code == 0 and json.loads(out)["observed"] == ["Diverges"]
    code, out, _ = run(["counterexample", "borderline", "--format", "csv"], capsys)
    assert code == 0 and out.startswith("# ||f||^2\nx,partial\n")
    dest = tmp_path / "sub" / "a.csv"
    code, out, _ = run(["matrix", "creation", "--N", "3", "--format", "csv", "--out", str(dest)], capsys)
    assert code == 0 and out == ""
    assert dest.read_text().splitlines()[0] == "row,col,re,im"
    assert not [p for p in dest.parent.iterdir() if p.name.endswith(".tmp")]


def test_csv_rejected_for_json_only(capsys):
    code, _, err = run(["classify", "poly:1", "--format", "csv"], capsys)
    assert code == 1 and "JSON" in err


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# weight\nr = 2.0\nN = 16\ngrid = 0, 0.5i\n")
    assert read_config_file(cfg) == {"r": 2.0, "N": 16, "grid": (0j, 0.5j)}
    code, out, _ = run(["matrix", "creation", "--config", str(cfg), "--N", "4"], capsys)
    conf = json.loads(out)["config"]
    assert code == 0 and conf["r"] == 2.0 and conf["N"] == 4
    bad = tmp_path / "bad.cfg"
    bad.write_text("r = 1\nfoo = 3\n")
    with pytest.raises(ConfigError, match="unknown key"):
        read_config_file(bad)
    code, _, err = run(["matrix", "creation", "--config", str(bad)], capsys)
    assert code == 1 and "foo" in err


def test_run_config_validation():
    with pytest.raises(ConfigError):
        RunConfig(r=-1.0)
    with pytest.raises(ConfigError):
        RunConfig(format="xml")
    with pytest.raises(ConfigError):
        resolve_config({"bogus": 1})
    assert resolve_config({"N": 8}, {"N": None}).N == 8


def test_dumps_formatting():
    text = dumps({"a": 1.0, "b": 0.1, "c": float("inf"), "d": 1 + 2j, "e": [1, 2], "f": True})
    doc = json.loads(text)
    assert doc == {"a": 1.0, "b": 0.1, "c": "inf", "d": {"re": 1.0, "im": 2.0}, "e": [1, 2], "f": True}
    assert '"a": 1.0' in text and '"b": 0.10000000000000001' in text


def test_cli_bytes_identical(tmp_path):
    argv = [sys.executable, "-m", "bargmann.cli", "verify", "thm4d", "exp:0.2,0,0", "--N-seq", "16,32,64"]
    a = subprocess.run(argv, capture_output=True, check=True).stdout
    b = subprocess.run(argv, capture_output=True, check=True).stdout
    assert a == b and a.endswith(b"\n")
