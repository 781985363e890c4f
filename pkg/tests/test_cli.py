import io
import json
import subprocess
import sys

import jsonschema
import numpy as np
import pytest

from tomometrics.cli import main
from tomometrics.monotonicity import report_schema


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def csv_array(text):
    return np.loadtxt(io.StringIO(text), delimiter=",", skiprows=1, ndmin=2)


def test_tomogram_mixed():
    code, text = run("tomogram", "--bloch", "0,0,0")
    assert code == 0
    assert np.allclose(json.loads(text)["probs"], 0.5)


def test_tomogram_u_w_frame():
    code, text = run("tomogram", "--bloch", "0,0,0.6")
    data = json.loads(text)
    assert code == 0 and data["frames"][2]["label"] == "u_w"
    assert np.allclose(data["probs"][2], [0.8, 0.2])


def test_tomogram_with_scheme():
    _, text = run("tomogram", "--bloch", "0,0,0.5", "--scheme", "exp:2")
    t = np.tanh(0.5)
    assert np.allclose(json.loads(text)["probs"][2], [(1 - t) / 2, (1 + t) / 2], atol=1e-15)


def test_tomogram_usage_errors():
    assert run("tomogram", "--bloch", "1,1,1")[0] == 1
    assert run("tomogram", "--bloch", "0,0")[0] == 1
    assert run("tomogram", "--bloch", "0,0,0", "--scheme", "exp:0")[0] == 1
    assert run("tomogram")[0] == 1
    assert run("no-such-command")[0] == 1


def test_metric_grid():
    code, text = run("metric", "--f", "vn", "--grid", "5")
    data = csv_array(text)
    assert code == 0 and data.shape == (5, 3)
    assert text.splitlines()[0] == "w,g_w,g_perp"
    assert np.allclose(data[:, 1], 1 / (1 - data[:, 0] ** 2), rtol=1e-15)


def test_metric_tsallis_forms_agree():
    _, a = run("metric", "--f", "tsallis:0.5", "--grid", "101")
    _, b = run("metric", "--f", "petz-tsallis:0.5", "--grid", "101")
    assert np.max(np.abs(csv_array(a) - csv_array(b))) < 1e-10


def test_metric_full_precision():
    _, text = run("metric", "--f", "vn", "--grid", "3")
    value = text.splitlines()[1].split(",")[2]
    assert len(value.replace("-", "").replace(".", "").lstrip("0")) >= 16


def test_metric_pullback():
    _, text = run("metric", "--f", "vn", "--pullback", "exp:1", "--grid", "21")
    data = csv_array(text)
    w, conformal, h = data[:, 0], data[:, 3], data[:, 4]
    with np.errstate(invalid="ignore"):
        want = np.where(w == 0, 1.0, w * (1 - w) / np.sinh(w))
    assert np.allclose(h, want, atol=1e-12)
    assert np.allclose(conformal, (1 - w * w) / (4 * np.cosh(w / 2) ** 2), rtol=1e-13)


def test_metric_bad_spec():
    assert run("metric", "--f", "tsallis:2")[0] == 1
    assert run("metric", "--f", "bogus")[0] == 1
    assert run("metric", "--f", "vn", "--grid", "1")[0] == 1


def test_monotone_exit_codes(tmp_path):
    path = tmp_path / "r.json"
    assert run("monotone", "--f", "vn", "--test", "loewner", "-o", str(path))[0] == 0
    jsonschema.validate(json.loads(path.read_text()), report_schema())
    code, text = run("monotone", "--f", "exp-scheme:2", "--test", "loewner",
                     "--region=-1.2,-0.8,0,0.2")
    rep = json.loads(text)
    assert code == 2 and rep["verdict"] == "violation"
    assert abs(complex(*rep["witnesses"][0]["z"]) + 1) < 0.1
    code, text = run("monotone", "--f", "square-control", "--test", "matrix",
                     "--samples", "1000", "--seed", "7")
    assert code == 2 and json.loads(text)["seed"] == 7
    code, _ = run("monotone", "--f", "exp-scheme:2", "--test", "loewner",
                  "--region", "0.5,1.5,0,0.3", "--resolution", "40,20")
    assert code == 3
    assert run("monotone", "--f", "nope", "--test", "matrix")[0] == 1


def test_monotone_cptp_uses_env_seed(monkeypatch):
    monkeypatch.setenv("QIG_SEED", "5")
    code, text = run("monotone", "--f", "vn", "--test", "cptp", "--samples", "500")
    assert code == 0 and json.loads(text)["seed"] == 5
    monkeypatch.setenv("QIG_SEED", "x")
    assert run("monotone", "--f", "vn", "--test", "cptp")[0] == 1


def test_scheme_ode_closed_case(tmp_path):
    ver = tmp_path / "v.json"
    code, text = run("scheme-ode", "--f", "power:0.5", "--h", "power:0", "--w0", "0.05",
                     "--wt0", "-0.05", "--branch", "-1", "--verification", str(ver))
    data = csv_array(text)
    assert code == 0
    assert np.max(np.abs(data[:, 1] + data[:, 0])) < 1e-8
    assert json.loads(ver.read_text())["residual_max"] < 1e-8


def test_scheme_ode_identity_and_auto_seed(tmp_path):
    code, text = run("scheme-ode", "--f", "vn", "--h", "vn", "--w0", "0.1", "--wt0", "0.1",
                     "--branch", "+1", "--verification", str(tmp_path / "a.json"))
    data = csv_array(text)
    assert code == 0 and np.max(np.abs(data[:, 1] - data[:, 0])) < 1e-9
    code, text = run("scheme-ode", "--f", "vn", "--h", "exp-scheme:2", "--w0", "0.1", "--wt0", "auto",
                     "--branch", "-1", "--span", "0.1,0.9", "--verification", str(tmp_path / "b.json"))
    data = csv_array(text)
    assert code == 0 and np.max(np.abs(data[:, 1] + np.tanh(data[:, 0]))) < 1e-7


def test_scheme_ode_failure_keeps_partial_grid(tmp_path):
    path = tmp_path / "p.csv"
    code, _ = run("scheme-ode", "--f", "power:0.3", "--h", "power:0.1", "--w0", "0.2",
                  "--wt0", "-0.2", "--branch", "-1", "-o", str(path))
    assert code == 4
    assert len(path.read_text().splitlines()) > 100


def test_verify_all_only():
    code, text = run("verify-all", "--only", "petz-consistency")
    lines = text.strip().splitlines()
    assert code == 0 and lines[0].startswith("PASS  2 petz-consistency")
    assert lines[-1].startswith("1/1")
    assert run("verify-all", "--only", "nope")[0] == 1


def test_verify_all_seed_independence_of_deterministic_criteria():
    picks = ["2", "3", "13"]
    a = run("verify-all", "--seed", "42", *sum((["--only", p] for p in picks), []))[1]
    b = run("verify-all", "--seed", "43", *sum((["--only", p] for p in picks), []))[1]
    strip = [line.split("(")[0] for line in a.splitlines()[:-1]]
    assert strip == [line.split("(")[0] for line in b.splitlines()[:-1]]


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "tomometrics.cli", "metric", "--f", "vn", "--grid", "2"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.count("\n") == 3


def test_nonpositive_tolerance_is_a_usage_error():
    assert run("monotone", "--f", "vn", "--test", "matrix", "--tol", "0")[0] == 1
