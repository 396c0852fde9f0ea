import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from huxdelta.cli import main


def _run(tmp_path, *argv):
    out = tmp_path / "out"
    code = main([*argv, "--out", str(out)])
    return code, out


def _manifest(out):
    return json.loads((out / "manifest.json").read_text())


def test_validate_ok_and_violation(tmp_path, capsys):
    code, out = _run(tmp_path, "validate", "--Z", "2")
    assert code == 0
    assert json.loads((out / "regime.json").read_text()) == {"regime": "NegativeB", "w_lower": 1.0, "w_upper": 5.0}
    code, out = _run(tmp_path, "validate", "--w", "-6")
    assert code == 1
    assert "-w >= 5" in capsys.readouterr().err
    assert _manifest(out)["status"] == 1


def test_validate_params_file_and_huxley(tmp_path):
    pf = tmp_path / "p.json"
    pf.write_text(json.dumps({"beta1": 1.0, "gamma1": 0.2}))
    code, out = _run(tmp_path, "validate", "--params", str(pf))
    assert code == 0
    assert _manifest(out)["params"] == {"a": 1.2, "b": -1.0, "p": 2.0, "w": -0.2, "Z": 0.0}


def test_profile_artifacts(tmp_path):
    code, out = _run(tmp_path, "profile", "--Z", "2", "--points", "601")
    assert code == 0
    raw = (out / "profile.csv").read_bytes()
    assert b"\r" not in raw and raw.startswith(b"x,phi,phi_prime\n")
    rows = list(csv.reader(raw.decode().splitlines()))[1:]
    assert len(rows) == 601
    side = json.loads((out / "profile.json").read_text())
    assert set(side) == {"s", "peak", "kappa"} and side["kappa"] == 2.0
    assert side["s"] == pytest.approx(-0.2027818061, abs=1e-9)
    # reals round-trip exactly
    assert all(repr(float(c)) == c for c in rows[0])


def test_spectrum_command(tmp_path):
    code, out = _run(tmp_path, "spectrum", "--Z", "-2", "--vectors")
    assert code == 0
    rep = json.loads((out / "spectrum.json").read_text())
    assert rep["neg_count"] == 2 and len(rep["eigenvalues"]) == 2
    header = (out / "eigenvectors.csv").read_text().splitlines()[0]
    assert header == "x,v1,v2"
    man = _manifest(out)
    assert man["grid"] == {"L": 20.0, "N": 4000, "h": 0.01}
    assert {"zero_band", "essential_margin", "bisection"} <= set(man["tolerances"])


def test_scan_pi2_command(tmp_path):
    code, out = _run(tmp_path, "scan-pi2")
    assert code == 0
    beta = json.loads((out / "beta.json").read_text())
    assert beta["rel_err"] <= 0.02 and beta["beta_numeric"] > 0
    lines = (out / "pi2.csv").read_text().splitlines()
    assert lines[0] == "Z,pi2,neg_count" and len(lines) == 8


def test_reproduce_figure1(tmp_path):
    code, out = _run(tmp_path, "reproduce-figure1")
    assert code == 0
    for tag in ("-2", "+0", "+2"):
        data = np.loadtxt(out / f"figure1_Z{tag}.csv", delimiter=",", skiprows=1)
        assert np.all(data[:, 1] > 0) and np.array_equal(data[:, 1], data[::-1, 1])


def test_reproduce_theorem1(tmp_path):
    code, out = _run(tmp_path, "reproduce-theorem1", "--N", "2000")
    assert code == 0
    rows = list(csv.DictReader((out / "theorem1.csv").read_text().splitlines()))
    assert len(rows) == 18 and all(r["ok"] == "1" for r in rows)


def test_evolve_command(tmp_path):
    code, out = _run(tmp_path, "evolve", "--a", "1", "--b", "1", "--p", "2", "--w", "-2", "--Z", "2",
                     "--ic", "equilibrium+eig:1:1e-4", "--Tmax", "4")
    assert code == 0
    summ = json.loads((out / "evolve.json").read_text())
    assert summ["growth_rate"] == pytest.approx(summ["spectral_rate"], rel=0.05)
    assert (out / "trace.csv").read_text().splitlines()[0] == "t,l2,h1z,S,R"


def test_blowup_command(tmp_path):
    code, out = _run(tmp_path, "blowup", "--a", "1", "--b", "1", "--p", "2", "--w", "-2", "--Z", "2")
    assert code == 0
    cert = json.loads((out / "certificate.json").read_text())
    assert {"lambda", "beta", "gamma", "R1", "Tbound", "t_detect"} <= set(cert)
    assert cert["t_detect"] <= 1.1 * cert["Tbound"]
    code, _ = _run(tmp_path, "blowup", "--Z", "2")
    assert code == 1


def test_overflow_is_a_blowup_terminal(tmp_path):
    # the explicit reaction overflows on the first step; that is a terminal state, not an error
    code, out = _run(tmp_path, "evolve", "--a", "1", "--b", "1", "--p", "2", "--w", "-2", "--Z", "1",
                     "--ic", "gaussian:1e120:1", "--Tmax", "0.01")
    assert code == 0
    assert json.loads((out / "evolve.json").read_text())["terminal"] == "blowup"


def test_determinism(tmp_path):
    a = main(["spectrum", "--Z", "1", "--N", "1000", "--vectors", "--out", str(tmp_path / "a")])
    b = main(["spectrum", "--Z", "1", "--N", "1000", "--vectors", "--out", str(tmp_path / "b")])
    assert a == b == 0
    for name in ("spectrum.json", "eigenvectors.csv", "manifest.json"):
        ta, tb = (tmp_path / "a" / name).read_text(), (tmp_path / "b" / name).read_text()
        if name == "manifest.json":
            ta, tb = json.loads(ta), json.loads(tb)
            ta.pop("argv"), tb.pop("argv")
        assert ta == tb


def test_console_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "huxdelta.cli", "validate", "--Z", "5", "--out", str(tmp_path)],
                       capture_output=True, text=True)
    assert r.returncode == 1 and "Z^2/4 >= -w" in r.stderr


def test_numerical_failure_exit_code(tmp_path, monkeypatch, capsys):
    import huxdelta.cli as cli
    from huxdelta.spectral import PivotBreakdown

    def broken(*a, **k):
        raise PivotBreakdown("zero pivot persists")

    monkeypatch.setattr(cli, "morse_index", broken)
    code, out = _run(tmp_path, "spectrum", "--Z", "1")
    assert code == 2
    assert "numerical failure" in capsys.readouterr().err
    assert _manifest(out)["status"] == 2
