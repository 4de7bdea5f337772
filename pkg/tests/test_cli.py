import json
import os

import pytest

from transmon_cqed.cli import parse_flux_range, resolve_config, run, UsageError

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
DEVICE_CFG = os.path.join(ROOT, "configs", "device.json")
INIT = os.path.join(ROOT, "configs", "init.json")
PROPOSAL = os.path.join(ROOT, "configs", "proposal.json")


def body(path):
    with open(path, encoding="utf-8") as fh:
        return "".join(ln for ln in fh if not ln.startswith("#"))


def test_params_report(tmp_path, capsys):
    out = tmp_path / "params.csv"
    assert run(["params", "--config", DEVICE_CFG, "--out", str(out)]) == 0
    text = capsys.readouterr().out
    for key in ("c_star_sq", "c_j_eff", "c_r_eff", "e_c", "g_bar",
                "extracted_c_r", "extracted_l_r", "extracted_z_r", "extracted_z_0"):
        assert key in text
    rows = {ln.split(",")[0]: float(ln.split(",")[1])
            for ln in body(out).splitlines()[1:]}
    assert rows["extracted_z_0"] == pytest.approx(645.0, rel=0.02)
    assert rows["c_star_sq"] == pytest.approx(3885e-30, rel=1e-9)


def test_header_records_provenance(tmp_path):
    out = tmp_path / "f.csv"
    assert run(["foster", "--config", DEVICE_CFG, "--out", str(out), "--modes", "3"]) == 0
    header = [ln for ln in out.read_text().splitlines() if ln.startswith("#")]
    text = "\n".join(header)
    assert "# command: foster" in text
    assert "config_sha256:" in text
    assert "CODATA 2018" in text
    assert "# c_j: 5.1e-14" in text
    assert body(out).splitlines()[0] == "harmonic,f_hz,z_ohm,c_f,l_h"
    assert len(body(out).splitlines()) == 4


def test_sweep_csv_and_summary(tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    assert run(["sweep", "--config", DEVICE_CFG, "--flux", "0.30:0.45:61",
                "--out", str(out)]) == 0
    assert "avoided crossing: center" in capsys.readouterr().out
    lines = body(out).splitlines()
    assert lines[0] == "flux,branch,frequency_hz"
    assert len(lines) == 1 + 61 * 5
    assert {ln.split(",")[1] for ln in lines[1:]} == {"lower", "upper", "ge",
                                                      "cavity", "ef"}


def test_sweep_deterministic(tmp_path):
    bodies = []
    for i in range(2):
        out = tmp_path / f"s{i}.csv"
        peaks = tmp_path / f"p{i}.csv"
        assert run(["sweep", "--config", DEVICE_CFG, "--flux", "0.30:0.45:41",
                    "--out", str(out), "--peaks-out", str(peaks),
                    "--noise", "3", "--seed", "5"]) == 0
        bodies.append((out.read_bytes(), peaks.read_bytes()))
    assert bodies[0] == bodies[1]


def test_fit_round_trip(tmp_path, capsys):
    truth = tmp_path / "truth.json"
    truth.write_text(json.dumps({"e_c_MHz": 300, "e_j_max_GHz": 46,
                                 "f_r_GHz": 6.367, "g_MHz": 455,
                                 "flux_offset": 0.12, "flux_period": 1.3}))
    peaks = tmp_path / "peaks.csv"
    assert run(["sweep", "--config", str(truth), "--flux=-0.47:0.47:61",
                "--peaks-out", str(peaks)]) == 0
    out = tmp_path / "fit.csv"
    assert run(["fit", "--config", INIT, "--peaks", str(peaks),
                "--out", str(out)]) == 0
    rows = {ln.split(",")[0]: float(ln.split(",")[1])
            for ln in body(out).splitlines()[1:]}
    assert rows["g"] == pytest.approx(455e6, rel=1e-6)
    assert rows["e_j_max"] == pytest.approx(46e9, rel=1e-6)
    assert rows["z_0"] == pytest.approx(645.0, rel=0.02)


def test_fit_not_converged_exit_code(tmp_path):
    peaks = tmp_path / "peaks.csv"
    assert run(["sweep", "--config", INIT, "--flux=-0.47:0.47:31",
                "--peaks-out", str(peaks)]) == 0
    assert run(["fit", "--config", INIT, "--set", "e_c_MHz=290",
                "--set", "max_evals=2", "--peaks", str(peaks)]) == 3


def test_design_report(tmp_path, capsys):
    out = tmp_path / "d.csv"
    assert run(["design", "--config", PROPOSAL, "--out", str(out)]) == 0
    text = capsys.readouterr().out
    assert "0.4762" in text
    assert "quoted g_bar = 0.4500" in text
    assert "outside Transmon regime" in text


def test_design_scan(tmp_path):
    out = tmp_path / "scan.csv"
    assert run(["design", "--config", PROPOSAL, "--set", "scan_c_c_fF=[9, 50, 200]",
                "--out", str(out)]) == 0
    assert len(body(out).splitlines()) == 4


def test_spectrum(tmp_path, capsys):
    out = tmp_path / "spec.csv"
    assert run(["spectrum", "--config", DEVICE_CFG, "--flux", "0.37", "--levels", "5",
                "--out", str(out)]) == 0
    lines = body(out).splitlines()
    assert lines[0] == "level,transmon,photons,frequency_hz"
    assert len(lines) == 6


def test_multimode_spectrum(capsys):
    assert run(["spectrum", "--config", DEVICE_CFG, "--tier", "exact_multimode",
                "--modes", "2", "--set", "n_ph=5", "--flux", "0.42"]) == 0


@pytest.mark.parametrize("argv", [
    ["bogus"],
    [],
    ["sweep", "--flux", "0.3:0.4"],
    ["params", "--config", "/no/such/file.json"],
    ["params", "--set", "c_j=51"],
    ["params", "--set", "c_j_nH=51"],
    ["params", "--set", "colour=blue"],
    ["fit", "--config", DEVICE_CFG],
    ["sweep", "--config", DEVICE_CFG, "--set", "tier=bogus"],
])
def test_usage_errors(argv, capsys):
    assert run(argv) == 1
    assert "usage error" in capsys.readouterr().err


def test_domain_error_names_module_and_field(capsys):
    code = run(["params", "--config", DEVICE_CFG, "--set", "c_c_fF=-9"])
    assert code == 2
    assert "[circuit_core.c_c]" in capsys.readouterr().err


def test_no_partial_file_on_error(tmp_path):
    out = tmp_path / "x.csv"
    assert run(["params", "--config", DEVICE_CFG, "--set", "l_r_nH=0",
                "--out", str(out)]) == 2
    assert not out.exists()
    assert os.listdir(tmp_path) == []


def test_unit_conversion():
    cfg = resolve_config({"c_j_fF": 51, "l_r_nH": 9.65, "g_MHz": 455,
                          "f_r_GHz": 6.367, "flux_period": 1})
    assert cfg == {"c_j": 5.1e-14, "l_r": 9.65e-9, "g": 455e6, "f_r": 6.367e9,
                   "flux_period": 1.0}


def test_flux_range():
    assert list(parse_flux_range("0:1:3")) == [0.0, 0.5, 1.0]
    with pytest.raises(UsageError):
        parse_flux_range("0:1")
