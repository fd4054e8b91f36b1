import csv
import json
import math

import pytest

from pauli_spectra.cli import main


def _cfg_file(tmp_path, name, data):
    p = tmp_path / name
    p.write_text(json.dumps(data))
    return str(p)


def _read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


SQUARE = {"kind": "square", "origin": [0.0, 0.0], "side": 1.0}
DISC = {"kind": "disc", "center": [0.0, 0.0], "radius": 1.0}
SUBEXP = {"rule": "subexp", "c": 1.0, "C": 1.0, "gamma": 0.5}


def test_nu_command(tmp_path):
    cfg = _cfg_file(tmp_path, "nu.json",
                    {"b": 2.0, "lambda_grid": [1.0, 4.0, 5.0, 13.0]})
    out = tmp_path / "nu.csv"
    assert main(["nu", "--config", cfg, "--out", str(out), "--no-figs"]) == 0
    rows = _read_csv(out)
    # zero level counts once, each higher level twice: 1, -, 3, 7 steps
    assert float(rows[0]["nu_raw"]) == pytest.approx(1.0 / math.pi)
    assert rows[1]["nu_raw"] == "nan"        # lambda = 4 is a threshold
    assert float(rows[2]["nu_raw"]) == pytest.approx(3.0 / math.pi)
    assert float(rows[3]["nu_raw"]) == pytest.approx(7.0 / math.pi)
    assert float(rows[1]["nu_lower"]) <= float(rows[1]["nu_upper"])


def test_potential_command_json(tmp_path):
    cfg = _cfg_file(tmp_path, "pot.json",
                    {"field": {"kind": "linear", "b0": 2.0, "bx": 2.0},
                     "N_r": 128, "N_theta": 128})
    out = tmp_path / "pot.json"
    code = main(["potential", "--config", cfg, "--out", str(out),
                 "--format", "json", "--no-figs"])
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["columns"] == ["theta", "h"]
    assert len(doc["rows"]) == 128
    assert doc["meta"]["kappa"] == pytest.approx(2.0, rel=1e-3)
    assert doc["meta"]["h_positive"] is True
    row = doc["rows"][0]
    assert row["h"] == pytest.approx(1.0 + 0.5 * math.cos(row["theta"]),
                                     abs=1e-3)


def test_count_command(tmp_path):
    cfg = _cfg_file(tmp_path, "count.json",
                    {"field": {"kind": "constant", "b": 2.0},
                     "domain": SQUARE, "t": 5.0, "lambda": 12.0, "n": 48})
    out = tmp_path / "count.csv"
    assert main(["count", "--config", cfg, "--out", str(out),
                 "--no-figs"]) == 0
    rows = _read_csv(out)
    assert len(rows) == 1
    assert rows[0]["N"] == "1"
    assert rows[0]["dimension"] == "4418"


def test_weyl_scan_command_with_figure(tmp_path):
    cfg = _cfg_file(tmp_path, "weyl.json",
                    {"field": {"kind": "constant", "b": 6.0},
                     "domain": SQUARE, "t_grid": [10.0, 20.0],
                     "lambda_rule": {"rule": "linear", "Lambda": 5.0},
                     "n": 128})
    out = tmp_path / "weyl.csv"
    assert main(["weyl-scan", "--config", cfg, "--out", str(out)]) == 0
    rows = _read_csv(out)
    assert [r["N"] for r in rows] == ["6", "15"]
    assert out.with_suffix(".png").exists()


def test_weyl_scan_out_of_band_exits_2(tmp_path):
    cfg = _cfg_file(tmp_path, "weyl.json",
                    {"field": {"kind": "constant", "b": 6.0},
                     "domain": SQUARE, "t_grid": [10.0],
                     "lambda_rule": {"rule": "linear", "Lambda": 5.0},
                     "n": 128, "tol": 0.0})
    out = tmp_path / "weyl.csv"
    # N/t = 0.6 sits below the density 6/(2 pi) and tol 0 leaves no slack
    assert main(["weyl-scan", "--config", cfg, "--out", str(out),
                 "--no-figs"]) == 2
    assert out.exists()                      # the table is still written


def test_azm_command_zero_field(tmp_path):
    cfg = _cfg_file(tmp_path, "azm.json",
                    {"field": {"kind": "constant", "b": 0.0},
                     "domain": DISC, "t_grid": [5.0, 10.0],
                     "lambda_rule": SUBEXP})
    out = tmp_path / "azm.csv"
    assert main(["azm", "--config", cfg, "--out", str(out),
                 "--no-figs"]) == 0
    rows = _read_csv(out)
    assert [r["dim_certified"] for r in rows] == ["0", "0"]


def test_gauge_check_command(tmp_path, capsys):
    cfg = _cfg_file(tmp_path, "gauge.json",
                    {"field": {"kind": "constant", "b": 2.0},
                     "domain": SQUARE, "t_grid": [10.0],
                     "lambda_rule": {"rule": "fixed", "eps": 1.0},
                     "n": 32, "draws": 1})
    out = tmp_path / "gauge.json"
    code = main(["gauge-check", "--config", cfg, "--out", str(out),
                 "--format", "json"])
    assert code == 0
    report = json.loads(out.read_text())
    assert report["pass"] is True
    assert report["max_rel_dev"] <= 1e-9
    assert "pass" in capsys.readouterr().out


def test_pack_command(tmp_path, capsys):
    cfg = _cfg_file(tmp_path, "pack.json",
                    {"field": {"kind": "constant", "b": 2.0},
                     "domain": DISC, "min_radius": 0.1, "grid": 128})
    out = tmp_path / "pack.csv"
    assert main(["pack", "--config", cfg, "--out", str(out)]) == 0
    rows = _read_csv(out)
    assert len(rows) == 1
    assert 0.9 < float(rows[0]["radius"]) < 1.0
    assert out.with_suffix(".png").exists()
    assert "covered flux fraction" in capsys.readouterr().out


def test_default_output_stem(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    cfg = _cfg_file(tmp_path, "nu.json", {"b": 1.0, "lambda_grid": [0.5]})
    assert main(["nu", "--config", cfg, "--no-figs"]) == 0
    assert (tmp_path / "nu.csv").exists()


def test_errors_exit_1(tmp_path, capsys):
    assert main(["nu", "--config", str(tmp_path / "missing.json")]) == 1
    assert "error:" in capsys.readouterr().err

    bad_field = _cfg_file(tmp_path, "bad.json",
                          {"field": {"kind": "vortex"}})
    assert main(["potential", "--config", bad_field, "--no-figs"]) == 1

    signs = _cfg_file(tmp_path, "signs.json",
                      {"field": {"kind": "linear", "bx": 1.0},
                       "domain": DISC, "t_grid": [10.0],
                       "lambda_rule": SUBEXP})
    assert main(["azm", "--config", signs, "--no-figs",
                 "--out", str(tmp_path / "x.csv")]) == 1
    assert "greedy_disc_packing" in capsys.readouterr().err

    no_t = _cfg_file(tmp_path, "no_t.json",
                     {"field": {"kind": "constant", "b": 1.0},
                      "domain": SQUARE, "lambda": 1.0})
    assert main(["count", "--config", no_t, "--no-figs",
                 "--out", str(tmp_path / "y.csv")]) == 1
