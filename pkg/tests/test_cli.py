import json
import os

import numpy as np
import pytest

from zerodyn.cli import main

FINITE_LIFE = {
    "model": {"kind": "polynomial_product", "C": 2.0, "n": 2},
    "initial": {"cauchy": {"x": [-0.5, 0.5], "v": [-1.0, 1.0]}},
    "time": {"t0": -1.0, "t1": 2.0, "dt": 0.05},
    "window": "auto",
}

CM_EMPTY = {
    "model": {"kind": "characteristic_cm", "gamma": 1.0},
    "initial": {"phase": {"q": [0.0, 0.0], "p": [1.0, -1.0]}},
    "time": {"t0": -2.0, "t1": 2.0, "dt": 0.1},
}

KDV_FREE = {
    "model": {"kind": "kdv_determinant", "n": 1, "epsilon": [1]},
    "initial": {"phase": {"q": [0.0], "p": [1.0]}},
    "time": {"t0": -1.0, "t1": 1.0, "dt": 0.25},
}


def write_config(tmp_path, cfg, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return str(path)


class TestRoots:
    def test_polynomial_pair_listing(self, tmp_path, capsys):
        cfg = write_config(
            tmp_path,
            {
                "model": {"kind": "polynomial_product", "C": 9.0, "n": 2},
                "initial": {"phase": {"q": [3.0, -1.0], "p": [1.0, -1.0]}},
            },
        )
        assert main(["roots", "--config", cfg, "--t", "0"]) == 0
        out = capsys.readouterr().out
        assert "M=2" in out and "-1.5" in out and "3.5" in out

    def test_empty_root_set(self, tmp_path, capsys):
        cfg = write_config(tmp_path, CM_EMPTY)
        assert main(["roots", "--config", cfg, "--t", "0"]) == 0
        assert "M=0" in capsys.readouterr().out

    def test_kdv_free_soliton(self, tmp_path, capsys):
        cfg = write_config(tmp_path, KDV_FREE)
        assert main(["roots", "--config", cfg, "--t", "0.5"]) == 0
        out = capsys.readouterr().out
        assert "M=1" in out and "[f1]" in out  # the -v factor carries the zero


class TestSimulate:
    def test_finite_life_outputs(self, tmp_path, capsys):
        cfg = write_config(tmp_path, FINITE_LIFE)
        out_dir = str(tmp_path / "out")
        assert main(["simulate", "--config", cfg, "--out", out_dir]) == 0
        lines = (tmp_path / "out" / "worldlines.csv").read_text().splitlines()
        assert lines[0] == "t,line_id,factor_id,x"
        events = json.loads((tmp_path / "out" / "events.json").read_text())
        kinds = [e["kind"] for e in events]
        assert kinds == ["creation", "annihilation"]
        assert events[0]["t"] == pytest.approx((1 - np.sqrt(2)) / 2, abs=1e-8)
        assert events[1]["t"] == pytest.approx((1 + np.sqrt(2)) / 2, abs=1e-8)
        assert set(events[0]["line_ids"]) == {0, 1}

    def test_empty_worldlines_file_is_valid(self, tmp_path, capsys):
        cfg = write_config(
            tmp_path,
            {
                "model": {"kind": "characteristic_cm", "gamma": 1.0},
                "initial": {"phase": {"q": [0.0, 0.0], "p": [1.0, -1.0]}},
                "time": {"t0": -0.4, "t1": 0.4, "dt": 0.1},
            },
        )
        out_dir = str(tmp_path / "out")
        assert main(["simulate", "--config", cfg, "--out", out_dir]) == 0
        lines = (tmp_path / "out" / "worldlines.csv").read_text().splitlines()
        assert lines == ["t,line_id,factor_id,x"]
        assert json.loads((tmp_path / "out" / "events.json").read_text()) == []

    def test_deterministic_bytes(self, tmp_path, capsys):
        cfg = write_config(tmp_path, FINITE_LIFE)
        a_dir, b_dir = str(tmp_path / "a"), str(tmp_path / "b")
        assert main(["simulate", "--config", cfg, "--out", a_dir]) == 0
        assert main(["simulate", "--config", cfg, "--out", b_dir]) == 0
        for name in ("worldlines.csv", "events.json"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_round_trip_precision_of_csv(self, tmp_path, capsys):
        cfg = write_config(tmp_path, FINITE_LIFE)
        out_dir = str(tmp_path / "out")
        main(["simulate", "--config", cfg, "--out", out_dir])
        row = (tmp_path / "out" / "worldlines.csv").read_text().splitlines()[1]
        t_str, _, _, x_str = row.split(",")
        assert float(t_str) == float(f"{float(t_str):.17g}")  # lossless round trip


class TestPlot:
    def test_svg_written_and_deterministic(self, tmp_path, capsys):
        cfg = write_config(tmp_path, FINITE_LIFE)
        out_dir = str(tmp_path / "out")
        main(["simulate", "--config", cfg, "--out", out_dir])
        wl = os.path.join(out_dir, "worldlines.csv")
        ev = os.path.join(out_dir, "events.json")
        assert main(["plot", wl, ev, "--out", out_dir, "--name", "a.svg"]) == 0
        assert main(["plot", wl, ev, "--out", out_dir, "--name", "b.svg"]) == 0
        a = (tmp_path / "out" / "a.svg").read_bytes()
        b = (tmp_path / "out" / "b.svg").read_bytes()
        assert a == b
        text = a.decode()
        assert text.startswith("<svg") and "polyline" in text

    def test_malformed_csv_rejected(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("nope,nope\n1,2\n")
        assert main(["plot", str(bad)]) == 2


class TestConfigErrors:
    def test_missing_file(self, capsys):
        assert main(["roots", "--config", "/nonexistent.json"]) == 2

    def test_invalid_json_diagnostics(self, tmp_path, capsys):
        p = tmp_path / "bad.json"
        p.write_text('{"model": }')
        assert main(["roots", "--config", str(p)]) == 2
        err = capsys.readouterr().err
        assert "bad.json:1:" in err

    def test_unknown_model_kind(self, tmp_path, capsys):
        cfg = write_config(tmp_path, {"model": {"kind": "nope"}, "initial": {"cauchy": {"x": [0], "v": [0]}}})
        assert main(["roots", "--config", cfg]) == 2

    def test_both_initializations_rejected(self, tmp_path, capsys):
        cfg = write_config(
            tmp_path,
            {
                "model": {"kind": "polynomial_product", "C": 1.0, "n": 2},
                "initial": {
                    "phase": {"q": [0, 1], "p": [0, 0]},
                    "cauchy": {"x": [0, 1], "v": [0, 0]},
                },
            },
        )
        assert main(["roots", "--config", cfg]) == 2

    def test_unknown_suite_is_usage_error(self, capsys):
        assert main(["verify", "--suite", "nope"]) == 2


class TestVerifyCommand:
    def test_fast_suite_passes_and_reports(self, tmp_path, capsys):
        report = str(tmp_path / "report.json")
        assert main(["verify", "--suite", "asymptotics", "--json", report]) == 0
        out = capsys.readouterr().out
        assert "[pass]" in out and "checks passed" in out
        rows = json.loads((tmp_path / "report.json").read_text())
        assert all(set(r) == {"suite", "check", "value", "tolerance", "passed"} for r in rows)
