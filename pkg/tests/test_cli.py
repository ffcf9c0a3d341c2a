import json
import math
import os

import numpy as np
import pytest

from crystalband.cli import main


def run(args, tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


class TestExitCodes:
    def test_validate_ok(self, tmp_path, monkeypatch, capsys):
        code, out, _ = run(["validate", "--graph", "builtin:graph_a"],
                           tmp_path, monkeypatch, capsys)
        assert code == 0
        assert "summability   pass" in out.replace("  ", " ") or "pass" in out

    def test_unknown_builtin_lists_names(self, tmp_path, monkeypatch, capsys):
        code, _, err = run(["validate", "--graph", "builtin:nope"],
                           tmp_path, monkeypatch, capsys)
        assert code == 2
        assert "graph_a" in err and "fig5_right" in err

    def test_malformed_json_reports_position(self, tmp_path, monkeypatch, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text('{"d": 1,\n  "nu": }')
        code, _, err = run(["validate", "--graph", str(bad)],
                           tmp_path, monkeypatch, capsys)
        assert code == 2
        assert "line 2" in err

    def test_invalid_spec_fails_with_two(self, tmp_path, monkeypatch, capsys):
        obj = {"d": 1, "nu": 1, "Q": [0.0],
               "weights": [{"i": 1, "j": 1,
                            "entries": [[[1], 1.0], [[-1], 2.0]],
                            "tail": {"kind": "none"}}],
               "label": "skew"}
        p = tmp_path / "skew.json"
        p.write_text(json.dumps(obj))
        code, out, _ = run(["validate", "--graph", str(p)],
                           tmp_path, monkeypatch, capsys)
        assert code == 2
        assert "FAIL" in out

    def test_nonconvergence_returns_three(self, tmp_path, monkeypatch, capsys):
        code, _, err = run(["evolve", "--graph", "builtin:graph_b",
                            "--t", "50000", "--window", "8", "--eps", "1e-14"],
                           tmp_path, monkeypatch, capsys)
        assert code == 3
        assert "non-convergence" in err


class TestOutputs:
    def test_spectrum_summary_and_csv(self, tmp_path, monkeypatch, capsys):
        code, out, _ = run(["spectrum", "--graph", "builtin:graph_c",
                            "--grid", "1024"], tmp_path, monkeypatch, capsys)
        assert code == 0
        assert "band ['[0,0.25]']" in out
        assert "'0': 0.50" in out
        lines = (tmp_path / "bands.csv").read_text().splitlines()
        assert lines[0] == "theta_1,E_1"
        assert len(lines) == 1 + 1024

    def test_byte_identical_reruns(self, tmp_path, monkeypatch, capsys):
        run(["spectrum", "--graph", "builtin:graph_b", "--grid", "256",
             "--out", "a.csv"], tmp_path, monkeypatch, capsys)
        first = (tmp_path / "a.csv").read_bytes()
        run(["spectrum", "--graph", "builtin:graph_b", "--grid", "256",
             "--out", "b.csv"], tmp_path, monkeypatch, capsys)
        assert (tmp_path / "b.csv").read_bytes() == first

    def test_evolve_resonant_peak(self, tmp_path, monkeypatch, capsys):
        t = 2 * math.pi * 10
        code, out, _ = run(["evolve", "--graph", "builtin:graph_b",
                            "--t", "%.6f" % t, "--window", "64"],
                           tmp_path, monkeypatch, capsys)
        assert code == 0
        rows = np.loadtxt(tmp_path / "field.csv", delimiter=",", skiprows=1)
        m = rows[:, 0].astype(int)
        amp = np.sqrt(rows[:, 3])
        assert amp[m == 10][0] == pytest.approx(0.5, abs=1e-4)
        assert amp[m == -10][0] == pytest.approx(0.5, abs=1e-4)

    def test_transport_suspect_verdict(self, tmp_path, monkeypatch, capsys):
        code, out, _ = run(["transport", "--graph", "builtin:frac:1:0.2",
                            "--times", "1", "--window", "16384"],
                           tmp_path, monkeypatch, capsys)
        assert code == 0
        assert "super-ballistic-suspect" in out
        obj = json.loads((tmp_path / "transport.json").read_text())
        assert obj["verdict"] == "super-ballistic-suspect"

    def test_green_fit_summary(self, tmp_path, monkeypatch, capsys):
        code, out, _ = run(["green", "--graph", "builtin:graph_b", "--z=-1+0i",
                            "--nmax", "512", "--eps", "1e-11"],
                           tmp_path, monkeypatch, capsys)
        assert code == 0
        assert "model power" in out and "-2.0" in out
        header = (tmp_path / "green.csv").read_text().splitlines()[0]
        assert header == "n,re,im,abs"

    def test_locality_csv(self, tmp_path, monkeypatch, capsys):
        code, out, _ = run(["locality", "--graph", "builtin:weierstrass",
                            "--rmax", "4096"], tmp_path, monkeypatch, capsys)
        assert code == 0
        assert "converges" in out
        header = (tmp_path / "locality.csv").read_text().splitlines()[0]
        assert header == "R,partial_hs2,tail_bound"

    def test_plot_is_rendered(self, tmp_path, monkeypatch, capsys):
        code, out, _ = run(["spectrum", "--graph", "builtin:graph_a",
                            "--grid", "256", "--plot"],
                           tmp_path, monkeypatch, capsys)
        assert code == 0
        assert (tmp_path / "bands.png").exists()

    def test_measure_atoms(self, tmp_path, monkeypatch, capsys):
        code, out, _ = run(["measure", "--graph", "builtin:graph_c",
                            "--grid", "4096"], tmp_path, monkeypatch, capsys)
        assert code == 0
        assert "atoms" in out and "0.500" in out

    def test_threads_env_override(self, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv("CRYSTAL_THREADS", "2")
        code, _, _ = run(["spectrum", "--graph", "builtin:graph_a",
                          "--grid", "256"], tmp_path, monkeypatch, capsys)
        assert code == 0
