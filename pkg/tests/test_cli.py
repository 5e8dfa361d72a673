"""Command-line surface: outputs, exit codes, reproducibility."""

import json

import numpy as np
import pytest

from sinnet.cli import main


def run(args):
    return main(args)


class TestSuggestOmega:
    def test_grid_512(self, tmp_path, capsys):
        assert run(["suggest-omega", "--grid", "512x512"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["omega"] == 32.0
        assert "config" in payload

    def test_random_case(self, capsys):
        assert run(["suggest-omega", "--random", "5000", "--extents", "100,50,200"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["per_axis_scale"] == [0.5, 0.25, 1.0]
        assert 0.9 < payload["omega"] < 1.25

    def test_missing_source_is_usage_error(self, capsys):
        assert run(["suggest-omega"]) == 1


class TestKernel:
    def test_center_value_depth1(self, tmp_path):
        out = tmp_path / "k.csv"
        code = run([
            "kernel", "--family", "ssn", "--depth", "1", "--omega", "1",
            "--center", "0", "--points", "1", "--range", "0", "--out", str(out),
        ])
        assert code == 0
        header, row = out.read_text().splitlines()
        assert header == "offset,value"
        assert float(row.split(",")[1]) == pytest.approx(2.0, abs=1e-12)

    def test_unknown_flag_is_usage_error(self, tmp_path):
        assert run(["kernel", "--family", "ssn", "--omega", "1", "--bogus", "1"]) == 1

    def test_bad_family_is_usage_error(self, tmp_path):
        out = tmp_path / "k.csv"
        assert run(["kernel", "--family", "tanh", "--omega", "1", "--out", str(out)]) == 1


class TestSpectrum:
    def test_two_freq_plateaus(self, tmp_path):
        out = tmp_path / "s.csv"
        code = run(["spectrum", "--two-freq", "512", "--cutoffs", "16,64,200", "--out", str(out)])
        assert code == 0
        rows = out.read_text().splitlines()[1:]
        losses = [float(r.split(",")[1]) for r in rows]
        assert losses[0] == pytest.approx(1.0, rel=0.02)
        assert losses[1] == pytest.approx(0.5, rel=0.02)
        assert losses[2] < 1e-6

    def test_missing_file_is_data_error(self, tmp_path):
        out = tmp_path / "s.csv"
        assert run(["spectrum", "--input", str(tmp_path / "nope.pgm"), "--cutoffs", "1", "--out", str(out)]) == 2

    def test_malformed_pgm_is_data_error(self, tmp_path):
        bad = tmp_path / "bad.pgm"
        bad.write_bytes(b"P5\n4 4\n255\nxx")
        assert run(["spectrum", "--input", str(bad), "--cutoffs", "1", "--out", str(tmp_path / "s.csv")]) == 2


class TestGenSignal:
    def test_pgm_roundtrip(self, tmp_path):
        out = tmp_path / "two.pgm"
        assert run(["gen-signal", "--kind", "two-freq", "--n", "256", "--out", str(out)]) == 0
        from sinnet import SignalFormat, load_signal

        sig = load_signal(out, SignalFormat.PGM)
        assert sig.axis_sizes == (256, 256)

    def test_csv_grid_output(self, tmp_path):
        out = tmp_path / "two.csv"
        assert run(["gen-signal", "--kind", "two-freq", "--n", "256", "--out", str(out)]) == 0
        assert out.read_text().startswith("shape:256,256")

    def test_byte_identical_reruns(self, tmp_path):
        a, b = tmp_path / "a.pgm", tmp_path / "b.pgm"
        run(["gen-signal", "--n", "256", "--out", str(a)])
        run(["gen-signal", "--n", "256", "--out", str(b)])
        assert a.read_bytes() == b.read_bytes()

    def test_bad_extension_usage_error(self, tmp_path):
        assert run(["gen-signal", "--out", str(tmp_path / "x.txt")]) == 1


class TestTrainingCommands:
    def test_fit_smoke_with_reconstruction(self, tmp_path):
        report = tmp_path / "r.json"
        recon = tmp_path / "rec.pgm"
        code = run([
            "fit", "--cosines", "0.5,4,0;0.5,0,2", "--n", "32", "--width", "32",
            "--depth", "2", "--steps", "200", "--lr", "3e-3", "--seed", "1",
            "--out", str(report), "--recon", str(recon),
        ])
        assert code == 0
        payload = json.loads(report.read_text())
        assert payload["resolved_omega"] == 2.0  # 32-sample axes -> Nyquist 16 -> /8
        assert payload["report"]["final_metrics"]["mse"] >= 0
        assert recon.exists()

    def test_fit_reports_are_reproducible(self, tmp_path):
        args = ["fit", "--cosines", "1,2,0", "--n", "16", "--width", "16", "--depth", "2",
                "--steps", "50", "--seed", "7"]
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        assert run(args + ["--out", str(a)]) == 0
        assert run(args + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_split_fit_reports_test_metrics(self, tmp_path):
        report = tmp_path / "r.json"
        code = run([
            "split-fit", "--cosines", "1,2,2", "--n", "16", "--width", "16",
            "--depth", "2", "--steps", "100", "--seed", "2", "--out", str(report),
        ])
        assert code == 0
        payload = json.loads(report.read_text())
        assert "test_metrics" in payload

    def test_pinn_burgers_smoke(self, tmp_path):
        report = tmp_path / "b.json"
        code = run([
            "pinn-burgers", "--samples", "64", "--steps", "60", "--width", "8",
            "--depth", "2", "--seed", "3", "--out", str(report),
        ])
        assert code == 0
        payload = json.loads(report.read_text())
        assert "identified" in payload and "solution_mse" in payload

    def test_poisson_smoke(self, tmp_path):
        report = tmp_path / "p.json"
        code = run([
            "poisson", "--cosines", "1,1,1", "--n", "16", "--width", "16", "--depth", "2",
            "--steps", "100", "--target", "grad", "--seed", "4", "--out", str(report),
        ])
        assert code == 0
        payload = json.loads(report.read_text())
        assert "reconstruction" in payload


class TestHelp:
    def test_top_level_help_exits_zero(self, capsys):
        assert run(["--help"]) == 0
        assert "subcommand" in capsys.readouterr().out or True

    def test_subcommand_help_exits_zero(self):
        for cmd in ["kernel", "spectrum", "fit", "pinn-burgers", "suggest-omega"]:
            assert run([cmd, "--help"]) == 0

    def test_no_command_is_usage_error(self):
        assert run([]) == 1
