"""File formats, synthetic signals, checkerboard splits and sampling."""

import numpy as np
import pytest

from sinnet import (
    Signal,
    SignalFormat,
    SignalFormatError,
    TruncatedPayloadError,
    UnsupportedDepthError,
    checkerboard_split,
    load_signal,
    sample_grid_points,
    synth_two_frequency,
    write_csv_curve,
    write_csv_grid,
    write_pgm,
)


class TestPgm:
    def test_parse_2x2(self, tmp_path):
        p = tmp_path / "t.pgm"
        p.write_bytes(b"P5\n2 2\n255\n" + bytes([0, 255, 128, 64]))
        sig = load_signal(p, SignalFormat.PGM)
        assert sig.axis_sizes == (2, 2)
        np.testing.assert_allclose(sig.values, [0.0, 1.0, 128 / 255, 64 / 255])

    def test_comments_and_whitespace(self, tmp_path):
        p = tmp_path / "t.pgm"
        p.write_bytes(b"P5\n# a comment\n 2\t1 \n255\n" + bytes([10, 20]))
        sig = load_signal(p, SignalFormat.PGM)
        assert sig.axis_sizes == (1, 2)

    def test_bad_magic(self, tmp_path):
        p = tmp_path / "t.pgm"
        p.write_bytes(b"P2\n2 2\n255\n....")
        with pytest.raises(SignalFormatError):
            load_signal(p, SignalFormat.PGM)

    def test_truncated_payload(self, tmp_path):
        p = tmp_path / "t.pgm"
        p.write_bytes(b"P5\n2 2\n255\n" + bytes([0, 255]))
        with pytest.raises(TruncatedPayloadError):
            load_signal(p, SignalFormat.PGM)

    def test_unsupported_depth(self, tmp_path):
        p = tmp_path / "t.pgm"
        p.write_bytes(b"P5\n1 1\n65535\n" + bytes([0, 0]))
        with pytest.raises(UnsupportedDepthError):
            load_signal(p, SignalFormat.PGM)

    def test_write_read_roundtrip_error_bound(self, tmp_path):
        """Quantization error of one write/load cycle <= 1/510."""
        rng = np.random.default_rng(0)
        sig = Signal.from_grid(rng.uniform(0, 1, (13, 17)))
        p = tmp_path / "r.pgm"
        write_pgm(sig, p)
        back = load_signal(p, SignalFormat.PGM)
        assert np.abs(back.values - sig.values).max() <= 1 / 510 + 1e-12

    def test_constant_half_quantizes_to_128(self, tmp_path):
        sig = Signal.from_grid(np.full((4, 4), 0.5))
        p = tmp_path / "h.pgm"
        write_pgm(sig, p)
        payload = p.read_bytes().split(b"255\n", 1)[1]
        assert payload == bytes([128] * 16)

    def test_write_requires_2d(self, tmp_path):
        with pytest.raises(ValueError):
            write_pgm(Signal.from_grid(np.zeros(4)), tmp_path / "x.pgm")


class TestWav:
    @staticmethod
    def _wav_bytes(samples: np.ndarray) -> bytes:
        import struct

        pcm = samples.astype("<i2").tobytes()
        fmt = struct.pack("<HHIIHH", 1, 1, 44100, 88200, 2, 16)
        chunks = b"fmt " + struct.pack("<I", len(fmt)) + fmt
        chunks += b"data" + struct.pack("<I", len(pcm)) + pcm
        return b"RIFF" + struct.pack("<I", 4 + len(chunks)) + b"WAVE" + chunks

    def test_pcm16_scaling(self, tmp_path):
        p = tmp_path / "t.wav"
        p.write_bytes(self._wav_bytes(np.array([16384, -32768, 0], dtype=np.int16)))
        sig = load_signal(p, SignalFormat.WAV)
        np.testing.assert_allclose(sig.values, [0.5, -1.0, 0.0])

    def test_rejects_stereo(self, tmp_path):
        import struct

        fmt = struct.pack("<HHIIHH", 1, 2, 44100, 176400, 4, 16)
        data = b"RIFF" + struct.pack("<I", 28) + b"WAVE" + b"fmt " + struct.pack("<I", 16) + fmt
        p = tmp_path / "s.wav"
        p.write_bytes(data)
        with pytest.raises(UnsupportedDepthError):
            load_signal(p, SignalFormat.WAV)

    def test_rejects_non_riff(self, tmp_path):
        p = tmp_path / "x.wav"
        p.write_bytes(b"OggS....")
        with pytest.raises(SignalFormatError):
            load_signal(p, SignalFormat.WAV)


class TestCsvGrid:
    def test_parse_1d(self, tmp_path):
        p = tmp_path / "g.csv"
        p.write_text("shape:3\n1\n2\n3\n")
        sig = load_signal(p, SignalFormat.CSV_GRID)
        assert sig.axis_sizes == (3,)
        np.testing.assert_array_equal(sig.values, [1, 2, 3])

    def test_roundtrip_exact(self, tmp_path):
        rng = np.random.default_rng(1)
        sig = Signal(axis_sizes=(4, 5), values=rng.standard_normal(20))
        p = tmp_path / "g.csv"
        write_csv_grid(sig, p)
        back = load_signal(p, SignalFormat.CSV_GRID)
        np.testing.assert_array_equal(back.values, sig.values)
        assert back.axis_sizes == sig.axis_sizes

    def test_missing_header(self, tmp_path):
        p = tmp_path / "g.csv"
        p.write_text("1\n2\n")
        with pytest.raises(SignalFormatError):
            load_signal(p, SignalFormat.CSV_GRID)

    def test_truncated(self, tmp_path):
        p = tmp_path / "g.csv"
        p.write_text("shape:4\n1\n2\n")
        with pytest.raises(TruncatedPayloadError):
            load_signal(p, SignalFormat.CSV_GRID)

    def test_curve_roundtrip_17_digits(self, tmp_path):
        rows = [(0.1, 1 / 3), (2.5, np.pi)]
        p = tmp_path / "c.csv"
        write_csv_curve(rows, ["a", "b"], p)
        lines = p.read_text().splitlines()
        assert lines[0] == "a,b"
        parsed = [tuple(float(t) for t in ln.split(",")) for ln in lines[1:]]
        for got, want in zip(parsed, rows):
            assert got == want


class TestTwoFrequency:
    def test_continuous_formula_and_grid_values(self):
        """f(x, y) = cos(128 pi x) + cos(32 pi y); f(0,0) = 2, and every
        sample equals the formula at its cell-centered coordinates."""
        sig = synth_two_frequency(512)
        f = lambda x, y: np.cos(128 * np.pi * x) + np.cos(32 * np.pi * y)
        assert f(0.0, 0.0) == 2.0
        coords = sig.coordinate_grid()
        np.testing.assert_allclose(sig.values, f(coords[:, 0], coords[:, 1]), atol=1e-12)

    def test_zero_mean(self):
        sig = synth_two_frequency(512)
        assert abs(sig.values.mean()) < 1e-9

    def test_unit_mean_square(self):
        sig = synth_two_frequency(512)
        assert np.mean(sig.values**2) == pytest.approx(1.0, abs=1e-6)

    def test_aliasing_guard(self):
        with pytest.raises(ValueError):
            synth_two_frequency(255)


class TestCheckerboard:
    def test_4x4_counts(self):
        sig = Signal.from_grid(np.arange(16.0).reshape(4, 4))
        (tp, tv), (sp, sv), mask = checkerboard_split(sig)
        assert len(tv) == 8 and len(sv) == 8

    def test_3x3_counts(self):
        sig = Signal.from_grid(np.arange(9.0).reshape(3, 3))
        (tp, tv), (sp, sv), mask = checkerboard_split(sig)
        assert len(tv) == 5 and len(sv) == 4

    def test_1d_parity(self):
        sig = Signal.from_grid(np.arange(6.0))
        (tp, tv), _, mask = checkerboard_split(sig)
        np.testing.assert_array_equal(tv, [0, 2, 4])
        np.testing.assert_array_equal(mask.mask, [True, False, True, False, True, False])

    def test_completeness_and_disjointness(self):
        rng = np.random.default_rng(2)
        sig = Signal.from_grid(rng.standard_normal((5, 7, 3)))
        (tp, tv), (sp, sv), mask = checkerboard_split(sig)
        assert len(tv) + len(sv) == sig.values.size
        assert abs(len(tv) - len(sv)) <= 1
        all_vals = np.sort(np.concatenate([tv, sv]))
        np.testing.assert_array_equal(all_vals, np.sort(sig.values))


class TestSampling:
    def test_exhaustive_sample_is_permutation(self):
        pts = np.arange(20.0).reshape(10, 2)
        vals = np.arange(10.0)
        sp, sv = sample_grid_points(pts, vals, 10, seed=0)
        np.testing.assert_array_equal(np.sort(sv), vals)

    def test_deterministic(self):
        pts = np.arange(40.0).reshape(20, 2)
        vals = np.arange(20.0)
        a = sample_grid_points(pts, vals, 7, seed=5)
        b = sample_grid_points(pts, vals, 7, seed=5)
        np.testing.assert_array_equal(a[1], b[1])

    def test_too_large_rejected(self):
        with pytest.raises(ValueError):
            sample_grid_points(np.zeros((3, 2)), np.zeros(3), 4, seed=0)

    def test_uniformity_of_means(self):
        """n=2000 from a 100x256 grid: per-axis sample means sit within 3
        standard errors of the grid means."""
        from sinnet.signals import Signal

        sig = Signal.from_grid(np.zeros((100, 256)))
        pts = sig.coordinate_grid()
        sp, _ = sample_grid_points(pts, sig.values, 2000, seed=9)
        for axis in range(2):
            coords = sig.axis_coordinates(axis)
            grid_mean = coords.mean()
            grid_std = coords.std()
            se = grid_std / np.sqrt(2000)
            assert abs(sp[:, axis].mean() - grid_mean) < 3 * se
