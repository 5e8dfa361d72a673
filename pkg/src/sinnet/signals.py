"""Sampled-signal ingestion, synthesis, domain normalization and splits.

Grids always map to the normalized domain [-1, 1]^d with the cell-centered
convention index i -> -1 + 2(i + 0.5)/N. Supported binary formats are the
minimal ones needed for image/audio work: 8-bit binary PGM (P5) and mono
PCM16 WAV; CSV_GRID is a text format with a ``shape:d1,...,dk`` header and
one value per line.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np


class SignalFormat(Enum):
    PGM = "pgm"
    WAV = "wav"
    CSV_GRID = "csv_grid"


class SignalFormatError(ValueError):
    """Malformed header or metadata in a signal file."""


class TruncatedPayloadError(ValueError):
    """Payload shorter than the header promises."""


class UnsupportedDepthError(ValueError):
    """Bit depth or sample format outside the supported minimal profile."""


@dataclass(frozen=True)
class Signal:
    """A d-dimensional sampled grid stored row-major.

    ``axis_sizes`` are the per-axis sample counts; ``values`` is the flat
    row-major value array.
    """

    axis_sizes: tuple[int, ...]
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.ascontiguousarray(self.values, dtype=np.float64).ravel()
        if values.size != int(np.prod(self.axis_sizes)):
            raise ValueError(
                f"value count {values.size} != product of axis sizes {self.axis_sizes}"
            )
        if values.size == 0:
            raise ValueError("signal must be non-empty")
        if not np.all(np.isfinite(values)):
            raise ValueError("signal values must be finite")
        object.__setattr__(self, "values", values)

    @staticmethod
    def from_grid(grid: np.ndarray) -> "Signal":
        grid = np.asarray(grid, dtype=np.float64)
        return Signal(axis_sizes=grid.shape, values=grid.ravel())

    def grid(self) -> np.ndarray:
        return self.values.reshape(self.axis_sizes)

    def axis_coordinates(self, axis: int) -> np.ndarray:
        """Cell-centered normalized coordinates of one axis."""
        n = self.axis_sizes[axis]
        return -1.0 + 2.0 * (np.arange(n) + 0.5) / n

    def coordinate_grid(self) -> np.ndarray:
        """(N, d) array of normalized coordinates for every grid point."""
        axes = [self.axis_coordinates(a) for a in range(len(self.axis_sizes))]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)


@dataclass(frozen=True)
class SplitMask:
    """Boolean grid mask; True marks training points (even index-parity)."""

    mask: np.ndarray

    @property
    def train_count(self) -> int:
        return int(self.mask.sum())

    @property
    def test_count(self) -> int:
        return int(self.mask.size - self.mask.sum())


def _parity_mask(axis_sizes: tuple[int, ...]) -> np.ndarray:
    grids = np.meshgrid(*[np.arange(n) for n in axis_sizes], indexing="ij")
    total = sum(grids)
    return total % 2 == 0


def checkerboard_split(signal: Signal):
    """Partition a grid by parity of the index sum.

    Returns ((train_points, train_values), (test_points, test_values), mask)
    with points in normalized coordinates.
    """
    mask = _parity_mask(signal.axis_sizes)
    coords = signal.coordinate_grid()
    flat = mask.ravel()
    train = (coords[flat], signal.values[flat])
    test = (coords[~flat], signal.values[~flat])
    return train, test, SplitMask(mask=mask)


def synth_two_frequency(n: int) -> Signal:
    """The two-frequency test image cos(128*pi*x) + cos(32*pi*y) on [-1,1]^2."""
    if n < 256:
        raise ValueError(f"n={n} aliases the frequency-128 component; need n >= 256")
    x = -1.0 + 2.0 * (np.arange(n) + 0.5) / n
    gx = np.cos(128.0 * np.pi * x)[:, None]
    gy = np.cos(32.0 * np.pi * x)[None, :]
    return Signal.from_grid(gx + gy)


def synth_separable_cosines(n: int, terms: list[tuple[float, int, int]]) -> Signal:
    """Sum of amp*cos(kx*pi*x)*cos(ky*pi*y) terms on an n x n grid."""
    x = -1.0 + 2.0 * (np.arange(n) + 0.5) / n
    grid = np.zeros((n, n))
    for amp, kx, ky in terms:
        grid += amp * np.outer(np.cos(kx * np.pi * x), np.cos(ky * np.pi * x))
    return Signal.from_grid(grid)


# ---------------------------------------------------------------------------
# loaders


def load_signal(path, fmt: SignalFormat) -> Signal:
    path = Path(path)
    if fmt is SignalFormat.PGM:
        return _load_pgm(path)
    if fmt is SignalFormat.WAV:
        return _load_wav(path)
    return _load_csv_grid(path)


def _pgm_tokens(data: bytes):
    """PGM header tokenizer: whitespace-separated, '#' comments to EOL."""
    i = 0
    while i < len(data):
        c = data[i : i + 1]
        if c.isspace():
            i += 1
        elif c == b"#":
            j = data.find(b"\n", i)
            i = len(data) if j < 0 else j + 1
        else:
            j = i
            while j < len(data) and not data[j : j + 1].isspace():
                j += 1
            yield data[i:j], j
            i = j


def _load_pgm(path: Path) -> Signal:
    data = path.read_bytes()
    tokens = _pgm_tokens(data)
    try:
        magic, _ = next(tokens)
        if magic != b"P5":
            raise SignalFormatError(f"{path}: expected binary PGM magic 'P5', got {magic!r}")
        width_tok, _ = next(tokens)
        height_tok, _ = next(tokens)
        maxval_tok, end = next(tokens)
    except StopIteration:
        raise SignalFormatError(f"{path}: incomplete PGM header") from None
    try:
        width, height, maxval = int(width_tok), int(height_tok), int(maxval_tok)
    except ValueError:
        raise SignalFormatError(f"{path}: non-numeric PGM header fields") from None
    if width <= 0 or height <= 0:
        raise SignalFormatError(f"{path}: non-positive PGM dimensions {width}x{height}")
    if maxval != 255:
        raise UnsupportedDepthError(f"{path}: only 8-bit PGM (maxval 255) supported, got {maxval}")
    payload = data[end + 1 :]
    if len(payload) < width * height:
        raise TruncatedPayloadError(
            f"{path}: PGM payload has {len(payload)} bytes, needs {width * height}"
        )
    raw = np.frombuffer(payload[: width * height], dtype=np.uint8)
    return Signal(axis_sizes=(height, width), values=raw.astype(np.float64) / 255.0)


def _load_wav(path: Path) -> Signal:
    data = path.read_bytes()
    if len(data) < 12 or data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise SignalFormatError(f"{path}: not a RIFF/WAVE file")
    pos = 12
    fmt_seen = False
    channels = bits = 0
    samples = None
    while pos + 8 <= len(data):
        chunk_id = data[pos : pos + 4]
        (size,) = struct.unpack_from("<I", data, pos + 4)
        body = data[pos + 8 : pos + 8 + size]
        if chunk_id == b"fmt ":
            if len(body) < 16:
                raise SignalFormatError(f"{path}: truncated fmt chunk")
            audio_fmt, channels, _, _, _, bits = struct.unpack_from("<HHIIHH", body, 0)
            if audio_fmt != 1:
                raise UnsupportedDepthError(f"{path}: only PCM WAV supported, got format {audio_fmt}")
            if channels != 1:
                raise UnsupportedDepthError(f"{path}: only mono WAV supported, got {channels} channels")
            if bits != 16:
                raise UnsupportedDepthError(f"{path}: only 16-bit WAV supported, got {bits}")
            fmt_seen = True
        elif chunk_id == b"data":
            if len(body) < size:
                raise TruncatedPayloadError(f"{path}: WAV data chunk truncated")
            samples = body
        pos += 8 + size + (size % 2)
    if not fmt_seen:
        raise SignalFormatError(f"{path}: missing fmt chunk")
    if samples is None:
        raise SignalFormatError(f"{path}: missing data chunk")
    pcm = np.frombuffer(samples[: len(samples) - len(samples) % 2], dtype="<i2")
    if pcm.size == 0:
        raise TruncatedPayloadError(f"{path}: empty WAV payload")
    return Signal(axis_sizes=(pcm.size,), values=pcm.astype(np.float64) / 32768.0)


def _load_csv_grid(path: Path) -> Signal:
    lines = path.read_text().splitlines()
    if not lines or not lines[0].startswith("shape:"):
        raise SignalFormatError(f"{path}: CSV_GRID must start with a 'shape:' header")
    try:
        shape = tuple(int(t) for t in lines[0][len("shape:") :].split(","))
    except ValueError:
        raise SignalFormatError(f"{path}: malformed shape header {lines[0]!r}") from None
    if any(s <= 0 for s in shape):
        raise SignalFormatError(f"{path}: non-positive shape {shape}")
    body = [ln for ln in lines[1:] if ln.strip()]
    expected = int(np.prod(shape))
    if len(body) < expected:
        raise TruncatedPayloadError(f"{path}: {len(body)} values for shape {shape} (needs {expected})")
    try:
        values = np.array([float(ln) for ln in body[:expected]])
    except ValueError:
        raise SignalFormatError(f"{path}: non-numeric value in CSV_GRID body") from None
    return Signal(axis_sizes=shape, values=values)


# ---------------------------------------------------------------------------
# writers


def write_pgm(signal: Signal, path) -> None:
    """Write a 2D signal as binary 8-bit PGM; values clamp to [0,1] and
    quantize round-half-up."""
    if len(signal.axis_sizes) != 2:
        raise ValueError(f"PGM output requires a 2D signal, got {len(signal.axis_sizes)}D")
    height, width = signal.axis_sizes
    clamped = np.clip(signal.grid(), 0.0, 1.0)
    quantized = np.floor(clamped * 255.0 + 0.5).astype(np.uint8)
    with open(path, "wb") as fh:
        fh.write(f"P5\n{width} {height}\n255\n".encode("ascii"))
        fh.write(quantized.tobytes())


def write_csv_curve(rows, header: list[str], path) -> None:
    """Write (row of floats) tuples under a named header, 17 significant
    digits, LF endings."""
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(f"{float(v):.17g}" for v in row) + "\n")


def write_csv_grid(signal: Signal, path) -> None:
    """Write a signal in the CSV_GRID format load_signal reads back."""
    with open(path, "w", newline="\n") as fh:
        fh.write("shape:" + ",".join(str(s) for s in signal.axis_sizes) + "\n")
        for v in signal.values:
            fh.write(f"{float(v):.17g}\n")


def sample_grid_points(points: np.ndarray, values: np.ndarray, n: int, seed: int):
    """Uniform sample without replacement from (points, values) rows."""
    if n > len(values):
        raise ValueError(f"cannot sample {n} of {len(values)} points")
    rng = np.random.default_rng(np.uint64(seed))
    idx = rng.choice(len(values), size=n, replace=False)
    return points[idx], values[idx]
