"""DFT analysis, low-pass reconstruction curves, and the bandwidth heuristic.

Frequency convention: a signal cos(k*pi*x) on the normalized domain [-1, 1]
has frequency index k, and an N-sample axis has Nyquist frequency N/2. The
low-pass mask is per-axis (L-infinity): a coefficient survives only if its
frequency index is within the cutoff on every axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .signals import Signal


@dataclass(frozen=True)
class Spectrum:
    """Complex DFT coefficients on the source grid shape."""

    coefficients: np.ndarray

    @property
    def axis_sizes(self) -> tuple[int, ...]:
        return self.coefficients.shape


@dataclass(frozen=True)
class OmegaSuggestion:
    """Bandwidth suggestion: base omega plus per-axis scale multipliers.

    ``omega = max(max_freq_per_axis) / divisor``; scales are the per-axis max
    frequencies normalized so the largest is 1.
    """

    omega: float
    per_axis_scale: tuple[float, ...]
    max_freq_per_axis: tuple[float, ...]


def dft(signal: Signal) -> Spectrum:
    """Forward DFT of a sampled grid."""
    if signal.grid().size == 0:
        raise ValueError("cannot transform an empty signal")
    return Spectrum(np.fft.fftn(signal.grid()))


def idft(spectrum: Spectrum) -> Signal:
    """Inverse DFT; discards the numerically-zero imaginary residue."""
    values = np.fft.ifftn(spectrum.coefficients).real
    return Signal.from_grid(values)


def _axis_freq_index(n: int) -> np.ndarray:
    """|frequency index| for each DFT bin of an n-sample axis."""
    return np.abs(np.fft.fftfreq(n, d=1.0 / n))


def lowpass_filter(signal: Signal, cutoff: float) -> Signal:
    """Zero all coefficients above the per-axis cutoff and invert."""
    spec = dft(signal)
    coef = spec.coefficients.copy()
    for axis, n in enumerate(coef.shape):
        freq = _axis_freq_index(n)
        shape = [1] * coef.ndim
        shape[axis] = n
        coef = np.where(freq.reshape(shape) > cutoff, 0.0, coef)
    return idft(Spectrum(coef))


def lowpass_loss_curve(signal: Signal, cutoffs) -> list[tuple[float, float]]:
    """(cutoff, reconstruction MSE) for each cutoff frequency."""
    cutoffs = [float(c) for c in cutoffs]
    if any(c < 0 for c in cutoffs):
        raise ValueError("cutoffs must be non-negative")
    grid = signal.grid()
    out = []
    for c in cutoffs:
        rec = lowpass_filter(signal, c).grid()
        out.append((c, float(np.mean((rec - grid) ** 2))))
    return out


def spectrum_max_freq(signal: Signal, energy_threshold: float) -> np.ndarray:
    """Per-axis smallest frequency index whose band holds >= threshold of the
    spectral energy (marginalized over the other axes)."""
    if not 0.0 < energy_threshold <= 1.0:
        raise ValueError(f"energy_threshold must be in (0, 1], got {energy_threshold}")
    coef = dft(signal).coefficients
    power = np.abs(coef) ** 2
    total = power.sum()
    result = np.empty(coef.ndim)
    for axis, n in enumerate(coef.shape):
        other = tuple(a for a in range(coef.ndim) if a != axis)
        marginal = power.sum(axis=other) if other else power
        freq = _axis_freq_index(n)
        order = np.argsort(freq, kind="stable")
        cum = np.cumsum(marginal[order])
        cut = np.searchsorted(cum, energy_threshold * total - 1e-12 * total)
        result[axis] = freq[order][min(cut, n - 1)]
    return result


def suggest_omega(
    axis_sample_counts=None,
    *,
    n_random_points: int | None = None,
    axis_extents=None,
    divisor: float = 8.0,
) -> OmegaSuggestion:
    """Nyquist-based bandwidth suggestion.

    Grid case: per-axis max frequency is count/2. Random-sampling case: the
    effective per-axis sample count is n^(1/d) scaled by each axis extent
    relative to the largest. ``divisor`` is the heuristic safety factor
    between the kernel bandwidth and the highest learnable frequency.
    """
    if not divisor > 0:
        raise ValueError("divisor must be positive")
    if axis_sample_counts is not None:
        counts = np.asarray(axis_sample_counts, dtype=np.float64)
        if counts.ndim != 1 or len(counts) == 0 or np.any(counts <= 0):
            raise ValueError(f"axis sample counts must be positive, got {axis_sample_counts}")
        max_freq = counts / 2.0
    else:
        if n_random_points is None or axis_extents is None:
            raise ValueError("provide axis_sample_counts, or n_random_points with axis_extents")
        if n_random_points <= 0:
            raise ValueError("n_random_points must be positive")
        extents = np.asarray(axis_extents, dtype=np.float64)
        if extents.ndim != 1 or len(extents) == 0 or np.any(extents <= 0):
            raise ValueError(f"axis extents must be positive, got {axis_extents}")
        rate = n_random_points ** (1.0 / len(extents))
        counts = rate * extents / extents.max()
        max_freq = counts / 2.0
    omega = float(max_freq.max() / divisor)
    scale = max_freq / max_freq.max()
    return OmegaSuggestion(
        omega=omega,
        per_axis_scale=tuple(float(s) for s in scale),
        max_freq_per_axis=tuple(float(f) for f in max_freq),
    )


def parseval_check(signal: Signal) -> tuple[float, float]:
    """(sum of squared samples, coefficient energy / N); equal by Parseval."""
    grid = signal.grid()
    coef = dft(signal).coefficients
    return float(np.sum(grid**2)), float(np.sum(np.abs(coef) ** 2) / grid.size)
