"""Averaged power spectra of noise recordings and dominant-tone extraction.

Power is reported per bin, one-sided, with the scaling

    P[k] = c_k |X[k]|^2 / N,   c_k = 1 for DC and Nyquist, 2 otherwise,

where X is the DFT of a windowed N-sample segment. Under this convention
the bins of a single segment sum to the segment's windowed energy
sum((w * x)^2), and segment spectra are averaged across segments.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import get_window

from ._csv import write_rows
from .errors import DomainError

__all__ = [
    "Window",
    "Spectrum",
    "DominantTone",
    "segment_power",
    "power_spectrum",
    "dominant_harmonic",
    "spectrum_to_csv",
]

DEFAULT_BAND = (20.0, 500.0)


class Window(str, enum.Enum):
    HANN = "hann"
    RECTANGULAR = "rectangular"


@dataclass(frozen=True, eq=False)
class Spectrum:
    frequencies: np.ndarray  # Hz, 0 .. fs/2
    power: np.ndarray
    resolution: float  # Hz
    segments: int = 1


@dataclass(frozen=True)
class DominantTone:
    frequency: float
    power: float
    band: tuple


def _window(kind, n):
    kind = Window(kind)
    if kind is Window.RECTANGULAR:
        return np.ones(n)
    return get_window("hann", n, fftbins=True)


def segment_power(segment, window=Window.HANN):
    """One-sided per-bin power of a single segment (even length)."""
    x = np.asarray(segment, dtype=float)
    n = x.size
    spec = np.fft.rfft(x * _window(window, n))
    power = np.abs(spec) ** 2 / n
    power[1:-1] *= 2.0
    return power


def power_spectrum(clip, segment_length=8192, window=Window.HANN):
    """Welch average of `segment_power` over half-overlapping segments.

    Trailing samples that do not fill a whole segment are dropped.
    """
    n = int(segment_length)
    if n != segment_length or n < 2 or n & (n - 1):
        raise DomainError(f"segment_length must be a power of two >= 2, got {segment_length!r}")
    samples = clip.samples
    if n > samples.size:
        raise DomainError(f"segment of {n} samples is longer than the clip ({samples.size})")

    hop = n // 2
    starts = range(0, samples.size - n + 1, hop)
    frames = np.stack([samples[s : s + n] for s in starts])
    w = _window(window, n)
    spec = np.fft.rfft(frames * w, axis=1)
    power = np.abs(spec) ** 2 / n
    power[:, 1:-1] *= 2.0
    freqs = np.fft.rfftfreq(n, d=1.0 / clip.sample_rate)
    return Spectrum(freqs, power.mean(axis=0), clip.sample_rate / n, len(frames))


def dominant_harmonic(spectrum, band_low=DEFAULT_BAND[0], band_high=DEFAULT_BAND[1]):
    """Strongest bin in [band_low, band_high], refined on log-power.

    A parabola through the log-power of the peak bin and its two neighbours
    locates the vertex when both neighbours lie inside the band; edge peaks
    return the bin centre. The returned power is that of the peak bin.
    """
    nyquist = spectrum.frequencies[-1]
    if not (0 <= band_low < band_high <= nyquist * (1 + 1e-12)):
        raise DomainError(f"band ({band_low!r}, {band_high!r}) Hz not within [0, {nyquist!r}]")
    idx = np.flatnonzero((spectrum.frequencies >= band_low) & (spectrum.frequencies <= band_high))
    if idx.size == 0:
        raise DomainError(f"no spectral bins inside ({band_low!r}, {band_high!r}) Hz")
    band_power = spectrum.power[idx]
    peak = int(np.argmax(band_power))
    if not band_power[peak] > 0:
        raise DomainError(f"no peak in band ({band_low!r}, {band_high!r}) Hz: spectrum is silent")

    k = idx[peak]
    freq = float(spectrum.frequencies[k])
    if 0 < peak < idx.size - 1:
        a, b, c = spectrum.power[k - 1 : k + 2]
        if a > 0 and c > 0:
            la, lb, lc = math.log(a), math.log(b), math.log(c)
            denom = la - 2 * lb + lc
            if denom < 0:
                freq += 0.5 * (la - lc) / denom * spectrum.resolution
    return DominantTone(freq, float(band_power[peak]), (float(band_low), float(band_high)))


def spectrum_to_csv(spectrum, stream):
    write_rows(stream, ["frequency_hz", "power"], zip(spectrum.frequencies, spectrum.power))
