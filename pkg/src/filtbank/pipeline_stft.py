"""Frame-then-transform feature computation.

Each frame is windowed, zero-padded, transformed, and its power
spectrum is weighted by each filter's power response.  A time-domain
variant (`stft_features_timeform`) filters the windowed frame by
frequency-domain convolution and integrates the squared modulus; by
Parseval's theorem the two agree to round-off, which makes the variant
a strong numerical cross-check of the main path.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.fft
from numpy.lib.stride_tricks import sliding_window_view

from .audio_io import AudioBuffer
from .filters import FilterBank, FilterKind, _kernel_response, _signed_response, _triangle_weights
from .windows import WindowKind, window_samples

__all__ = [
    "FrameConfig",
    "FeatureMatrix",
    "frame_count",
    "stft_features",
    "stft_features_timeform",
]


def _next_pow2(n: int) -> int:
    return 1 << max(0, (n - 1).bit_length())


@dataclass(frozen=True)
class FrameConfig:
    """Framing convention shared by both computation orders.

    ``dft_size`` defaults to the next power of two at or above
    ``frame_length``.  Frame ``i`` covers samples
    ``[i*shift, i*shift + frame_length)`` with center
    ``i*shift + frame_length // 2`` (snip-edges: no frame extends past
    the signal).
    """

    shift: int
    frame_length: int
    window: WindowKind = WindowKind.HAMMING
    dft_size: int = 0
    include_energy: bool = True
    log_floor: float = 1e-10

    def __post_init__(self):
        if self.shift < 1:
            raise ValueError(f"shift must be >= 1, got {self.shift}")
        if self.frame_length < self.shift:
            raise ValueError(
                f"frame_length ({self.frame_length}) must be >= shift "
                f"({self.shift})"
            )
        object.__setattr__(self, "window", WindowKind(self.window))
        dft = self.dft_size or _next_pow2(self.frame_length)
        if dft < self.frame_length or dft & (dft - 1):
            raise ValueError(
                f"dft_size must be a power of two >= frame_length, got {dft}"
            )
        object.__setattr__(self, "dft_size", dft)
        if not self.log_floor > 0:
            raise ValueError(f"log_floor must be > 0, got {self.log_floor}")

    def frame_centers(self, count: int) -> np.ndarray:
        return np.arange(count) * self.shift + self.frame_length // 2


@dataclass(frozen=True)
class FeatureMatrix:
    """Frames-by-coefficients matrix of finite 64-bit reals."""

    values: np.ndarray
    col_layout: str = "static"

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2:
            raise ValueError("feature values must be a 2-D matrix")
        if not np.all(np.isfinite(values)):
            raise ValueError("feature values must be finite")
        object.__setattr__(self, "values", values)

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    @property
    def cols(self) -> int:
        return self.values.shape[1]


def frame_count(num_samples: int, cfg: FrameConfig) -> int:
    """Number of frames fully inside a signal of ``num_samples``."""
    if num_samples < cfg.frame_length:
        raise ValueError(
            f"signal shorter than one frame ({num_samples} < "
            f"{cfg.frame_length} samples)"
        )
    return 1 + (num_samples - cfg.frame_length) // cfg.shift


def _check_rates(audio: AudioBuffer, bank: FilterBank) -> None:
    if audio.sample_rate != bank.sample_rate:
        raise ValueError(
            f"sample-rate mismatch: audio {audio.sample_rate} Hz vs bank "
            f"{bank.sample_rate} Hz"
        )


def _frames(x: np.ndarray, cfg: FrameConfig) -> np.ndarray:
    count = frame_count(len(x), cfg)
    return sliding_window_view(x, cfg.frame_length)[:: cfg.shift][:count]


def _log_energy(frames: np.ndarray, floor: float) -> np.ndarray:
    return np.log(np.maximum(floor, np.sum(frames**2, axis=1)))


def band_power_weights(bank: FilterBank, dft_size: int) -> np.ndarray:
    """Per-filter power weights on the one-sided DFT bins.

    Weights are the filter power responses sampled on the full signed
    bin grid, then folded onto the ``dft_size//2 + 1`` one-sided bins so
    that a one-sided weighted sum equals the full two-sided sum.  The
    fold matters: the analytic Gabor/Gammatone responses have small but
    non-negligible negative-frequency values for low center frequencies.
    """
    fs = bank.sample_rate
    signed_hz = np.fft.fftfreq(dft_size, 1.0 / fs)
    half = dft_size // 2
    weights = np.empty((len(bank.specs), half + 1))
    for k, spec in enumerate(bank.specs):
        if spec.kind is FilterKind.TRIANGULAR:
            full = _triangle_weights(spec, np.abs(signed_hz))
        else:
            full = np.abs(_signed_response(spec, signed_hz)) ** 2
        folded = full[: half + 1].copy()
        folded[1:half] += full[-1:half:-1]
        weights[k] = folded
    return weights


def stft_features(
    audio: AudioBuffer, bank: FilterBank, cfg: FrameConfig
) -> FeatureMatrix:
    """Log filter-bank energies from per-frame power spectra.

    Coefficient ``k`` of a frame is
    ``log(max(log_floor, sum_bins w_k |X|**2))`` where ``w_k`` is the
    filter's power response (triangle weight, or squared magnitude for
    Gabor/Gammatone).  If ``include_energy``, the log energy of the
    un-windowed frame is prepended.
    """
    _check_rates(audio, bank)
    frames = _frames(audio.samples, cfg)
    win = window_samples(cfg.window, cfg.frame_length)
    spectra = scipy.fft.rfft(frames * win, n=cfg.dft_size, axis=1)
    power = spectra.real**2 + spectra.imag**2
    weights = band_power_weights(bank, cfg.dft_size)
    band = power @ weights.T
    coeffs = np.log(np.maximum(cfg.log_floor, band))
    if cfg.include_energy:
        energy = _log_energy(frames, cfg.log_floor)
        coeffs = np.column_stack([energy, coeffs])
        return FeatureMatrix(values=coeffs, col_layout="energy+static")
    return FeatureMatrix(values=coeffs, col_layout="static")


def stft_features_timeform(
    audio: AudioBuffer, bank: FilterBank, cfg: FrameConfig
) -> FeatureMatrix:
    """Same features by filtering each windowed frame in the time domain.

    Each windowed, zero-padded frame is circularly convolved (at
    ``dft_size``) with the filter's convolution kernel and the squared
    modulus is summed over time.  The discrete Parseval identity makes
    this equal to :func:`stft_features` up to round-off.
    """
    _check_rates(audio, bank)
    frames = _frames(audio.samples, cfg)
    win = window_samples(cfg.window, cfg.frame_length)
    spectra = scipy.fft.fft(frames * win, n=cfg.dft_size, axis=1)
    signed_hz = np.fft.fftfreq(cfg.dft_size, 1.0 / bank.sample_rate)
    band = np.empty((len(frames), len(bank.specs)))
    for k, spec in enumerate(bank.specs):
        resp = _kernel_response(spec, signed_hz)
        filtered = scipy.fft.ifft(spectra * resp, axis=1)
        # the DFT length scales Parseval's identity
        band[:, k] = cfg.dft_size * np.sum(
            filtered.real**2 + filtered.imag**2, axis=1
        )
    coeffs = np.log(np.maximum(cfg.log_floor, band))
    if cfg.include_energy:
        energy = _log_energy(frames, cfg.log_floor)
        coeffs = np.column_stack([energy, coeffs])
        return FeatureMatrix(values=coeffs, col_layout="energy+static")
    return FeatureMatrix(values=coeffs, col_layout="static")
