"""Short-integration feature computation.

Instead of windowing frames and then filtering, the whole signal is
convolved with each band-pass kernel (overlap-save FFT convolution) and
the squared modulus is integrated under a short window centered on the
same frame centers the frame-based pipeline uses.  Filtering before
windowing avoids the spectral leakage of a short analysis frame.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.fft
from numpy.lib.stride_tricks import sliding_window_view

from .audio_io import AudioBuffer
from .filters import (
    FilterBank,
    FilterKind,
    FilterSpec,
    _kernel_response,
    kernel_delay,
    kernel_sizing_length,
)
from .pipeline_stft import FeatureMatrix, FrameConfig, frame_count, _check_rates
from .windows import WindowKind, window_samples

__all__ = [
    "SiConfig",
    "default_block_size",
    "overlap_save_convolve",
    "si_features",
]


def _next_pow2(n: int) -> int:
    return 1 << max(0, (n - 1).bit_length())


@dataclass(frozen=True)
class SiConfig:
    """Configuration of the short-integration pipeline.

    Frame centers are inherited from ``align_frames_to`` so both
    pipelines produce matrices of identical shape.  ``integ_length``
    defaults to twice the frame shift; ``block_size`` (power of two)
    defaults to the next power of two at or above four times the longest
    kernel in the bank.  With ``delay_compensation`` on, each filter's
    output is advanced by its envelope-peak delay so a transient lands
    in the same frame across bands.
    """

    align_frames_to: FrameConfig
    integ_length: int = 0
    window: WindowKind = WindowKind.HANN
    block_size: int = 0
    delay_compensation: bool = True
    include_energy: bool = True
    log_floor: float = 1e-10

    def __post_init__(self):
        integ = self.integ_length or 2 * self.align_frames_to.shift
        if integ < 1:
            raise ValueError(f"integ_length must be >= 1, got {integ}")
        object.__setattr__(self, "integ_length", integ)
        object.__setattr__(self, "window", WindowKind(self.window))
        if self.block_size and self.block_size & (self.block_size - 1):
            raise ValueError(
                f"block_size must be a power of two, got {self.block_size}"
            )
        if not self.log_floor > 0:
            raise ValueError(f"log_floor must be > 0, got {self.log_floor}")

    @property
    def shift(self) -> int:
        return self.align_frames_to.shift


def _bank_extents(bank: FilterBank) -> tuple[int, int]:
    """Largest anticausal/causal kernel extents over the bank."""
    before = after = 0
    for spec in bank.specs:
        b, a = kernel_sizing_length(spec, bank.sample_rate)
        before = max(before, b)
        after = max(after, a)
    return before, after


def default_block_size(bank: FilterBank) -> int:
    """Next power of two >= 4x the longest truncated kernel in the bank."""
    before, after = _bank_extents(bank)
    return _next_pow2(4 * (before + after + 1))


def _check_block(block_size: int, length: int) -> None:
    if block_size & (block_size - 1) or block_size < 2 * length:
        raise ValueError(
            f"block_size {block_size} too small: need a power of two >= "
            f"{2 * length} (2x the truncated kernel length)"
        )


def _os_blocks(
    signal: np.ndarray, n_out: int, block_size: int, before: int, after: int
) -> tuple[np.ndarray, int, int]:
    """Zero-padded overlap-save input blocks as rows of a matrix.

    Block ``j`` yields valid outputs ``j*hop .. j*hop + hop - 1`` at
    block-local offsets ``after .. after + hop - 1``, for a kernel
    supported on lags ``[-before, after]``.
    """
    length = before + after + 1
    hop = block_size - length + 1
    num_blocks = -(-n_out // hop)
    padded = np.zeros(num_blocks * hop + block_size)
    padded[after : after + len(signal)] = signal
    blocks = sliding_window_view(padded, block_size)[::hop][:num_blocks]
    return blocks, hop, num_blocks


def overlap_save_convolve(
    signal,
    spec: FilterSpec,
    block_size: int,
    sample_rate: float,
    delay_compensation: bool = True,
) -> np.ndarray:
    """Convolve a signal with one filter via overlap-save FFT blocks.

    The filter is realized by sampling its frequency response at the
    block-size bin frequencies, which is equivalent to linear
    convolution with the (periodized) kernel; the block discards make
    the result free of circular wrap for kernels within the truncation
    extents.  Output sample ``t`` corresponds to input time ``t``; with
    ``delay_compensation`` the output is advanced by the kernel's
    envelope-peak delay.
    """
    x = np.asarray(signal, dtype=np.float64)
    before, after = kernel_sizing_length(spec, sample_rate)
    _check_block(block_size, before + after + 1)
    delay = kernel_delay(spec, sample_rate) if delay_compensation else 0
    n_out = len(x) + delay
    blocks, hop, num_blocks = _os_blocks(x, n_out, block_size, before, after)
    freqs = np.fft.fftfreq(block_size, 1.0 / sample_rate)
    resp = _kernel_response(spec, freqs)
    spectra = scipy.fft.fft(blocks, axis=1)
    spectra *= resp
    chunks = scipy.fft.ifft(spectra, axis=1, overwrite_x=True)
    out = chunks[:, after : after + hop].reshape(-1)
    return out[delay : delay + len(x)]


def _integrate(power: np.ndarray, starts_from: int, window: np.ndarray,
               shift: int, count: int) -> np.ndarray:
    """Windowed sums of ``power`` at ``count`` starts spaced by ``shift``.

    ``starts_from`` is the (possibly negative) start of the first
    window; out-of-range samples count as zero.
    """
    length = len(window)
    pad_left = max(0, -starts_from)
    pad_right = max(0, starts_from + (count - 1) * shift + length - len(power))
    if pad_left or pad_right:
        padded = np.concatenate(
            [np.zeros(pad_left), power, np.zeros(pad_right)]
        )
    else:
        padded = power
    first = starts_from + pad_left
    if length % shift == 0:
        # split each window into length/shift contiguous segments; the
        # windows then reuse the same shift-aligned segment sums, so the
        # strided matmul collapses to one small contiguous one
        k = length // shift
        total = (count + k - 1) * shift
        segments = padded[first : first + total].reshape(count + k - 1, shift)
        parts = segments @ window.reshape(k, shift).T
        out = parts[:count, 0].copy()
        for j in range(1, k):
            out += parts[j : j + count, j]
        return out
    views = sliding_window_view(padded, length)[first::shift]
    return views[:count] @ window


def si_features(
    audio: AudioBuffer, bank: FilterBank, cfg: SiConfig
) -> FeatureMatrix:
    """Log short-integration filter-bank energies.

    For each filter the whole signal is convolved with the kernel and
    ``log(max(log_floor, sum |y|^2 w))`` is taken under an
    ``integ_length`` window centered on each inherited frame center.
    Windows overhanging the signal edges integrate over zeros.  The
    energy coefficient is the log energy of the raw signal under the
    same (un-windowed) integration span.
    """
    _check_rates(audio, bank)
    x = audio.samples
    count = frame_count(len(x), cfg.align_frames_to)
    centers = cfg.align_frames_to.frame_centers(count)
    integ = cfg.integ_length
    win = window_samples(cfg.window, integ)
    first_start = int(centers[0]) - integ // 2

    block_size = cfg.block_size or default_block_size(bank)
    before, after = _bank_extents(bank)
    _check_block(block_size, before + after + 1)
    delays = [
        kernel_delay(spec, bank.sample_rate) if cfg.delay_compensation else 0
        for spec in bank.specs
    ]
    n_out = len(x) + max(delays)
    blocks, hop, num_blocks = _os_blocks(x, n_out, block_size, before, after)
    freqs = np.fft.fftfreq(block_size, 1.0 / bank.sample_rate)

    triangular = bank.kind is FilterKind.TRIANGULAR
    half = scipy.fft.rfft(blocks, axis=1)
    if triangular:
        # real, zero-phase kernels: stay in the half-spectrum domain
        spectra = half
        resp_freqs = np.abs(freqs[: block_size // 2 + 1])
    else:
        # build the full spectrum of the real input from its half
        spectra = np.empty((num_blocks, block_size), dtype=np.complex128)
        spectra[:, : block_size // 2 + 1] = half
        spectra[:, block_size // 2 + 1 :] = np.conj(
            half[:, block_size // 2 - 1 : 0 : -1]
        )
        resp_freqs = freqs

    band = np.empty((count, len(bank.specs)))
    buf = np.zeros_like(spectra)
    pbuf = np.empty((num_blocks, hop))
    scratch = None if triangular else np.empty((num_blocks, hop))
    filled = slice(0, 0)
    for k, spec in enumerate(bank.specs):
        resp = _kernel_response(spec, resp_freqs)
        # multiply only over the response's support (banded for
        # triangles, underflowed-to-zero tails for the others)
        nonzero = np.flatnonzero(resp)
        if nonzero.size and nonzero[-1] - nonzero[0] + 1 == nonzero.size:
            support = slice(nonzero[0], nonzero[-1] + 1)
        else:
            support = slice(0, spectra.shape[1])
        buf[:, filled] = 0.0
        np.multiply(spectra[:, support], resp[support], out=buf[:, support])
        filled = support
        if triangular:
            chunks = scipy.fft.irfft(buf, n=block_size, axis=1)
            valid = chunks[:, after : after + hop]
            np.multiply(valid, valid, out=pbuf)
        else:
            chunks = scipy.fft.ifft(buf, axis=1)
            valid = chunks[:, after : after + hop]
            np.multiply(valid.real, valid.real, out=pbuf)
            np.multiply(valid.imag, valid.imag, out=scratch)
            pbuf += scratch
        power = pbuf.reshape(-1)[:n_out]
        band[:, k] = _integrate(
            power[delays[k] :], first_start, win, cfg.shift, count
        )
    coeffs = np.log(np.maximum(cfg.log_floor, band))
    if cfg.include_energy:
        raw = _integrate(x**2, first_start, np.ones(integ), cfg.shift, count)
        energy = np.log(np.maximum(cfg.log_floor, raw))
        coeffs = np.column_stack([energy, coeffs])
        return FeatureMatrix(values=coeffs, col_layout="energy+static")
    return FeatureMatrix(values=coeffs, col_layout="static")
