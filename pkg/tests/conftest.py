"""Shared fixtures and independent numerical oracles for the test suite."""

import wave

import numpy as np
import pytest

from filtbank import AudioBuffer
from filtbank.filters import (
    FilterKind,
    _kernel_response,
    impulse_response,
    kernel_delay,
)


def write_wav(path, samples, sample_rate=16000):
    """Write int16 mono PCM samples to a WAV file."""
    data = np.asarray(samples)
    with wave.open(str(path), "wb") as fh:
        fh.setnchannels(1)
        fh.setsampwidth(2)
        fh.setframerate(int(sample_rate))
        fh.writeframes(data.astype("<i2").tobytes())


def noise_audio(num_samples, sample_rate=16000.0, seed=0, scale=100.0):
    rng = np.random.default_rng(seed)
    return AudioBuffer(
        samples=scale * rng.standard_normal(num_samples),
        sample_rate=sample_rate,
    )


def tone_audio(freq_hz, num_samples, sample_rate=16000.0, amplitude=1000.0):
    t = np.arange(num_samples) / sample_rate
    return AudioBuffer(
        samples=amplitude * np.sin(2 * np.pi * freq_hz * t),
        sample_rate=sample_rate,
    )


def direct_convolve(x, spec, sample_rate, delay_compensation=True):
    """Time-domain convolution oracle, independent of the blocked FFT path.

    Gabor/Gammatone use the truncated sampled kernel; the triangular
    square-root kernel decays too slowly to truncate tightly, so its
    oracle kernel comes from one dense inverse DFT of the response,
    kept out to the largest lag that can connect input to output.
    """
    x = np.asarray(x, dtype=np.float64)
    if spec.kind is FilterKind.TRIANGULAR:
        size = 1 << 21
        freqs = np.fft.fftfreq(size, 1.0 / sample_rate)
        kern = np.fft.ifft(_kernel_response(spec, freqs))
        lags = np.arange(-(len(x) - 1), len(x))
        samples = kern[lags % size]
        start = -(len(x) - 1)
    else:
        ir = impulse_response(spec, sample_rate, 1e-10)
        samples, start = ir.samples, ir.start
    full = np.convolve(x, samples)
    delay = kernel_delay(spec, sample_rate) if delay_compensation else 0
    m0 = delay - start
    out = np.zeros(len(x), dtype=np.complex128)
    lo = max(0, -m0)
    hi = min(len(x), len(full) - m0)
    out[lo:hi] = full[m0 + lo : m0 + hi]
    return out


def dft_band_energies(frame, window, dft_size, bank):
    """Brute-force weighted power-spectrum sums via an explicit DFT matrix."""
    from filtbank.filters import _signed_response, _triangle_weights

    g = np.zeros(dft_size)
    g[: len(frame)] = frame * window
    m = np.arange(dft_size)
    dft = np.exp(-2j * np.pi * np.outer(m, m) / dft_size)
    spectrum = dft @ g
    power = np.abs(spectrum) ** 2
    signed_hz = np.fft.fftfreq(dft_size, 1.0 / bank.sample_rate)
    energies = []
    for spec in bank.specs:
        if spec.kind is FilterKind.TRIANGULAR:
            w = _triangle_weights(spec, np.abs(signed_hz))
        else:
            w = np.abs(_signed_response(spec, signed_hz)) ** 2
        energies.append(float(w @ power))
    return np.array(energies)


@pytest.fixture
def tmp_wav(tmp_path):
    rng = np.random.default_rng(42)
    path = tmp_path / "utt.wav"
    write_wav(path, 3000.0 * rng.standard_normal(16000))
    return path
