"""Audio ingestion, preprocessing, and feature serialization.

Audio samples are kept in integer units (the native 16-bit range,
roughly +/-32768) rather than normalized to +/-1, so a dither amount of
1.0 corresponds to one least-significant bit of 16-bit audio.

Features are serialized either as CSV (one frame per line, full
round-trip precision) or in a small binary container::

    bytes 0..3   magic "FBK1"
    bytes 4..7   rows, unsigned 32-bit little-endian
    bytes 8..11  cols, unsigned 32-bit little-endian
    bytes 12..   rows * cols float32 little-endian, row-major
"""

from __future__ import annotations

import struct
import wave
from dataclasses import dataclass

import numpy as np

__all__ = [
    "AudioBuffer",
    "read_wav",
    "dither",
    "pre_emphasize",
    "features_to_bytes",
    "write_features",
    "read_features",
]

_MAGIC = b"FBK1"
_HEADER = struct.Struct("<II")


@dataclass(frozen=True)
class AudioBuffer:
    """A single-channel signal in integer-sample units."""

    samples: np.ndarray
    sample_rate: float

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1 or samples.size == 0:
            raise ValueError("audio must be a non-empty 1-D sample sequence")
        if not np.all(np.isfinite(samples)):
            raise ValueError("audio samples must be finite")
        if self.sample_rate <= 0:
            raise ValueError(
                f"sample_rate must be positive, got {self.sample_rate}"
            )
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate", float(self.sample_rate))

    @property
    def duration(self) -> float:
        return len(self.samples) / self.sample_rate

    def __len__(self) -> int:
        return len(self.samples)


def read_wav(path) -> AudioBuffer:
    """Read a mono 16-bit PCM RIFF/WAVE file into integer-unit samples."""
    try:
        with wave.open(str(path), "rb") as wav:
            channels = wav.getnchannels()
            if channels != 1:
                raise ValueError(
                    f"{path}: mono required, file has {channels} channels"
                )
            width = wav.getsampwidth()
            comp = wav.getcomptype()
            if width != 2 or comp != "NONE":
                raise ValueError(
                    f"{path}: unsupported format (need 16-bit PCM, got "
                    f"{8 * width}-bit {comp})"
                )
            rate = wav.getframerate()
            raw = wav.readframes(wav.getnframes())
    except (wave.Error, EOFError) as exc:
        raise ValueError(f"{path}: malformed WAV file: {exc}") from exc
    samples = np.frombuffer(raw, dtype="<i2").astype(np.float64)
    return AudioBuffer(samples=samples, sample_rate=float(rate))


def dither(audio: AudioBuffer, amount: float = 1.0, seed: int = 0) -> AudioBuffer:
    """Add seeded zero-mean Gaussian noise of standard deviation ``amount``.

    ``amount`` is in integer-sample units; 0 returns the input unchanged.
    """
    if amount < 0:
        raise ValueError(f"dither amount must be >= 0, got {amount}")
    if amount == 0:
        return audio
    rng = np.random.default_rng(seed)
    noise = amount * rng.standard_normal(len(audio.samples))
    return AudioBuffer(
        samples=audio.samples + noise, sample_rate=audio.sample_rate
    )


def pre_emphasize(audio: AudioBuffer, coeff: float = 0.97) -> AudioBuffer:
    """First-difference high-pass: y[t] = x[t] - coeff * x[t-1].

    The first sample uses itself as its predecessor
    (``y[0] = x[0] - coeff * x[0]``).
    """
    if not 0.0 <= coeff < 1.0:
        raise ValueError(f"pre-emphasis coeff must be in [0, 1), got {coeff}")
    x = audio.samples
    y = x - coeff * np.concatenate(([x[0]], x[:-1]))
    return AudioBuffer(samples=y, sample_rate=audio.sample_rate)


def features_to_bytes(m) -> bytes:
    """FBK1 binary encoding of a feature matrix."""
    values = np.asarray(m.values, dtype=np.float64)
    if values.ndim != 2 or values.size == 0:
        raise ValueError("feature matrix must be non-empty and 2-D")
    if not np.all(np.isfinite(values)):
        raise ValueError("feature matrix must be finite")
    rows, cols = values.shape
    return _MAGIC + _HEADER.pack(rows, cols) + values.astype("<f4").tobytes()


def write_features(m, path, format: str = "binary") -> None:
    """Serialize a feature matrix as FBK1 binary or full-precision CSV."""
    if format == "binary":
        with open(path, "wb") as fh:
            fh.write(features_to_bytes(m))
    elif format == "csv":
        values = np.asarray(m.values, dtype=np.float64)
        if values.ndim != 2 or values.size == 0:
            raise ValueError("feature matrix must be non-empty and 2-D")
        np.savetxt(path, values, fmt="%.17g", delimiter=",")
    else:
        raise ValueError(f"unknown feature format {format!r}")


def read_features(path, format: str = "binary"):
    """Read a feature matrix written by :func:`write_features`."""
    from .pipeline_stft import FeatureMatrix

    if format == "csv":
        values = np.loadtxt(path, delimiter=",", ndmin=2)
        return FeatureMatrix(values=values, col_layout="unknown")
    if format != "binary":
        raise ValueError(f"unknown feature format {format!r}")
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:4] != _MAGIC:
        raise ValueError(f"{path}: bad magic {data[:4]!r}, expected {_MAGIC!r}")
    if len(data) < 12:
        raise ValueError(f"{path}: truncated header")
    rows, cols = _HEADER.unpack(data[4:12])
    payload = data[12:]
    expected = rows * cols * 4
    if len(payload) != expected:
        raise ValueError(
            f"{path}: payload is {len(payload)} bytes, header implies {expected}"
        )
    values = (
        np.frombuffer(payload, dtype="<f4").astype(np.float64).reshape(rows, cols)
    )
    return FeatureMatrix(values=values, col_layout="unknown")
