"""Mel-scale conversions and Mel-uniform center frequency sampling.

The Mel scale used throughout is ``mel(f) = 1127 * ln(1 + f / 700)``,
which is the parameterization used by the common speech toolkits (the
``2595 * log10`` form is the same function in a different log base).
"""

from __future__ import annotations

import math
from typing import NamedTuple

__all__ = [
    "MelPoint",
    "hz_to_mel",
    "mel_to_hz",
    "sample_centers",
    "CenterPoint",
]

_MEL_SCALE = 1127.0
_MEL_BREAK_HZ = 700.0


class MelPoint(NamedTuple):
    """A frequency expressed both in Hertz and in Mel."""

    hz: float
    mel: float

    @classmethod
    def from_hz(cls, hz: float) -> "MelPoint":
        return cls(hz, hz_to_mel(hz))

    @classmethod
    def from_mel(cls, mel: float) -> "MelPoint":
        return cls(mel_to_hz(mel), mel)


class CenterPoint(NamedTuple):
    """A filter center with its neighboring design points, all in Hz.

    ``left_hz`` and ``right_hz`` are the Mel-grid points adjacent to the
    center.  They double as triangle vertices and as the half-power
    placement targets of the Gabor/Gammatone designs.
    """

    center_hz: float
    left_hz: float
    right_hz: float


def _check_nonneg(value: float, name: str) -> float:
    value = float(value)
    if not math.isfinite(value) or value < 0.0:
        raise ValueError(f"{name} must be finite and >= 0, got {value!r}")
    return value


def hz_to_mel(f: float) -> float:
    """Convert a frequency in Hertz to Mel."""
    f = _check_nonneg(f, "frequency")
    return _MEL_SCALE * math.log1p(f / _MEL_BREAK_HZ)


def mel_to_hz(m: float) -> float:
    """Convert a Mel value to Hertz (inverse of :func:`hz_to_mel`)."""
    m = _check_nonneg(m, "mel value")
    return _MEL_BREAK_HZ * math.expm1(m / _MEL_SCALE)


def sample_centers(
    num_filters: int, f_low: float, f_high: float
) -> list[CenterPoint]:
    """Place ``num_filters`` centers uniformly on the Mel scale.

    ``num_filters + 2`` Mel-uniform points are laid on
    ``[mel(f_low), mel(f_high)]``; the inner points are the centers and
    each center is reported with its two adjacent grid points in Hz.
    """
    if num_filters < 1:
        raise ValueError(f"num_filters must be >= 1, got {num_filters}")
    f_low = _check_nonneg(f_low, "f_low")
    f_high = _check_nonneg(f_high, "f_high")
    if f_low >= f_high:
        raise ValueError(
            f"need f_low < f_high, got f_low={f_low}, f_high={f_high}"
        )
    mel_low = hz_to_mel(f_low)
    mel_high = hz_to_mel(f_high)
    step = (mel_high - mel_low) / (num_filters + 1)
    pts = [mel_to_hz(mel_low + step * i) for i in range(num_filters + 2)]
    return [
        CenterPoint(pts[k], pts[k - 1], pts[k + 1])
        for k in range(1, num_filters + 1)
    ]
