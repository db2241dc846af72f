"""Window functions and integration-window sizing.

Windows are symmetric (``w[i] == w[L-1-i]``) and normalized to a peak of
exactly 1.  They serve as integration kernels rather than spectral
tapers, so the symmetric form is used instead of the periodic one.
"""

from __future__ import annotations

import math
from enum import Enum

import numpy as np

__all__ = ["WindowKind", "window_samples", "auto_si_window_length"]


class WindowKind(str, Enum):
    RECTANGULAR = "rectangular"
    HANN = "hann"
    HAMMING = "hamming"
    TRIANGULAR = "triangular"


def window_samples(kind: WindowKind, length: int) -> np.ndarray:
    """Return ``length`` samples of the window, peak-normalized to 1."""
    if length < 1:
        raise ValueError(f"window length must be >= 1, got {length}")
    kind = WindowKind(kind)
    if kind is WindowKind.RECTANGULAR or length == 1:
        return np.ones(length)
    i = np.arange(length)
    phase = 2.0 * np.pi * i / (length - 1)
    if kind is WindowKind.HANN:
        w = 0.5 * (1.0 - np.cos(phase))
    elif kind is WindowKind.HAMMING:
        w = 0.54 - 0.46 * np.cos(phase)
    else:  # triangular (Bartlett)
        w = 1.0 - np.abs(2.0 * i - (length - 1)) / (length - 1)
    # mirror the first half so symmetry is exact to the last bit
    w[length - 1 - np.arange(length // 2)] = w[: length // 2]
    peak = w.max()
    if peak == 0.0:
        # length-2 Hann/triangular are all zeros; fall back to ones
        return np.ones(length)
    # even lengths have no sample on the analytic maximum; rescale
    return w / peak


# Main-lobe widths of the window frequency response, in units of 1/T Hz
# for a window of duration T seconds.  "zero" is the first zero crossing,
# "half" the half-power (-3 dB) width.
_LOBE_ZERO = {
    WindowKind.RECTANGULAR: 1.0,
    WindowKind.HANN: 2.0,
    WindowKind.HAMMING: 2.0,
    WindowKind.TRIANGULAR: 2.0,
}
_LOBE_HALF = {
    WindowKind.RECTANGULAR: 0.886,
    WindowKind.HANN: 1.44,
    WindowKind.HAMMING: 1.30,
    WindowKind.TRIANGULAR: 1.28,
}


def auto_si_window_length(
    kind: WindowKind, shift: int, criterion: str, sample_rate: float
) -> int:
    """Smallest window length whose main lobe fits under 1/(2*shift).

    The frame shift bounds the representable modulation frequency at
    ``1/(2*delta)`` Hz (``delta`` = shift in seconds); the window length
    is grown until the chosen main-lobe bandwidth measure drops to that
    limit.  Closed-form lobe widths are used, so the sample rate cancels
    out of the criterion.
    """
    if shift < 1:
        raise ValueError(f"shift must be >= 1, got {shift}")
    kind = WindowKind(kind)
    if criterion == "zero-crossing":
        width = _LOBE_ZERO[kind]
    elif criterion == "-3dB":
        width = _LOBE_HALF[kind]
    else:
        raise ValueError(
            f"unknown criterion {criterion!r}; expected 'zero-crossing' or '-3dB'"
        )
    # width * fs / T <= fs / (2 * shift)  =>  T >= 2 * width * shift
    return math.ceil(2.0 * width * shift)
