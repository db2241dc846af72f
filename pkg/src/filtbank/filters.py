"""Band-pass filter definitions, discretized responses, and bank design.

Three filter families share one Mel-spaced layout:

* triangular -- real overlapping triangles with vertices on the Mel grid;
* Gabor -- Gaussian envelope with a complex carrier, real Gaussian
  frequency response;
* Gammatone -- causal ``t**(n-1) * exp(-a*t)`` envelope with a complex
  carrier, skewed time response and symmetric magnitude response.

All filters are normalized so the peak magnitude of the frequency
response is exactly 1, which makes the three families commensurable and
keeps pure-tone tests analytic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.optimize import brentq

from .scales import CenterPoint, sample_centers

__all__ = [
    "FilterKind",
    "FilterSpec",
    "FilterBank",
    "ImpulseResponse",
    "design_bank",
    "freq_response",
    "sqrt_response",
    "impulse_response",
]

_TWO_PI = 2.0 * math.pi

# Envelope threshold below which a filter's time response is considered
# negligible for overlap-save block sizing.  Tails beyond the sizing
# extents wrap into kept samples, so this is kept well below the 1e-6
# accuracy target; the extra length is cheap for exponential envelopes.
# The triangular square-root kernel decays only polynomially (its
# spectrum has square-root cusps), so it gets a looser empirical bound.
_SIZING_THRESHOLD = 1e-8
_TRI_SIZING_FACTOR = 18.0


class FilterKind(str, Enum):
    TRIANGULAR = "triangular"
    GABOR = "gabor"
    GAMMATONE = "gammatone"


@dataclass(frozen=True)
class FilterSpec:
    """One analytic band-pass filter.

    ``xi`` is the center frequency in rad/s.  ``sigma_or_alpha`` holds
    the Gaussian time width in seconds for Gabor and the bandwidth
    parameter in 1/s for Gammatone (unused for triangular).  ``left_hz``
    and ``right_hz`` are the triangle vertices (triangular only).
    ``norm`` is the time-domain amplitude giving a unit-peak frequency
    response.
    """

    kind: FilterKind
    xi: float
    sigma_or_alpha: float = 0.0
    order: int = 4
    left_hz: float = 0.0
    right_hz: float = 0.0
    norm: float = 1.0

    @property
    def center_hz(self) -> float:
        return self.xi / _TWO_PI


@dataclass(frozen=True)
class FilterBank:
    """An ordered collection of same-kind filters sharing a design."""

    specs: tuple[FilterSpec, ...]
    sample_rate: float
    f_low: float
    f_high: float
    points: tuple[CenterPoint, ...]

    @property
    def kind(self) -> FilterKind:
        return self.specs[0].kind

    @property
    def num_filters(self) -> int:
        return len(self.specs)


@dataclass(frozen=True)
class ImpulseResponse:
    """Sampled time response of a filter.

    ``samples[j]`` is the response at sample index ``start + j`` on the
    input time grid; ``peak_delay`` is the index of the envelope peak
    within ``samples``.  Gabor and triangular kernels are symmetric about
    the peak (``start = -peak_delay``); Gammatone is causal
    (``start >= 0``).
    """

    samples: np.ndarray
    start: int
    peak_delay: int

    def __len__(self) -> int:
        return len(self.samples)


def design_bank(
    kind: FilterKind,
    num_filters: int,
    f_low: float,
    f_high: float,
    sample_rate: float,
    order: int = 4,
) -> FilterBank:
    """Design a Mel-spaced bank of ``num_filters`` filters.

    Triangular filters take their vertices from the neighboring Mel grid
    points.  Gabor and Gammatone filters are sized so the power response
    is exactly one half at the nearer adjacent grid point: with ``dw``
    the angular distance to that point, Gabor uses
    ``sigma = sqrt(ln 2) / dw`` and Gammatone
    ``alpha = dw / sqrt(2**(1/n) - 1)``.  Edge filters use the distance
    to their single interior neighbor.
    """
    if sample_rate <= 0:
        raise ValueError(f"sample_rate must be positive, got {sample_rate}")
    nyquist = sample_rate / 2.0
    if f_high > nyquist:
        raise ValueError(
            f"f_high={f_high} exceeds the Nyquist frequency {nyquist}"
        )
    if order < 1:
        raise ValueError(f"order must be >= 1, got {order}")
    kind = FilterKind(kind)
    points = sample_centers(num_filters, f_low, f_high)

    specs = []
    for k, pt in enumerate(points):
        xi = _TWO_PI * pt.center_hz
        if kind is FilterKind.TRIANGULAR:
            specs.append(
                FilterSpec(
                    kind=kind,
                    xi=xi,
                    left_hz=pt.left_hz,
                    right_hz=pt.right_hz,
                    norm=1.0,
                )
            )
            continue
        left_d = _TWO_PI * (pt.center_hz - pt.left_hz)
        right_d = _TWO_PI * (pt.right_hz - pt.center_hz)
        if num_filters == 1:
            dw = min(left_d, right_d)
        elif k == 0:
            dw = right_d  # only the right neighbor is interior
        elif k == num_filters - 1:
            dw = left_d
        else:
            dw = min(left_d, right_d)
        if kind is FilterKind.GABOR:
            sigma = math.sqrt(math.log(2.0)) / dw
            norm = 1.0 / (sigma * math.sqrt(_TWO_PI))
            specs.append(
                FilterSpec(kind=kind, xi=xi, sigma_or_alpha=sigma, norm=norm)
            )
        else:
            alpha = dw / math.sqrt(2.0 ** (1.0 / order) - 1.0)
            norm = alpha**order / math.factorial(order - 1)
            specs.append(
                FilterSpec(
                    kind=kind,
                    xi=xi,
                    sigma_or_alpha=alpha,
                    order=order,
                    norm=norm,
                )
            )
    return FilterBank(
        specs=tuple(specs),
        sample_rate=float(sample_rate),
        f_low=float(f_low),
        f_high=float(f_high),
        points=tuple(points),
    )


def _signed_response(spec: FilterSpec, freqs_hz: np.ndarray) -> np.ndarray:
    """Unit-peak frequency response at (possibly negative) frequencies."""
    freqs_hz = np.asarray(freqs_hz, dtype=np.float64)
    omega = _TWO_PI * freqs_hz
    if spec.kind is FilterKind.TRIANGULAR:
        return _triangle_weights(spec, np.abs(freqs_hz)).astype(np.complex128)
    if spec.kind is FilterKind.GABOR:
        s = spec.sigma_or_alpha
        return np.exp(-0.5 * (s * (omega - spec.xi)) ** 2).astype(
            np.complex128
        )
    alpha = spec.sigma_or_alpha
    return (alpha / (alpha + 1j * (omega - spec.xi))) ** spec.order


def _triangle_weights(spec: FilterSpec, freqs_hz: np.ndarray) -> np.ndarray:
    center = spec.center_hz
    w = np.zeros_like(freqs_hz)
    up = (freqs_hz >= spec.left_hz) & (freqs_hz <= center)
    dn = (freqs_hz > center) & (freqs_hz <= spec.right_hz)
    if center > spec.left_hz:
        w[up] = (freqs_hz[up] - spec.left_hz) / (center - spec.left_hz)
    if spec.right_hz > center:
        w[dn] = (spec.right_hz - freqs_hz[dn]) / (spec.right_hz - center)
    return w


def _kernel_response(spec: FilterSpec, freqs_hz: np.ndarray) -> np.ndarray:
    """Transfer function of the convolution kernel at signed frequencies.

    For Gabor and Gammatone this is the complex filter itself; for
    triangular filters, whose weights act on the power spectrum, the
    kernel is the point-wise square root of the triangle.
    """
    if spec.kind is FilterKind.TRIANGULAR:
        freqs_hz = np.asarray(freqs_hz, dtype=np.float64)
        return np.sqrt(_triangle_weights(spec, np.abs(freqs_hz)))
    return _signed_response(spec, freqs_hz)


def freq_response(spec: FilterSpec, freqs) -> np.ndarray:
    """Evaluate the unit-peak frequency response at frequencies in Hz.

    Triangular filters return their (real) triangle weights; Gabor and
    Gammatone return the complex analytic responses.
    """
    freqs = np.asarray(freqs, dtype=np.float64)
    if not np.all(np.isfinite(freqs)) or np.any(freqs < 0):
        raise ValueError("frequencies must be finite and >= 0")
    return _signed_response(spec, freqs)


def sqrt_response(spec: FilterSpec, freqs) -> np.ndarray:
    """Point-wise square root of the triangle weights (triangular only)."""
    if spec.kind is not FilterKind.TRIANGULAR:
        raise ValueError(
            f"sqrt_response applies to triangular filters, got {spec.kind.value}"
        )
    freqs = np.asarray(freqs, dtype=np.float64)
    if not np.all(np.isfinite(freqs)) or np.any(freqs < 0):
        raise ValueError("frequencies must be finite and >= 0")
    return np.sqrt(_triangle_weights(spec, freqs))


def _gammatone_envelope_peak(spec: FilterSpec) -> tuple[float, float]:
    """Return (peak time, peak envelope value) of t**(n-1)*exp(-a*t)."""
    alpha = spec.sigma_or_alpha
    n = spec.order
    if n == 1:
        return 0.0, 1.0
    t_star = (n - 1) / alpha
    return t_star, t_star ** (n - 1) * math.exp(-(n - 1))


def _gammatone_bounds(spec: FilterSpec, threshold: float) -> tuple[float, float]:
    """Times where the Gammatone envelope crosses threshold * peak."""
    alpha = spec.sigma_or_alpha
    n = spec.order
    t_star, peak = _gammatone_envelope_peak(spec)
    if threshold >= 1.0:
        return t_star, t_star
    env = lambda t: t ** (n - 1) * math.exp(-alpha * t) - threshold * peak
    if n == 1:
        return 0.0, math.log(1.0 / threshold) / alpha
    t_lo = brentq(env, 0.0, t_star)
    hi = t_star + (math.log(1.0 / threshold) + 1.0) / alpha
    while env(hi) > 0:
        hi += hi - t_star
    t_hi = brentq(env, t_star, hi)
    return t_lo, t_hi


def _triangular_kernel(
    spec: FilterSpec, sample_rate: float, threshold: float
) -> ImpulseResponse:
    """Symmetric square-root-triangle kernel via a dense inverse DFT.

    The grid is grown until the truncated support fits well inside the
    period, so periodization does not contaminate the kept samples.
    """
    size = 1 << 14
    while True:
        f = np.fft.fftfreq(size, 1.0 / sample_rate)
        resp = np.sqrt(_triangle_weights(spec, np.abs(f)))
        kern = np.fft.fftshift(np.fft.ifft(resp))
        # analytic (one-sided) version gives a smooth envelope
        analytic = np.where(f >= 0, 2.0 * resp, 0.0)
        analytic[0] = resp[0]
        env = np.abs(np.fft.fftshift(np.fft.ifft(analytic)))
        peak = env.max()
        above = np.nonzero(env >= threshold * peak)[0]
        half = max(abs(above[0] - size // 2), abs(above[-1] - size // 2))
        if half <= 0.4 * (size // 2) or size >= (1 << 22):
            break
        size <<= 1
    mid = size // 2
    samples = kern[mid - half : mid + half + 1].astype(np.complex128)
    return ImpulseResponse(samples=samples, start=-half, peak_delay=half)


def impulse_response(
    spec: FilterSpec, sample_rate: float, trunc_threshold: float = 1e-5
) -> ImpulseResponse:
    """Sample the filter's convolution kernel in the time domain.

    The kernel is truncated where its analytic envelope falls below
    ``trunc_threshold`` times the envelope peak.  Samples are scaled by
    the sampling interval so their DFT approximates the unit-peak
    frequency response.  For triangular filters the kernel realized here
    is the square-root filter actually used in convolution.
    """
    if not 0.0 < trunc_threshold <= 1.0:
        raise ValueError(
            f"trunc_threshold must be in (0, 1], got {trunc_threshold}"
        )
    fs = float(sample_rate)
    if spec.kind is FilterKind.TRIANGULAR:
        return _triangular_kernel(spec, fs, trunc_threshold)
    if spec.kind is FilterKind.GABOR:
        s = spec.sigma_or_alpha
        half = int(round(s * math.sqrt(2.0 * math.log(1.0 / trunc_threshold)) * fs))
        t = np.arange(-half, half + 1) / fs
        samples = (
            spec.norm
            / fs
            * np.exp(-0.5 * (t / s) ** 2)
            * np.exp(1j * spec.xi * t)
        )
        return ImpulseResponse(samples=samples, start=-half, peak_delay=half)
    # gammatone
    alpha = spec.sigma_or_alpha
    n = spec.order
    t_star, _ = _gammatone_envelope_peak(spec)
    peak_idx = int(round(t_star * fs))
    t_lo, t_hi = _gammatone_bounds(spec, trunc_threshold)
    m_start = min(int(math.ceil(t_lo * fs)), peak_idx)
    m_end = max(int(math.floor(t_hi * fs)), peak_idx)
    t = np.arange(m_start, m_end + 1) / fs
    samples = (
        spec.norm
        / fs
        * t ** (n - 1)
        * np.exp(-alpha * t)
        * np.exp(1j * spec.xi * t)
    )
    return ImpulseResponse(
        samples=samples, start=m_start, peak_delay=peak_idx - m_start
    )


def kernel_sizing_length(spec: FilterSpec, sample_rate: float) -> tuple[int, int]:
    """Anticausal and causal extents assumed by overlap-save blocking.

    Returns ``(before, after)`` in samples: the kernel is treated as
    negligible outside ``[-before, after]``.  Gabor and Gammatone use the
    exponential-envelope truncation; the polynomially decaying triangular
    kernel uses an empirically calibrated bandwidth bound.
    """
    fs = float(sample_rate)
    if spec.kind is FilterKind.TRIANGULAR:
        bw = min(spec.center_hz - spec.left_hz, spec.right_hz - spec.center_hz)
        half = int(math.ceil(_TRI_SIZING_FACTOR * fs / bw))
        return half, half
    if spec.kind is FilterKind.GABOR:
        s = spec.sigma_or_alpha
        half = int(
            round(s * math.sqrt(2.0 * math.log(1.0 / _SIZING_THRESHOLD)) * fs)
        )
        return half, half
    _, t_hi = _gammatone_bounds(spec, _SIZING_THRESHOLD)
    return 0, int(math.floor(t_hi * fs))


def kernel_delay(spec: FilterSpec, sample_rate: float) -> int:
    """Group delay of the kernel's envelope peak, in samples.

    Gabor and triangular kernels are realized zero-phase, so only the
    causal Gammatone carries a delay.
    """
    if spec.kind is FilterKind.GAMMATONE:
        t_star, _ = _gammatone_envelope_peak(spec)
        return int(round(t_star * sample_rate))
    return 0
