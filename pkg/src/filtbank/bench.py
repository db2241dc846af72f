"""Wall-time comparison of the two computation orders.

Synthesizes seeded white noise, runs the full feature chain (dither,
pre-emphasis, filter-bank features, deltas) under both pipelines for
each filter kind, and reports median wall times and their ratio.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .audio_io import AudioBuffer, dither, pre_emphasize
from .filters import FilterKind, design_bank
from .pipeline_si import SiConfig, si_features
from .pipeline_stft import FrameConfig, stft_features
from .postproc import DeltaConfig, assemble

__all__ = ["BenchResult", "run_bench"]


@dataclass(frozen=True)
class BenchResult:
    """Median wall times in seconds for one filter kind."""

    kind: FilterKind
    stft_seconds: float
    si_seconds: float

    @property
    def ratio(self) -> float:
        return self.si_seconds / self.stft_seconds


def _synth_noise(duration_s: float, sample_rate: float, seed: int) -> AudioBuffer:
    rng = np.random.default_rng(seed)
    n = int(round(duration_s * sample_rate))
    samples = 1000.0 * rng.standard_normal(n)
    return AudioBuffer(samples=samples, sample_rate=sample_rate)


def run_bench(
    duration_s: float = 60.0,
    repetitions: int = 3,
    num_filters: int = 40,
    f_low: float = 20.0,
    f_high: float = 8000.0,
    sample_rate: float = 16000.0,
    seed: int = 0,
    kinds: tuple[FilterKind, ...] = tuple(FilterKind),
) -> list[BenchResult]:
    """Time both pipelines on seeded noise; returns one result per kind."""
    if duration_s < 1:
        raise ValueError(f"duration must be >= 1 s, got {duration_s}")
    if repetitions < 3:
        raise ValueError(f"repetitions must be >= 3, got {repetitions}")
    audio = _synth_noise(duration_s, sample_rate, seed)
    shift = int(round(0.010 * sample_rate))
    frame_cfg = FrameConfig(shift=shift, frame_length=int(round(0.025 * sample_rate)))
    si_cfg = SiConfig(align_frames_to=frame_cfg)
    delta_cfg = DeltaConfig()

    def chain_stft(bank):
        prepped = pre_emphasize(dither(audio, 1.0, seed))
        return assemble(stft_features(prepped, bank, frame_cfg), delta_cfg)

    def chain_si(bank):
        prepped = pre_emphasize(dither(audio, 1.0, seed))
        return assemble(si_features(prepped, bank, si_cfg), delta_cfg)

    results = []
    for kind in kinds:
        bank = design_bank(kind, num_filters, f_low, f_high, sample_rate)
        # one untimed pass so first-call setup (FFT plans, allocator
        # warmup) does not bias either pipeline's median
        chain_stft(bank)
        chain_si(bank)
        times = {"stft": [], "si": []}
        for _ in range(repetitions):
            start = time.perf_counter()
            chain_stft(bank)
            times["stft"].append(time.perf_counter() - start)
            start = time.perf_counter()
            chain_si(bank)
            times["si"].append(time.perf_counter() - start)
        results.append(
            BenchResult(
                kind=FilterKind(kind),
                stft_seconds=float(np.median(times["stft"])),
                si_seconds=float(np.median(times["si"])),
            )
        )
    return results
