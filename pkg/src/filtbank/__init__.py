"""Mel-scaled filter-bank speech features, frame-based and short-integration."""

from .audio_io import (
    AudioBuffer,
    dither,
    pre_emphasize,
    read_features,
    read_wav,
    write_features,
)
from .bench import BenchResult, run_bench
from .filters import (
    FilterBank,
    FilterKind,
    FilterSpec,
    ImpulseResponse,
    design_bank,
    freq_response,
    impulse_response,
    sqrt_response,
)
from .pipeline_si import SiConfig, default_block_size, overlap_save_convolve, si_features
from .pipeline_stft import (
    FeatureMatrix,
    FrameConfig,
    frame_count,
    stft_features,
    stft_features_timeform,
)
from .postproc import DeltaConfig, assemble, deltas
from .scales import CenterPoint, MelPoint, hz_to_mel, mel_to_hz, sample_centers
from .windows import WindowKind, auto_si_window_length, window_samples

__version__ = "0.1.0"
