"""HTTP service exposing feature computation, bank design, and benchmarks.

All endpoints speak JSON; audio and feature payloads travel base64-coded
inside the JSON body so clients need nothing beyond an HTTP library.
The CLI mounts this app in-process by default and can point at a remote
instance instead, so batch and server deployments share one code path.
"""

from __future__ import annotations

import base64
import io
import tempfile

import numpy as np
from fastapi import FastAPI
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .audio_io import AudioBuffer, dither, features_to_bytes, pre_emphasize, read_wav
from .bench import run_bench
from .filters import FilterKind, design_bank, freq_response
from .pipeline_si import SiConfig, si_features
from .pipeline_stft import FeatureMatrix, FrameConfig, stft_features
from .postproc import DeltaConfig, assemble
from .windows import WindowKind

__all__ = ["ComputeConfig", "DesignRequest", "BenchRequest", "compute_features", "create_app"]

_FILTER_ALIASES = {
    "tri": FilterKind.TRIANGULAR,
    "triangular": FilterKind.TRIANGULAR,
    "gabor": FilterKind.GABOR,
    "gammatone": FilterKind.GAMMATONE,
}


def _parse_filter(name: str) -> FilterKind:
    try:
        return _FILTER_ALIASES[name]
    except KeyError:
        raise ValueError(
            f"unknown filter {name!r}; expected one of {sorted(_FILTER_ALIASES)}"
        ) from None


class ComputeConfig(BaseModel):
    """Feature-computation settings; defaults give 40+1 log coefficients
    every 10 ms over 25 ms frames between 20 and 8000 Hz, with deltas."""

    filter: str = "tri"
    method: str = "stft"
    num_filters: int = 40
    low_hz: float = 20.0
    high_hz: float = 8000.0
    shift_ms: float = 10.0
    frame_ms: float = 25.0
    si_window_ms: float = 20.0
    window: str | None = None
    order: int = 4
    deltas: bool = True
    energy: bool = True
    dither: float = 1.0
    seed: int = 0
    preemph: float = 0.97
    format: str = "binary"


class ComputeRequest(BaseModel):
    config: ComputeConfig = ComputeConfig()
    wav_base64: str


class DesignRequest(BaseModel):
    filter: str = "tri"
    num_filters: int = 40
    low_hz: float = 20.0
    high_hz: float = 8000.0
    sample_rate: float = 16000.0
    order: int = 4
    grid_resolution: int = 512


class BenchRequest(BaseModel):
    duration_s: float = 60.0
    repetitions: int = 3
    num_filters: int = 40
    low_hz: float = 20.0
    high_hz: float = 8000.0
    sample_rate: float = 16000.0
    seed: int = 0


class InfoRequest(BaseModel):
    wav_base64: str


def compute_features(audio: AudioBuffer, cfg: ComputeConfig) -> FeatureMatrix:
    """Run the full feature chain on one utterance."""
    if cfg.method not in ("stft", "si"):
        raise ValueError(f"unknown method {cfg.method!r}; expected 'stft' or 'si'")
    kind = _parse_filter(cfg.filter)
    fs = audio.sample_rate
    bank = design_bank(kind, cfg.num_filters, cfg.low_hz, cfg.high_hz, fs, cfg.order)
    shift = int(round(cfg.shift_ms / 1000.0 * fs))
    frame_length = int(round(cfg.frame_ms / 1000.0 * fs))
    prepped = pre_emphasize(dither(audio, cfg.dither, cfg.seed), cfg.preemph)
    if cfg.method == "stft":
        window = WindowKind(cfg.window) if cfg.window else WindowKind.HAMMING
        frame_cfg = FrameConfig(
            shift=shift,
            frame_length=frame_length,
            window=window,
            include_energy=cfg.energy,
        )
        static = stft_features(prepped, bank, frame_cfg)
    else:
        window = WindowKind(cfg.window) if cfg.window else WindowKind.HANN
        frame_cfg = FrameConfig(
            shift=shift, frame_length=frame_length, include_energy=cfg.energy
        )
        si_cfg = SiConfig(
            align_frames_to=frame_cfg,
            integ_length=int(round(cfg.si_window_ms / 1000.0 * fs)),
            window=window,
            include_energy=cfg.energy,
        )
        static = si_features(prepped, bank, si_cfg)
    if cfg.deltas:
        return assemble(static, DeltaConfig())
    return static


def _serialize(matrix: FeatureMatrix, format: str) -> bytes:
    if format == "binary":
        return features_to_bytes(matrix)
    if format == "csv":
        buf = io.StringIO()
        np.savetxt(buf, matrix.values, fmt="%.17g", delimiter=",")
        return buf.getvalue().encode()
    raise ValueError(f"unknown feature format {format!r}")


def create_app() -> FastAPI:
    app = FastAPI(title="filtbank", version="0.1.0")

    @app.exception_handler(ValueError)
    async def value_error_handler(request, exc: ValueError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    def _decode_wav(wav_base64: str) -> AudioBuffer:
        data = base64.b64decode(wav_base64)
        with tempfile.NamedTemporaryFile(suffix=".wav") as tmp:
            tmp.write(data)
            tmp.flush()
            return read_wav(tmp.name)

    @app.post("/v1/compute")
    def compute(req: ComputeRequest):
        audio = _decode_wav(req.wav_base64)
        matrix = compute_features(audio, req.config)
        payload = _serialize(matrix, req.config.format)
        return {
            "rows": matrix.rows,
            "cols": matrix.cols,
            "format": req.config.format,
            "data_base64": base64.b64encode(payload).decode(),
        }

    @app.post("/v1/design")
    def design(req: DesignRequest):
        if req.grid_resolution < 1:
            raise ValueError(
                f"grid_resolution must be >= 1, got {req.grid_resolution}"
            )
        kind = _parse_filter(req.filter)
        bank = design_bank(
            kind, req.num_filters, req.low_hz, req.high_hz, req.sample_rate,
            req.order,
        )
        grid = np.linspace(0.0, req.sample_rate / 2.0, req.grid_resolution)
        columns = [grid]
        for spec in bank.specs:
            resp = freq_response(spec, grid)
            if kind is FilterKind.TRIANGULAR:
                power = resp.real
            else:
                power = np.abs(resp) ** 2
            columns.append(power)
        buf = io.StringIO()
        header = "hz," + ",".join(
            f"filter{k}" for k in range(len(bank.specs))
        )
        np.savetxt(
            buf, np.column_stack(columns), fmt="%.17g", delimiter=",",
            header=header, comments="",
        )
        return {
            "num_filters": len(bank.specs),
            "grid_resolution": req.grid_resolution,
            "csv": buf.getvalue(),
        }

    @app.post("/v1/bench")
    def bench(req: BenchRequest):
        results = run_bench(
            duration_s=req.duration_s,
            repetitions=req.repetitions,
            num_filters=req.num_filters,
            f_low=req.low_hz,
            f_high=req.high_hz,
            sample_rate=req.sample_rate,
            seed=req.seed,
        )
        return {
            "results": [
                {
                    "filter": r.kind.value,
                    "stft_seconds": r.stft_seconds,
                    "si_seconds": r.si_seconds,
                    "ratio": r.ratio,
                }
                for r in results
            ]
        }

    @app.post("/v1/info")
    def info(req: InfoRequest):
        audio = _decode_wav(req.wav_base64)
        return {
            "sample_rate": audio.sample_rate,
            "num_samples": len(audio),
            "duration_s": audio.duration,
        }

    return app
