"""Batch command-line front end.

Every command is a thin client of the HTTP service: by default the
service app is mounted in-process (no network), and ``--server URL``
points the same commands at a remote instance, so batch and server
deployments produce identical results.
"""

from __future__ import annotations

import asyncio
import base64
import hashlib
import sys
from pathlib import Path

import click
import httpx

from .service import create_app

_FILTER_CHOICES = ["tri", "gabor", "gammatone"]
_WINDOW_CHOICES = ["rectangular", "hann", "hamming", "triangular"]


class _Client:
    """POSTs to a remote service, or to the app mounted in-process."""

    def __init__(self, server: str | None):
        self.server = server
        self.app = None if server else create_app()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        return False

    def post(self, path: str, payload: dict) -> dict:
        if self.server:
            resp = httpx.post(
                self.server.rstrip("/") + path, json=payload, timeout=600.0
            )
        else:
            resp = asyncio.run(self._post_inprocess(path, payload))
        if resp.status_code != 200:
            try:
                detail = resp.json().get("detail", resp.text)
            except ValueError:
                detail = resp.text
            raise click.ClickException(str(detail))
        return resp.json()

    async def _post_inprocess(self, path: str, payload: dict):
        transport = httpx.ASGITransport(app=self.app)
        async with httpx.AsyncClient(
            transport=transport, base_url="http://filtbank.local", timeout=600.0
        ) as client:
            return await client.post(path, json=payload)


def _client(server: str | None) -> _Client:
    return _Client(server)


def utterance_seed(seed: int, utterance_id: str) -> int:
    """Stable per-utterance seed, independent of batch order."""
    digest = hashlib.sha256(f"{seed}:{utterance_id}".encode()).digest()
    return int.from_bytes(digest[:8], "little")


@click.group()
def main():
    """Filter-bank speech features: compute, inspect, benchmark."""


_compute_options = [
    click.option("--filter", "filter_", type=click.Choice(_FILTER_CHOICES),
                 default="tri", show_default=True, help="Filter kind."),
    click.option("--method", type=click.Choice(["stft", "si"]), default="stft",
                 show_default=True, help="Computation order."),
    click.option("--num-filters", default=40, show_default=True),
    click.option("--low-hz", default=20.0, show_default=True),
    click.option("--high-hz", default=8000.0, show_default=True),
    click.option("--shift-ms", default=10.0, show_default=True),
    click.option("--frame-ms", default=25.0, show_default=True),
    click.option("--si-window-ms", default=20.0, show_default=True),
    click.option("--window", type=click.Choice(_WINDOW_CHOICES), default=None,
                 help="Frame window (stft) or integration window (si); "
                      "defaults to hamming / hann respectively."),
    click.option("--order", default=4, show_default=True,
                 help="Gammatone order."),
    click.option("--deltas/--no-deltas", default=True, show_default=True),
    click.option("--energy/--no-energy", default=True, show_default=True),
    click.option("--dither", default=1.0, show_default=True),
    click.option("--seed", default=0, show_default=True),
    click.option("--preemph", default=0.97, show_default=True),
    click.option("--format", "format_", type=click.Choice(["binary", "csv"]),
                 default="binary", show_default=True),
]


def _add_options(options):
    def wrap(func):
        for option in reversed(options):
            func = option(func)
        return func
    return wrap


def _compute_one(client, wav_path: Path, out_path: Path, config: dict) -> tuple[int, int]:
    payload = {
        "config": config,
        "wav_base64": base64.b64encode(wav_path.read_bytes()).decode(),
    }
    result = client.post("/v1/compute", payload)
    out_path.write_bytes(base64.b64decode(result["data_base64"]))
    return result["rows"], result["cols"]


@main.command()
@click.argument("input_path", type=click.Path(exists=True, path_type=Path))
@click.option("--output", "-o", type=click.Path(path_type=Path), default=None,
              help="Output feature file (default: input with .fbk/.csv suffix).")
@click.option("--list", "batch", is_flag=True,
              help="INPUT_PATH is a list of 'utterance-id wav-path' lines.")
@click.option("--output-dir", type=click.Path(path_type=Path), default=None,
              help="Directory for batch outputs (default: alongside inputs).")
@click.option("--server", default=None, help="Remote service URL.")
@_add_options(_compute_options)
def compute(input_path, output, batch, output_dir, server, filter_, method,
            num_filters, low_hz, high_hz, shift_ms, frame_ms, si_window_ms,
            window, order, deltas, energy, dither, seed, preemph, format_):
    """Compute features for one WAV file (or a batch list)."""
    config = {
        "filter": filter_, "method": method, "num_filters": num_filters,
        "low_hz": low_hz, "high_hz": high_hz, "shift_ms": shift_ms,
        "frame_ms": frame_ms, "si_window_ms": si_window_ms, "window": window,
        "order": order, "deltas": deltas, "energy": energy, "dither": dither,
        "seed": seed, "preemph": preemph, "format": format_,
    }
    suffix = ".fbk" if format_ == "binary" else ".csv"
    with _client(server) as client:
        if not batch:
            out = output or input_path.with_suffix(suffix)
            rows, cols = _compute_one(client, input_path, out, config)
            click.echo(f"{rows} {cols} {out}")
            return
        for line in input_path.read_text().splitlines():
            line = line.strip()
            if not line:
                continue
            try:
                utt_id, wav = line.split(None, 1)
            except ValueError:
                raise click.ClickException(
                    f"bad list line (need 'id path'): {line!r}"
                )
            wav_path = Path(wav)
            out_dir = output_dir or wav_path.parent
            out_dir.mkdir(parents=True, exist_ok=True)
            out = out_dir / (utt_id + suffix)
            utt_config = dict(config, seed=utterance_seed(seed, utt_id))
            rows, cols = _compute_one(client, wav_path, out, utt_config)
            click.echo(f"{utt_id} {rows} {cols} {out}")


@main.command()
@click.option("--filter", "filter_", type=click.Choice(_FILTER_CHOICES),
              default="tri", show_default=True)
@click.option("--num-filters", default=40, show_default=True)
@click.option("--low-hz", default=20.0, show_default=True)
@click.option("--high-hz", default=8000.0, show_default=True)
@click.option("--sample-rate", default=16000.0, show_default=True)
@click.option("--order", default=4, show_default=True)
@click.option("--grid-resolution", default=512, show_default=True,
              help="Number of frequency grid points.")
@click.option("--output", "-o", type=click.Path(path_type=Path), default=None)
@click.option("--server", default=None, help="Remote service URL.")
def design(filter_, num_filters, low_hz, high_hz, sample_rate, order,
           grid_resolution, output, server):
    """Dump per-filter power responses on a frequency grid as CSV."""
    payload = {
        "filter": filter_, "num_filters": num_filters, "low_hz": low_hz,
        "high_hz": high_hz, "sample_rate": sample_rate, "order": order,
        "grid_resolution": grid_resolution,
    }
    with _client(server) as client:
        result = client.post("/v1/design", payload)
    if output:
        Path(output).write_text(result["csv"])
        click.echo(f"{result['num_filters']} filters -> {output}")
    else:
        click.echo(result["csv"], nl=False)


@main.command()
@click.option("--duration-s", default=60.0, show_default=True)
@click.option("--repetitions", default=3, show_default=True)
@click.option("--num-filters", default=40, show_default=True)
@click.option("--low-hz", default=20.0, show_default=True)
@click.option("--high-hz", default=8000.0, show_default=True)
@click.option("--sample-rate", default=16000.0, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--server", default=None, help="Remote service URL.")
def bench(duration_s, repetitions, num_filters, low_hz, high_hz, sample_rate,
          seed, server):
    """Benchmark both pipelines on synthetic noise."""
    payload = {
        "duration_s": duration_s, "repetitions": repetitions,
        "num_filters": num_filters, "low_hz": low_hz, "high_hz": high_hz,
        "sample_rate": sample_rate, "seed": seed,
    }
    with _client(server) as client:
        result = client.post("/v1/bench", payload)
    for row in result["results"]:
        click.echo(
            f"{row['filter']:<12} stft {row['stft_seconds']:.3f}s  "
            f"si {row['si_seconds']:.3f}s  ratio {row['ratio']:.2f}"
        )


@main.command()
@click.argument("input_path", type=click.Path(exists=True, path_type=Path))
@click.option("--server", default=None, help="Remote service URL.")
def info(input_path, server):
    """Print WAV header summary: rate, samples, duration."""
    payload = {"wav_base64": base64.b64encode(input_path.read_bytes()).decode()}
    with _client(server) as client:
        result = client.post("/v1/info", payload)
    click.echo(
        f"{result['sample_rate']:.0f} Hz, {result['num_samples']} samples, "
        f"{result['duration_s']:.3f} s"
    )


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    sys.exit(main())
