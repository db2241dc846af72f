"""Delta features and final feature assembly.

Deltas are the standard least-squares slope estimate over a few frames
of context; double deltas apply the same operator twice.  The assembled
layout is ``[static | deltas | double deltas]``, tripling the column
count (41 static columns become 123).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pipeline_stft import FeatureMatrix

__all__ = ["DeltaConfig", "deltas", "assemble"]


@dataclass(frozen=True)
class DeltaConfig:
    """Delta regression settings: frames of context per side."""

    context: int = 2

    def __post_init__(self):
        if self.context < 1:
            raise ValueError(f"context must be >= 1, got {self.context}")


def deltas(features: FeatureMatrix, cfg: DeltaConfig = DeltaConfig()) -> FeatureMatrix:
    """Regression slope over +/-context frames, edge frames replicated.

    ``d_t = sum_{tau=1..K} tau * (x_{t+tau} - x_{t-tau}) / (2 * sum tau^2)``
    with out-of-range frames replaced by the nearest edge frame.
    """
    x = features.values
    if x.shape[0] < 1 or x.size == 0:
        raise ValueError("cannot take deltas of an empty feature matrix")
    k = cfg.context
    padded = np.concatenate(
        [np.repeat(x[:1], k, axis=0), x, np.repeat(x[-1:], k, axis=0)]
    )
    denom = 2.0 * sum(tau * tau for tau in range(1, k + 1))
    rows = x.shape[0]
    out = np.zeros_like(x)
    for tau in range(1, k + 1):
        out += tau * (padded[k + tau : k + tau + rows] - padded[k - tau : k - tau + rows])
    out /= denom
    return FeatureMatrix(values=out, col_layout=f"delta({features.col_layout})")


def assemble(static: FeatureMatrix, cfg: DeltaConfig = DeltaConfig()) -> FeatureMatrix:
    """Concatenate static features with their deltas and double deltas."""
    d1 = deltas(static, cfg)
    d2 = deltas(d1, cfg)
    values = np.hstack([static.values, d1.values, d2.values])
    return FeatureMatrix(
        values=values, col_layout=f"{static.col_layout}+delta+delta2"
    )
