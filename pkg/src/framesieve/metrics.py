"""Coverage metrics for r-frame sets.

Localized coverage checks how well each r-frame resembles its temporal
neighborhood; global coverage checks how well the set as a whole matches
randomly sampled frames.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cafs import RFrameSet, cosine_similarity_matrix
from .core import FeatureSequence
from .errors import EmptyRFrameSetError


@dataclass(frozen=True)
class CoverageScore:
    value: float
    sample_count: int
    seed: int | None = None

    def __post_init__(self):
        if not -1.0 <= self.value <= 1.0:
            raise ValueError(f"coverage {self.value} outside [-1, 1]")
        if self.sample_count <= 0:
            raise ValueError("sample_count must be positive")


def _round_half_away(x: float) -> int:
    return int(math.copysign(math.floor(abs(x) + 0.5), x))


def _rframe_positions(features: FeatureSequence, rframes: RFrameSet) -> list[int]:
    if len(rframes) == 0:
        raise EmptyRFrameSetError("coverage metrics need at least one r-frame")
    return [features.nearest_position(rf.frame_index) for rf in rframes.rframes]


def loc(features: FeatureSequence, rframes: RFrameSet) -> CoverageScore:
    """Mean similarity between each r-frame and four temporal neighbors.

    For r-frame i with index I_i, neighbors sit at
    ``I_i + (j - 1.5) * floor((I_next - I_prev) / 6)`` for j in 0..3, where
    I_prev/I_next are the adjacent r-frame indices (the first and last
    sampled frame indices at the boundaries). Offsets round half away from
    zero, clamp into the sampled range, and resolve to the nearest
    candidate frame.
    """
    positions = _rframe_positions(features, rframes)
    indices = [rf.frame_index for rf in rframes.rframes]
    first = features.frames[0].original_index
    last = features.frames[-1].original_index
    anchor_rows = []
    neighbor_rows = []
    for i, frame_index in enumerate(indices):
        prev_index = indices[i - 1] if i > 0 else first
        next_index = indices[i + 1] if i + 1 < len(indices) else last
        step = (next_index - prev_index) // 6
        for j in range(4):
            target = _round_half_away(frame_index + (j - 1.5) * step)
            target = min(max(target, first), last)
            anchor_rows.append(positions[i])
            neighbor_rows.append(features.nearest_position(target))
    sims = cosine_similarity_matrix(
        features.vectors[anchor_rows], features.vectors[neighbor_rows]
    )
    sims = np.clip(sims, -1.0, 1.0)
    return CoverageScore(value=float(sims.mean()), sample_count=len(sims))


def glc(
    features: FeatureSequence,
    rframes: RFrameSet,
    sample_n: int = 200,
    seed: int = 0,
) -> CoverageScore:
    """Mean best r-frame similarity over randomly sampled frames.

    Samples ``min(sample_n, M)`` distinct frames without replacement from
    the candidate sequence; when the sample is exhaustive the result does
    not depend on the seed.
    """
    if sample_n < 1:
        raise ValueError("sample_n must be >= 1")
    positions = _rframe_positions(features, rframes)
    m = len(features)
    if sample_n >= m:
        chosen = np.arange(m)
    else:
        rng = np.random.default_rng(seed)
        chosen = np.sort(rng.choice(m, size=sample_n, replace=False))
    rframe_vecs = features.vectors[positions]
    best = np.full(len(chosen), -np.inf)
    for row in rframe_vecs:
        tiled = np.broadcast_to(row, (len(chosen), row.shape[0]))
        sims = cosine_similarity_matrix(tiled, features.vectors[chosen])
        best = np.maximum(best, np.clip(sims, -1.0, 1.0))
    return CoverageScore(value=float(best.mean()), sample_count=len(chosen), seed=seed)
