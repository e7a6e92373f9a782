"""Shared domain types, interval algebra, and baseline samplers.

Frame indices always refer to positions in the original (full-rate) video;
timestamps are integer microseconds from video start so that file
round-trips never accumulate float drift.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DegenerateVectorError,
    EmptySequenceError,
    EmptyTimelineError,
)


@dataclass(frozen=True)
class FrameRef:
    """A frame in the source video: original index plus timestamp."""

    original_index: int
    timestamp_us: int

    def __post_init__(self):
        if self.original_index < 0:
            raise ValueError(f"original_index must be >= 0, got {self.original_index}")
        if self.timestamp_us < 0:
            raise ValueError(f"timestamp_us must be >= 0, got {self.timestamp_us}")


@dataclass(frozen=True, eq=False)
class FeatureSequence:
    """Ordered per-frame embedding vectors for the candidate frame stream.

    Invariants enforced at construction: one vector per frame, frames
    strictly increasing in both index and timestamp, and no all-zero
    vector (cosine similarity must stay defined).
    """

    dim: int
    frames: tuple[FrameRef, ...]
    vectors: np.ndarray  # shape (len(frames), dim), float32
    source_fps: float = 2.0

    def __post_init__(self):
        frames = tuple(self.frames)
        object.__setattr__(self, "frames", frames)
        vectors = np.asarray(self.vectors, dtype=np.float32)
        if vectors.ndim != 2:
            raise ValueError("vectors must be a 2-D array")
        object.__setattr__(self, "vectors", vectors)
        if self.dim < 1:
            raise ValueError("dim must be positive")
        if self.source_fps <= 0:
            raise ValueError("source_fps must be positive")
        if vectors.shape != (len(frames), self.dim):
            raise ValueError(
                f"vectors shape {vectors.shape} does not match "
                f"{len(frames)} frames of dim {self.dim}"
            )
        if len(frames) == 0:
            raise EmptySequenceError("a FeatureSequence needs at least one frame")
        indices = [f.original_index for f in frames]
        stamps = [f.timestamp_us for f in frames]
        if any(b <= a for a, b in zip(indices, indices[1:])):
            raise ValueError("frame original_index must strictly increase")
        if any(b <= a for a, b in zip(stamps, stamps[1:])):
            raise ValueError("frame timestamp_us must strictly increase")
        if not np.any(vectors != 0, axis=1).all():
            raise DegenerateVectorError("every vector needs a nonzero component")
        object.__setattr__(self, "_indices", tuple(indices))
        object.__setattr__(self, "_stamps", tuple(stamps))

    def __len__(self) -> int:
        return len(self.frames)

    @property
    def original_indices(self) -> tuple[int, ...]:
        return self._indices  # type: ignore[attr-defined]

    @property
    def duration_s(self) -> float:
        return self.frames[-1].timestamp_us / 1e6

    def nearest_position(self, original_index: int) -> int:
        """Position of the candidate frame nearest to an original index.

        Ties resolve to the earlier frame.
        """
        indices = self._indices  # type: ignore[attr-defined]
        pos = bisect_left(indices, original_index)
        if pos == 0:
            return 0
        if pos == len(indices):
            return len(indices) - 1
        left, right = indices[pos - 1], indices[pos]
        if original_index - left <= right - original_index:
            return pos - 1
        return pos


@dataclass(frozen=True)
class Interval:
    """Closed range of original frame indices."""

    start: int
    end: int

    def __post_init__(self):
        if self.start > self.end:
            raise ValueError(f"interval start {self.start} > end {self.end}")

    def __len__(self) -> int:
        return self.end - self.start + 1

    def __contains__(self, index: int) -> bool:
        return self.start <= index <= self.end


@dataclass(frozen=True)
class RefinedTimeline:
    """Sorted, disjoint, non-abutting intervals forming a virtual video."""

    intervals: tuple[Interval, ...]
    total_frames: int

    def __post_init__(self):
        intervals = tuple(self.intervals)
        object.__setattr__(self, "intervals", intervals)
        for a, b in zip(intervals, intervals[1:]):
            if b.start <= a.end + 1:
                raise ValueError("intervals must be sorted, disjoint and non-abutting")
        if self.total_frames != sum(len(iv) for iv in intervals):
            raise ValueError("total_frames inconsistent with intervals")

    def __contains__(self, index: int) -> bool:
        return any(index in iv for iv in self.intervals)


def uniform_sample(total_frames: int, budget: int) -> list[int]:
    """Pick ``min(budget, total_frames)`` indices spread over the video.

    Uses the center of each of ``budget`` equal strata:
    ``index_k = floor((k + 0.5) * total_frames / budget)``, computed in
    exact integer arithmetic, then deduplicated and clamped.
    """
    if total_frames < 1:
        raise ValueError("total_frames must be >= 1")
    if budget < 1:
        raise ValueError("budget must be >= 1")
    out: list[int] = []
    for k in range(budget):
        idx = ((2 * k + 1) * total_frames) // (2 * budget)
        idx = min(max(idx, 0), total_frames - 1)
        if not out or idx > out[-1]:
            out.append(idx)
    return out


def fps_sample(frames: Sequence[FrameRef], rate_hz: float) -> list[FrameRef]:
    """Sample frames at a fixed rate by nearest timestamp.

    Targets are ``t = k / rate_hz`` for k = 0, 1, ... while t does not
    exceed the last timestamp. Each target resolves to the frame with the
    nearest timestamp (ties go to the earlier frame); duplicates collapse.
    """
    if not frames:
        raise EmptySequenceError("fps_sample needs at least one frame")
    if rate_hz <= 0:
        raise ValueError("rate_hz must be positive")
    stamps = [f.timestamp_us for f in frames]
    last = stamps[-1]
    out: list[FrameRef] = []
    k = 0
    while True:
        target = k * 1_000_000.0 / rate_hz
        if target > last:
            break
        pos = bisect_left(stamps, target)
        if pos == 0:
            best = 0
        elif pos == len(stamps):
            best = len(stamps) - 1
        else:
            before, after = stamps[pos - 1], stamps[pos]
            best = pos - 1 if target - before <= after - target else pos
        if not out or frames[best].original_index > out[-1].original_index:
            out.append(frames[best])
        k += 1
    return out


def merge_intervals(raw: Iterable[Interval]) -> RefinedTimeline:
    """Union of intervals: overlapping or abutting ranges are merged."""
    ordered = sorted(raw, key=lambda iv: (iv.start, iv.end))
    merged: list[Interval] = []
    for iv in ordered:
        if merged and iv.start <= merged[-1].end + 1:
            if iv.end > merged[-1].end:
                merged[-1] = Interval(merged[-1].start, iv.end)
        else:
            merged.append(iv)
    total = sum(len(iv) for iv in merged)
    return RefinedTimeline(tuple(merged), total)


def sample_timeline(timeline: RefinedTimeline, budget: int) -> list[int]:
    """Uniformly sample original indices from a refined timeline.

    The intervals are treated as one virtual concatenation; the uniform
    rule runs over virtual positions and each position maps back to the
    original index inside its interval.
    """
    if not timeline.intervals or timeline.total_frames < 1:
        raise EmptyTimelineError("cannot sample an empty timeline")
    positions = uniform_sample(timeline.total_frames, budget)
    out: list[int] = []
    offset = 0
    k = 0
    for iv in timeline.intervals:
        size = len(iv)
        while k < len(positions) and positions[k] < offset + size:
            out.append(iv.start + (positions[k] - offset))
            k += 1
        offset += size
    return out
