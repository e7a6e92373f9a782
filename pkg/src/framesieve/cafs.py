"""Content-adaptive frame selection.

Segments a video where consecutive-frame feature distance shows prominent
peaks, then takes the midpoint frame of each segment as its representative
(an "r-frame"). Distance positions are 1-based throughout: ``d[j]`` sits
between candidate frames ``j`` and ``j + 1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .core import FeatureSequence
from .errors import DegenerateVectorError, TooShortError

BoundaryMode = Literal["strict", "padded"]


@dataclass(frozen=True, eq=False)
class DistanceSequence:
    """Consecutive-frame feature distances, each in [0, 2]."""

    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 1:
            raise ValueError("distances must be 1-D")
        if values.size and (values.min() < 0.0 or values.max() > 2.0):
            raise ValueError("distances must lie in [0, 2]")
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class Peak:
    """A prominence-validated local maximum of the distance sequence.

    ``position`` is the 1-based index into the distance sequence; ``frame``
    is the original index of the earlier frame of the straddled pair, bound
    once features are known.
    """

    position: int
    prominence: float
    frame: int | None = None


@dataclass(frozen=True)
class RFrame:
    """A representative frame and the peak frames bounding its segment."""

    frame_index: int
    left_peak_frame: int
    right_peak_frame: int

    def __post_init__(self):
        if not self.left_peak_frame <= self.frame_index <= self.right_peak_frame:
            raise ValueError(
                f"r-frame {self.frame_index} outside its peak bounds "
                f"[{self.left_peak_frame}, {self.right_peak_frame}]"
            )


@dataclass(frozen=True)
class RFrameSet:
    """Ordered r-frames plus the peaks that produced them."""

    rframes: tuple[RFrame, ...]
    boundary_mode: str
    peaks: tuple[Peak, ...] = ()

    def __post_init__(self):
        if self.boundary_mode not in ("strict", "padded"):
            raise ValueError(f"unknown boundary_mode {self.boundary_mode!r}")
        idx = [rf.frame_index for rf in self.rframes]
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise ValueError("r-frame indices must strictly increase")

    def __len__(self) -> int:
        return len(self.rframes)

    def frame_indices(self) -> list[int]:
        return [rf.frame_index for rf in self.rframes]

    def to_json_dict(self) -> dict:
        return {
            "boundary_mode": self.boundary_mode,
            "rframes": [
                {
                    "frame": rf.frame_index,
                    "left_peak": rf.left_peak_frame,
                    "right_peak": rf.right_peak_frame,
                }
                for rf in self.rframes
            ],
            "peaks": [
                {"distance_pos": p.position, "frame": p.frame, "prominence": p.prominence}
                for p in self.peaks
            ],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "RFrameSet":
        rframes = tuple(
            RFrame(r["frame"], r["left_peak"], r["right_peak"]) for r in data["rframes"]
        )
        peaks = tuple(
            Peak(p["distance_pos"], p["prominence"], p.get("frame"))
            for p in data.get("peaks", [])
        )
        return cls(rframes=rframes, boundary_mode=data["boundary_mode"], peaks=peaks)


def cosine_similarity_matrix(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Row-wise cosine similarity between two stacks of vectors.

    Computed as dot / sqrt(|a|^2 * |b|^2) so identical rows yield exactly 1.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    dots = np.einsum("ij,ij->i", a, b)
    sq_a = np.einsum("ij,ij->i", a, a)
    sq_b = np.einsum("ij,ij->i", b, b)
    if np.any(sq_a == 0) or np.any(sq_b == 0):
        raise DegenerateVectorError("cosine similarity of a zero vector")
    return dots / np.sqrt(sq_a * sq_b)


def compute_distances(features: FeatureSequence) -> DistanceSequence:
    """Distance between each pair of consecutive frames: 1 - cosine."""
    if len(features) < 2:
        raise TooShortError("need at least two frames to compute distances")
    sims = cosine_similarity_matrix(features.vectors[:-1], features.vectors[1:])
    return DistanceSequence(np.clip(1.0 - sims, 0.0, 2.0))


def detect_peaks(
    distances: DistanceSequence | Sequence[float], prominence_threshold: float = 0.1
) -> list[Peak]:
    """Find local maxima whose topographic prominence exceeds the threshold.

    A peak at 1-based position j requires d[j-1] < d[j] > d[j+1]; the first
    and last positions are never peaks. Prominence walks outward from the
    peak while values stay <= d[j], tracking the lowest level reached on
    each side; it is d[j] minus the higher of the two minima. Retention is
    strict: prominence must exceed the threshold.
    """
    if prominence_threshold < 0:
        raise ValueError("prominence_threshold must be >= 0")
    d = distances.values if isinstance(distances, DistanceSequence) else np.asarray(
        distances, dtype=np.float64
    )
    n = len(d)
    peaks: list[Peak] = []
    for j in range(1, n - 1):
        if not (d[j - 1] < d[j] and d[j] > d[j + 1]):
            continue
        level = d[j]
        l_min = level
        k = j - 1
        while k >= 0 and d[k] <= level:
            if d[k] < l_min:
                l_min = d[k]
            k -= 1
        r_min = level
        m = j + 1
        while m <= n - 1 and d[m] <= level:
            if d[m] < r_min:
                r_min = d[m]
            m += 1
        prominence = level - max(l_min, r_min)
        if prominence > prominence_threshold:
            peaks.append(Peak(position=j + 1, prominence=float(prominence)))
    return peaks


def select_rframes(
    peaks: Sequence[Peak],
    features: FeatureSequence,
    boundary_mode: BoundaryMode = "padded",
) -> RFrameSet:
    """Midpoint representative frame between each pair of consecutive peaks.

    The frame associated with a peak at distance position j is the earlier
    frame of the straddled pair. In ``padded`` mode virtual peaks at the
    first and last sampled frames make the segments tile the whole video,
    so at least one r-frame exists even with no detected peaks; ``strict``
    mode uses detected peaks only and needs two or more of them.
    """
    indices = features.original_indices
    bound: list[Peak] = []
    for p in peaks:
        if not 1 <= p.position <= len(indices) - 1:
            raise ValueError(f"peak position {p.position} invalid for {len(indices)} frames")
        bound.append(Peak(p.position, p.prominence, indices[p.position - 1]))
    peak_frames = [p.frame for p in bound]
    if boundary_mode == "padded":
        fence = [indices[0], *peak_frames, indices[-1]]
    elif boundary_mode == "strict":
        fence = list(peak_frames)
    else:
        raise ValueError(f"unknown boundary_mode {boundary_mode!r}")
    rframes = tuple(
        RFrame(frame_index=(a + b) // 2, left_peak_frame=a, right_peak_frame=b)
        for a, b in zip(fence, fence[1:])
    )
    return RFrameSet(rframes=rframes, boundary_mode=boundary_mode, peaks=tuple(bound))


def cafs(
    features: FeatureSequence,
    prominence_threshold: float = 0.1,
    boundary_mode: BoundaryMode = "padded",
) -> RFrameSet:
    """Distance sequence -> prominent peaks -> midpoint r-frames."""
    distances = compute_distances(features)
    peaks = detect_peaks(distances, prominence_threshold)
    return select_rframes(peaks, features, boundary_mode)
