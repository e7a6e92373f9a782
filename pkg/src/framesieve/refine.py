"""Reward-guided r-frame selection and refined-video construction.

Selection is parameter-free: repeatedly subtract the mean from every
reward and drop the values that hit zero; the survivors stabilize at the
ordinals whose rewards sit above every rebalanced average.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

from .cafs import RFrameSet
from .core import Interval, RefinedTimeline, merge_intervals, sample_timeline
from .errors import EmptyRewardsError, EmptySelectionError


@dataclass(frozen=True)
class IterationStep:
    """Mean used by one pass and the ordinals still positive after it."""

    mean: float
    surviving: frozenset[int]


@dataclass(frozen=True)
class SelectionTrace:
    """Full record of the iterative selection, 1-based r-frame ordinals."""

    iterations: tuple[IterationStep, ...]
    final_selected: frozenset[int]
    fallback_used: bool

    def to_json_dict(self) -> dict:
        return {
            "iterations": [
                {"mean": step.mean, "surviving": sorted(step.surviving)}
                for step in self.iterations
            ],
            "final_selected": sorted(self.final_selected),
            "fallback_used": self.fallback_used,
        }


@dataclass(frozen=True)
class RefineResult:
    frames: list[int]
    trace: SelectionTrace
    timeline: RefinedTimeline


def _reward_values(rewards) -> np.ndarray:
    values = getattr(rewards, "values", rewards)
    return np.asarray(values, dtype=np.float64)


def iterative_select(rewards) -> SelectionTrace:
    """Shrink the reward set to a fixed point by mean-thresholding.

    Each pass computes the mean over all current values (zeros included),
    replaces every value with ``max(value - mean, 0)``, and records the
    set of positive ordinals. The loop stops when that set repeats. The
    first pass never terminates the loop, which makes the selected set
    invariant under adding a constant to all rewards. If the fixed point
    is empty (all rewards equal), the single ordinal with the largest
    original reward is selected instead, earliest ordinal on ties.

    The iteration runs in exact rational arithmetic: a reward exactly
    equal to the running mean must die deterministically, or scaling all
    rewards by a constant could change the selection.
    """
    original = _reward_values(rewards)
    if original.size == 0:
        raise EmptyRewardsError("iterative_select needs at least one reward")
    values = [Fraction(float(v)) for v in original]
    count = len(values)
    zero = Fraction(0)
    steps: list[IterationStep] = []
    previous: frozenset[int] | None = None
    while True:
        mean = sum(values) / count
        values = [v - mean if v > mean else zero for v in values]
        surviving = frozenset(i + 1 for i, v in enumerate(values) if v > 0)
        steps.append(IterationStep(mean=float(mean), surviving=surviving))
        if previous is not None and surviving == previous:
            break
        previous = surviving
    selected = surviving
    fallback = len(selected) == 0
    if fallback:
        selected = frozenset({int(np.argmax(original)) + 1})
    return SelectionTrace(
        iterations=tuple(steps), final_selected=selected, fallback_used=fallback
    )


def build_segments(selected: Iterable[int], rframes: RFrameSet, wlen: int) -> RefinedTimeline:
    """Union of peak-bounded segments around the selected r-frames.

    For ordinal j the segment runs from the left peak of r-frame
    ``max(1, j - wlen)`` to the right peak of r-frame ``min(N, j + wlen)``,
    absorbing ``wlen`` neighboring segments on each side with the window
    clamped at the ends of the r-frame list.
    """
    if wlen < 0:
        raise ValueError("wlen must be >= 0")
    ordinals = sorted(set(int(j) for j in selected))
    if not ordinals:
        raise EmptySelectionError("no r-frames selected")
    n = len(rframes)
    if ordinals[0] < 1 or ordinals[-1] > n:
        raise ValueError(f"ordinals {ordinals} out of range for {n} r-frames")
    spans = []
    for j in ordinals:
        lo = rframes.rframes[max(1, j - wlen) - 1].left_peak_frame
        hi = rframes.rframes[min(n, j + wlen) - 1].right_peak_frame
        spans.append(Interval(lo, hi))
    return merge_intervals(spans)


def refine_video(
    rframes: RFrameSet, rewards, wlen: int, budget: int
) -> RefineResult:
    """Select r-frames, merge their windowed segments, sample the union."""
    values = _reward_values(rewards)
    if len(values) != len(rframes):
        raise ValueError(f"{len(values)} rewards for {len(rframes)} r-frames")
    trace = iterative_select(values)
    timeline = build_segments(trace.final_selected, rframes, wlen)
    frames = sample_timeline(timeline, budget)
    return RefineResult(frames=frames, trace=trace, timeline=timeline)
