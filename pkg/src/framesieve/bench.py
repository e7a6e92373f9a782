"""Desk-scale synthetic evaluation of frame-selection strategies.

Instances are piecewise-constant unit-vector feature streams: scenes tile
the video, planted query-relevant windows occupy whole scenes, and an
oracle reward rule (high inside windows, low outside, optional truncated
Gaussian noise) stands in for a model-based scorer so the selection
mathematics can be measured in isolation.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .cafs import RFrame, RFrameSet, cafs
from .core import FeatureSequence, FrameRef, Interval, fps_sample, uniform_sample
from .errors import BadParamsError
from .metrics import glc, loc
from .refine import refine_video
from .scoring import RewardVector

STRATEGIES = ("uni", "fps", "cafs_topk", "dig")


@dataclass(frozen=True)
class InstanceParams:
    frames: int = 2000
    scenes: int = 20
    dim: int = 32
    jitter: float = 0.0
    window_fraction: float = 0.1
    window_count: int = 1
    reward_hi: float = 100.0
    reward_lo: float = 0.0
    noise_sigma: float = 0.0
    geometric_p: float = 0.2
    candidate_fps: float = 2.0

    def __post_init__(self):
        if self.dim < 2:
            raise BadParamsError("dim must be >= 2")
        if self.frames < 10:
            raise BadParamsError("frames must be >= 10")
        if self.scenes < 1 or self.scenes > self.frames:
            raise BadParamsError("scenes must be in [1, frames]")
        if not 0.0 <= self.window_fraction < 1.0:
            raise BadParamsError("window_fraction must be in [0, 1)")
        if self.window_count < 0 or self.window_count >= self.scenes:
            raise BadParamsError("window_count must leave at least one plain scene")
        if self.reward_hi <= self.reward_lo:
            raise BadParamsError("reward_hi must exceed reward_lo")
        if not (0.0 <= self.reward_lo and self.reward_hi <= 100.0):
            raise BadParamsError("rewards must lie in [0, 100]")


@dataclass(frozen=True)
class SyntheticInstance:
    seed: int
    params: InstanceParams
    features: FeatureSequence
    scene_bounds: tuple[Interval, ...]
    windows: tuple[Interval, ...]

    def __post_init__(self):
        total = sum(len(iv) for iv in self.scene_bounds)
        if total != len(self.features):
            raise ValueError("scenes must tile the frame sequence")
        last = len(self.features) - 1
        for w in self.windows:
            if w.start < 0 or w.end > last:
                raise ValueError("window outside the frame range")


@dataclass(frozen=True)
class EvalResult:
    strategy: str
    budget: int
    recall: float
    precision: float
    glc: float
    loc: float
    rframe_count: int


def _apportion(weights: np.ndarray, total: int, minimum: int = 1) -> np.ndarray:
    """Split ``total`` into len(weights) integer parts >= minimum, by weight."""
    n = len(weights)
    if total < n * minimum:
        raise BadParamsError(f"cannot split {total} frames into {n} scenes")
    spare = total - n * minimum
    raw = weights / weights.sum() * spare
    base = np.floor(raw).astype(int)
    frac = raw - base
    order = np.argsort(-frac, kind="stable")
    base[order[: spare - base.sum()]] += 1
    return base + minimum


def _scene_directions(scenes: int, dim: int) -> np.ndarray:
    if scenes <= dim:
        return np.eye(scenes, dim)
    # More scenes than dimensions: spread evenly on a circle in the first
    # two axes so adjacent scenes stay well separated.
    angles = 2.0 * np.pi * np.arange(scenes) / scenes
    out = np.zeros((scenes, dim))
    out[:, 0] = np.cos(angles)
    out[:, 1] = np.sin(angles)
    return out


def gen_instance(params: InstanceParams, seed: int) -> SyntheticInstance:
    """Deterministic synthetic video for one seed.

    Window scenes get exactly ``round(window_fraction * frames)`` frames in
    total; the remaining frames are split across plain scenes with
    heavy-tailed (geometric) lengths. Scene directions are mutually
    orthogonal unit vectors whenever the dimension allows.
    """
    rng = np.random.default_rng(seed)
    m = params.frames
    window_total = round(params.window_fraction * m)
    n_window = params.window_count if window_total > 0 else 0
    if n_window and window_total < 2 * n_window:
        raise BadParamsError("window_fraction too small for window_count")
    n_plain = params.scenes - n_window

    window_lengths: list[int] = []
    if n_window:
        per = window_total // n_window
        window_lengths = [per] * n_window
        window_lengths[0] += window_total - per * n_window
    plain_weights = rng.geometric(params.geometric_p, size=n_plain).astype(float)
    # Scenes shorter than 2 frames would merge adjacent boundary spikes
    # into a plateau, so keep a 2-frame floor whenever the budget allows.
    minimum = 2 if m - window_total >= 2 * n_plain else 1
    plain_lengths = list(_apportion(plain_weights, m - window_total, minimum=minimum))

    window_slots = sorted(rng.choice(params.scenes, size=n_window, replace=False).tolist())
    lengths: list[int] = []
    is_window: list[bool] = []
    plain_iter = iter(plain_lengths)
    window_iter = iter(window_lengths)
    for slot in range(params.scenes):
        if slot in window_slots:
            lengths.append(next(window_iter))
            is_window.append(True)
        else:
            lengths.append(next(plain_iter))
            is_window.append(False)

    directions = _scene_directions(params.scenes, params.dim)
    vectors = np.repeat(directions, lengths, axis=0)
    if params.jitter > 0:
        vectors = vectors + params.jitter * rng.standard_normal(vectors.shape)
        vectors /= np.linalg.norm(vectors, axis=1, keepdims=True)

    step_us = round(1e6 / params.candidate_fps)
    frames = tuple(FrameRef(i, i * step_us) for i in range(m))
    features = FeatureSequence(
        dim=params.dim,
        frames=frames,
        vectors=vectors,
        source_fps=params.candidate_fps,
    )

    bounds: list[Interval] = []
    windows: list[Interval] = []
    start = 0
    for length, winged in zip(lengths, is_window):
        iv = Interval(start, start + length - 1)
        bounds.append(iv)
        if winged:
            windows.append(iv)
        start += length
    return SyntheticInstance(
        seed=seed,
        params=params,
        features=features,
        scene_bounds=tuple(bounds),
        windows=tuple(windows),
    )


def oracle_rewards(instance: SyntheticInstance, rframes: RFrameSet) -> RewardVector:
    """Ground-truth rewards: high inside planted windows, low outside."""
    p = instance.params
    values = np.array(
        [
            p.reward_hi if any(rf.frame_index in w for w in instance.windows) else p.reward_lo
            for rf in rframes.rframes
        ]
    )
    if p.noise_sigma > 0:
        noise_rng = np.random.default_rng([instance.seed, 0xD16])
        values = values + noise_rng.normal(0.0, p.noise_sigma, size=len(values))
    values = np.clip(values, 0.0, 100.0)
    return RewardVector(values=tuple(float(v) for v in values), provider_tag="oracle")


def _rframes_from_indices(indices: Sequence[int]) -> RFrameSet:
    entries = tuple(RFrame(i, i, i) for i in indices)
    return RFrameSet(rframes=entries, boundary_mode="strict")


def evaluate(
    strategy: str, instance: SyntheticInstance, budget: int, wlen: int = 0
) -> EvalResult:
    """Run one strategy and measure in-window recall plus coverage.

    Coverage metrics are computed over the frames the strategy would hand
    to a model; selection is a set, so precision equals recall (both are
    the in-window fraction).
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
    features = instance.features
    rframe_count = 0
    if strategy == "uni":
        selected = uniform_sample(len(features), budget)
        rframe_count = len(selected)
    elif strategy == "fps":
        rate = budget / max(features.duration_s, 1e-9)
        selected = [f.original_index for f in fps_sample(features.frames, rate)]
        rframe_count = len(selected)
    else:
        rfs = cafs(features, 0.1, "padded")
        rewards = oracle_rewards(instance, rfs)
        rframe_count = len(rfs)
        if strategy == "cafs_topk":
            order = sorted(range(len(rfs)), key=lambda i: (-rewards.values[i], i))
            keep = sorted(order[: min(budget, len(rfs))])
            selected = [rfs.rframes[i].frame_index for i in keep]
        else:
            selected = refine_video(rfs, rewards, wlen, budget).frames

    hits = sum(1 for idx in selected if any(idx in w for w in instance.windows))
    recall = hits / len(selected) if selected else 0.0
    cover_set = _rframes_from_indices(selected)
    glc_score = glc(features, cover_set, sample_n=200, seed=instance.seed)
    loc_score = loc(features, cover_set)
    return EvalResult(
        strategy=strategy,
        budget=budget,
        recall=recall,
        precision=recall,
        glc=glc_score.value,
        loc=loc_score.value,
        rframe_count=rframe_count,
    )


def compare(
    base_params: InstanceParams,
    strategies: Sequence[str],
    budgets: Sequence[int],
    seeds: Sequence[int],
    rhos: Sequence[float] = (0.1,),
    sigmas: Sequence[float] = (0.0,),
    out: str | Path | None = None,
    wlen: int = 0,
) -> str:
    """Cross-product run; one CSV row per (strategy, budget, rho, sigma)."""
    cells: dict[tuple, list[EvalResult]] = {}
    for rho in rhos:
        for sigma in sigmas:
            params = replace(base_params, window_fraction=rho, noise_sigma=sigma)
            for seed in seeds:
                instance = gen_instance(params, seed)
                for strategy in strategies:
                    for budget in budgets:
                        res = evaluate(strategy, instance, budget, wlen=wlen)
                        cells.setdefault((strategy, budget, rho, sigma), []).append(res)

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        ["strategy", "budget", "rho", "sigma", "recall_mean", "recall_std", "glc_mean", "loc_mean"]
    )
    for strategy in strategies:
        for budget in budgets:
            for rho in rhos:
                for sigma in sigmas:
                    results = cells[(strategy, budget, rho, sigma)]
                    recalls = np.array([r.recall for r in results])
                    glcs = np.array([r.glc for r in results])
                    locs = np.array([r.loc for r in results])
                    writer.writerow(
                        [
                            strategy,
                            budget,
                            f"{rho:g}",
                            f"{sigma:g}",
                            f"{recalls.mean():.6f}",
                            f"{recalls.std():.6f}",
                            f"{glcs.mean():.6f}",
                            f"{locs.mean():.6f}",
                        ]
                    )
    table = buf.getvalue()
    if out is not None:
        Path(out).write_text(table)
    return table
