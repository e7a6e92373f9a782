"""End-to-end orchestration: classify, route, select, report.

Global queries get plain uniform sampling over the whole video and touch
no scorer at all. Localized queries run the full pipeline: segmentation,
reward scoring, and reward-guided refinement. Every run produces a
SelectionReport carrying all intermediate artifacts for reproducibility.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .cafs import BoundaryMode, cafs
from .chat import ChatEndpoint, RetryPolicy, chat_complete, image_part
from .classify import QueryKind, QueryLabel, classify_query
from .core import FeatureSequence, uniform_sample
from .errors import EmptySelectionError, FrameSieveError
from .refine import SelectionTrace, refine_video
from .scoring import (
    ChatScorer,
    EmbeddingScorer,
    FrameSource,
    MockScorer,
    RewardVector,
    ScoreProvider,
    score_rframes,
)

STRATEGY_UNIFORM = "uniform"
STRATEGY_DIG = "dig"


@dataclass
class PipelineConfig:
    """Knobs for one selection run; defaults follow the method's settings."""

    budget: int
    prominence_threshold: float = 0.1
    wlen: int = 2
    boundary_mode: BoundaryMode = "padded"
    scorer: str = "mock"  # lmm | embed | mock
    scorer_endpoint: ChatEndpoint | None = None
    classifier_endpoint: ChatEndpoint | None = None
    mock_rewards: dict[int, float] | None = None
    mock_default: float = 0.0
    text_vec: np.ndarray | None = None
    retry: RetryPolicy = field(default_factory=RetryPolicy)
    parallelism: int = 4
    default_reward: float = 0.0
    fail_hard: bool = False
    seed: int = 0
    total_frames: int | None = None
    video_fps: float | None = None
    video_duration_s: float | None = None

    def __post_init__(self):
        if self.budget < 1:
            raise ValueError("budget must be >= 1")
        if self.wlen < 0:
            raise ValueError("wlen must be >= 0")
        if self.prominence_threshold < 0:
            raise ValueError("prominence_threshold must be >= 0")


@dataclass
class SelectionReport:
    """Full provenance of one selection run."""

    query: str
    query_label: QueryLabel
    strategy_used: str
    peaks: list[dict]
    rframes: dict | None
    rewards: RewardVector | None
    selection_trace: SelectionTrace | None
    refined_intervals: list[list[int]]
    selected_frames: list[int]
    selected_timestamps_us: list[int]
    timings_s: dict[str, float]
    warnings: list[str]

    def to_json_dict(self, mask_timings: bool = False) -> dict:
        timings = {k: (0.0 if mask_timings else v) for k, v in self.timings_s.items()}
        return {
            "query": self.query,
            "query_label": self.query_label.to_json_dict(),
            "strategy_used": self.strategy_used,
            "peaks": self.peaks,
            "rframes": self.rframes,
            "rewards": self.rewards.to_json_dict() if self.rewards else None,
            "selection_trace": self.selection_trace.to_json_dict()
            if self.selection_trace
            else None,
            "refined_intervals": self.refined_intervals,
            "selected_frames": {
                "indices": self.selected_frames,
                "timestamps_us": self.selected_timestamps_us,
            },
            "timings_s": timings,
            "warnings": self.warnings,
        }

    def to_json(self, mask_timings: bool = False) -> str:
        return json.dumps(self.to_json_dict(mask_timings), indent=2, ensure_ascii=False) + "\n"


def _build_scorer(config: PipelineConfig) -> ScoreProvider:
    if config.scorer == "mock":
        return MockScorer(config.mock_rewards or {}, default=config.mock_default)
    if config.scorer == "embed":
        if config.text_vec is None:
            raise FrameSieveError("embed scorer needs a query embedding")
        return EmbeddingScorer(np.asarray(config.text_vec, dtype=np.float64))
    if config.scorer == "lmm":
        if config.scorer_endpoint is None:
            raise FrameSieveError("lmm scorer needs an endpoint")
        return ChatScorer(config.scorer_endpoint)
    raise FrameSieveError(f"unknown scorer {config.scorer!r}")


def _timestamps_us(
    features: FeatureSequence, indices: list[int], config: PipelineConfig
) -> list[int]:
    known = {f.original_index: f.timestamp_us for f in features.frames}
    out = []
    for idx in indices:
        if idx in known:
            out.append(known[idx])
        elif config.video_fps:
            out.append(round(idx / config.video_fps * 1e6))
        else:
            out.append(features.frames[features.nearest_position(idx)].timestamp_us)
    return out


def dig_select(
    features: FeatureSequence,
    frame_source: FrameSource | None,
    query: str,
    config: PipelineConfig,
    *,
    classifier: Callable[[str], QueryLabel] | None = None,
    scorer: ScoreProvider | None = None,
) -> SelectionReport:
    """Classify the query, route it, and emit the full selection report.

    ``classifier`` and ``scorer`` replace the endpoint-backed providers
    when given (deterministic runs, tests); otherwise the configured
    endpoints are used.
    """
    warnings: list[str] = []
    timings: dict[str, float] = {}

    t0 = time.perf_counter()
    if classifier is not None:
        label = classifier(query)
    else:
        if config.classifier_endpoint is None:
            raise FrameSieveError("no classifier endpoint configured")
        label = classify_query(
            query, config.classifier_endpoint, config.retry, fail_hard=config.fail_hard
        )
    timings["classify"] = time.perf_counter() - t0
    warnings.extend(label.warnings)

    if label.kind is QueryKind.GLOBAL:
        if config.total_frames:
            indices = uniform_sample(config.total_frames, config.budget)
        else:
            positions = uniform_sample(len(features), config.budget)
            indices = [features.frames[p].original_index for p in positions]
        return SelectionReport(
            query=query,
            query_label=label,
            strategy_used=STRATEGY_UNIFORM,
            peaks=[],
            rframes=None,
            rewards=None,
            selection_trace=None,
            refined_intervals=[],
            selected_frames=indices,
            selected_timestamps_us=_timestamps_us(features, indices, config),
            timings_s=timings,
            warnings=warnings,
        )

    t0 = time.perf_counter()
    rframe_set = cafs(features, config.prominence_threshold, config.boundary_mode)
    timings["cafs"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    provider = scorer if scorer is not None else _build_scorer(config)
    rewards = score_rframes(
        rframe_set,
        query,
        provider,
        frame_source,
        features=features,
        video_duration_s=config.video_duration_s,
        policy=config.retry,
        parallelism=config.parallelism,
        default_reward=config.default_reward,
    )
    timings["score"] = time.perf_counter() - t0
    warnings.extend(rewards.warnings)

    t0 = time.perf_counter()
    refined = refine_video(rframe_set, rewards, config.wlen, config.budget)
    timings["refine"] = time.perf_counter() - t0

    rframes_json = rframe_set.to_json_dict()
    return SelectionReport(
        query=query,
        query_label=label,
        strategy_used=STRATEGY_DIG,
        peaks=rframes_json["peaks"],
        rframes=rframes_json,
        rewards=rewards,
        selection_trace=refined.trace,
        refined_intervals=[[iv.start, iv.end] for iv in refined.timeline.intervals],
        selected_frames=refined.frames,
        selected_timestamps_us=_timestamps_us(features, refined.frames, config),
        timings_s=timings,
        warnings=warnings,
    )


def answer_query(
    selected_frames: list[int],
    frame_source: Callable[[int], bytes],
    query: str,
    endpoint: ChatEndpoint,
) -> str:
    """Send the selected frame images plus the query; return raw model text."""
    if not selected_frames:
        raise EmptySelectionError("answering needs at least one selected frame")
    content = [image_part(frame_source(idx)) for idx in selected_frames]
    content.append({"type": "text", "text": query})
    return chat_complete(endpoint, content)
