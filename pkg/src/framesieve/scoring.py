"""Relevance rewards for r-frames, via pluggable providers.

Three providers share one contract (``score(request) -> float`` in
[0, 100]): a chat-LMM endpoint that judges a frame image against the
query, an embedding-similarity scorer for CLIP-style baselines, and a
deterministic mock for tests. Out-of-range or unparsable replies raise;
they are never silently clamped.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Mapping, Protocol

import numpy as np

from .cafs import RFrameSet
from .chat import ChatEndpoint, RetryPolicy, chat_complete, extract_first_json, image_part, with_retries
from .core import FeatureSequence
from .errors import (
    DegenerateVectorError,
    EmptyQueryError,
    MissingFieldError,
    OutOfRangeError,
    ProviderDownError,
)

log = logging.getLogger(__name__)

REWARD_PROMPT = """You are a reward model for a video-based question-answering system.

Task

You will receive a question and a sampled video frame. Your task is to evaluate the relevance of this frame for answering the question. Please assign a reward score that indicates how useful or informative the provided frame is in the context of the given question.

Instructions for Analysis and Response

In your analysis, please perform the following steps to finish your evaluation:

1. Describe the visual content of the sampled frame, focusing on elements relevant to the question, if such elements are present.

2. Assign a relevance reward between 0 and 100 based on: (1) The sampled frame's direct usefulness in answering the question (2) Whether the frame suggests that adjacent frames might provide additional information that help answer the question more effectively.

Please provide your answer in the following format:
{{"description": str, "reward": int}}.

User Input

Video Duration: {duration} seconds;
Sampled Frame Timestamp: {timestamp} seconds;
Question: {question}
"""


@dataclass(frozen=True)
class ScoreRequest:
    """One frame-vs-query judgment job."""

    query: str
    frame_index: int
    frame_timestamp_s: float
    video_duration_s: float
    frame_image: bytes | None = None
    frame_vector: np.ndarray | None = None

    def __post_init__(self):
        if not self.query or not self.query.strip():
            raise EmptyQueryError("score request needs a non-empty query")
        if not 0 <= self.frame_timestamp_s <= self.video_duration_s:
            raise ValueError(
                f"timestamp {self.frame_timestamp_s} outside [0, {self.video_duration_s}]"
            )


@dataclass(frozen=True)
class RewardVector:
    """Per-r-frame rewards in [0, 100], aligned with an RFrameSet."""

    values: tuple[float, ...]
    provider_tag: str
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        for v in self.values:
            if not 0.0 <= v <= 100.0:
                raise OutOfRangeError(f"reward {v} outside [0, 100]")

    def __len__(self) -> int:
        return len(self.values)

    def to_json_dict(self) -> dict:
        return {
            "provider": self.provider_tag,
            "values": list(self.values),
            "warnings": list(self.warnings),
        }


class ScoreProvider(Protocol):
    tag: str

    def score(self, request: ScoreRequest) -> float: ...


def build_reward_prompt(request: ScoreRequest) -> str:
    """Render the reward prompt with duration, timestamp, and question."""
    return REWARD_PROMPT.format(
        duration=request.video_duration_s,
        timestamp=request.frame_timestamp_s,
        question=request.query,
    )


def parse_reward_response(text: str) -> float:
    """Extract the ``reward`` field from provider text.

    Raises NoJsonError, MissingFieldError, or OutOfRangeError.
    """
    obj = extract_first_json(text)
    if "reward" not in obj:
        raise MissingFieldError("response JSON lacks a 'reward' field")
    reward = obj["reward"]
    if isinstance(reward, bool) or not isinstance(reward, (int, float)):
        raise MissingFieldError(f"reward is not a number: {reward!r}")
    if not 0 <= reward <= 100:
        raise OutOfRangeError(f"reward {reward} outside [0, 100]")
    return float(reward)


def embed_sim_score(text_vec: np.ndarray, image_vec: np.ndarray) -> float:
    """Map cosine similarity onto the reward scale: 100 * max(0, cos)."""
    t = np.asarray(text_vec, dtype=np.float64).ravel()
    v = np.asarray(image_vec, dtype=np.float64).ravel()
    sq_t = float(t @ t)
    sq_v = float(v @ v)
    if sq_t == 0.0 or sq_v == 0.0:
        raise DegenerateVectorError("embedding similarity of a zero vector")
    cos = float(t @ v) / float(np.sqrt(sq_t * sq_v))
    return 100.0 * max(0.0, cos)


@dataclass(frozen=True)
class MockScorer:
    """Deterministic rewards keyed by original frame index."""

    rewards_by_frame: Mapping[int, float]
    default: float = 0.0
    tag: str = "mock"

    def score(self, request: ScoreRequest) -> float:
        return float(self.rewards_by_frame.get(request.frame_index, self.default))


@dataclass(frozen=True, eq=False)
class EmbeddingScorer:
    """CLIP-style baseline: similarity of a query embedding to frame embeddings."""

    text_vec: np.ndarray
    tag: str = "embed"

    def score(self, request: ScoreRequest) -> float:
        if request.frame_vector is None:
            raise ValueError(f"no embedding provided for frame {request.frame_index}")
        return embed_sim_score(self.text_vec, request.frame_vector)


@dataclass(frozen=True)
class ChatScorer:
    """Scores frames by asking a chat LMM endpoint, one image per request."""

    endpoint: ChatEndpoint
    tag: str = "lmm"

    def score(self, request: ScoreRequest) -> float:
        if request.frame_image is None:
            raise ValueError(f"no image bytes for frame {request.frame_index}")
        content = [{"type": "text", "text": build_reward_prompt(request)}]
        content.append(image_part(request.frame_image))
        reply = chat_complete(self.endpoint, content)
        return parse_reward_response(reply)


FrameSource = Callable[[int], "bytes | np.ndarray | None"]


def _build_request(
    query: str,
    frame_index: int,
    frame_source: FrameSource | None,
    features: FeatureSequence | None,
    video_duration_s: float | None,
) -> ScoreRequest:
    timestamp_s = 0.0
    duration_s = video_duration_s if video_duration_s is not None else 0.0
    if features is not None:
        pos = features.nearest_position(frame_index)
        timestamp_s = features.frames[pos].timestamp_us / 1e6
        if video_duration_s is None:
            duration_s = features.duration_s
    duration_s = max(duration_s, timestamp_s)
    payload = frame_source(frame_index) if frame_source is not None else None
    image = payload if isinstance(payload, (bytes, bytearray)) else None
    vector = payload if isinstance(payload, np.ndarray) else None
    return ScoreRequest(
        query=query,
        frame_index=frame_index,
        frame_timestamp_s=timestamp_s,
        video_duration_s=duration_s,
        frame_image=bytes(image) if image is not None else None,
        frame_vector=vector,
    )


def score_rframes(
    rframes: RFrameSet,
    query: str,
    provider: ScoreProvider,
    frame_source: FrameSource | None = None,
    *,
    features: FeatureSequence | None = None,
    video_duration_s: float | None = None,
    policy: RetryPolicy = RetryPolicy(),
    parallelism: int = 4,
    default_reward: float = 0.0,
) -> RewardVector:
    """One reward per r-frame, in r-frame order regardless of completion order.

    Each frame gets its own retry budget; a frame whose retries are
    exhausted receives ``default_reward`` and a warning. If every frame
    fails, the provider is considered down and ProviderDownError is raised.
    """
    if not query or not query.strip():
        raise EmptyQueryError("scoring needs a non-empty query")
    indices = rframes.frame_indices()
    requests_ = [
        _build_request(query, idx, frame_source, features, video_duration_s) for idx in indices
    ]

    def run_one(req: ScoreRequest) -> tuple[float, str | None]:
        try:
            return with_retries(lambda: float(provider.score(req)), policy), None
        except Exception as exc:  # noqa: BLE001
            message = (
                f"frame {req.frame_index}: scoring failed after {policy.attempts} "
                f"attempts ({exc}); using default reward {default_reward}"
            )
            log.warning(message)
            return float(default_reward), message

    if parallelism > 1 and len(requests_) > 1:
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            results = list(pool.map(run_one, requests_))
    else:
        results = [run_one(req) for req in requests_]

    warnings = tuple(msg for _, msg in results if msg is not None)
    if requests_ and len(warnings) == len(requests_):
        raise ProviderDownError(
            f"provider {provider.tag!r} failed for all {len(requests_)} frames"
        )
    values = tuple(value for value, _ in results)
    return RewardVector(values=values, provider_tag=provider.tag, warnings=warnings)
