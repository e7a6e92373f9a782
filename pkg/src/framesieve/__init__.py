"""Query-adaptive frame selection for long-video question answering."""

__version__ = "0.1.0"

from .cafs import (
    DistanceSequence,
    Peak,
    RFrame,
    RFrameSet,
    cafs,
    compute_distances,
    detect_peaks,
    select_rframes,
)
from .chat import ChatEndpoint, RetryPolicy
from .classify import (
    QueryKind,
    QueryLabel,
    build_classification_prompt,
    classify_query,
    parse_classification,
)
from .core import (
    FeatureSequence,
    FrameRef,
    Interval,
    RefinedTimeline,
    fps_sample,
    merge_intervals,
    sample_timeline,
    uniform_sample,
)
from .digf import read_digf, write_digf
from .errors import FrameSieveError
from .metrics import CoverageScore, glc, loc
from .pipeline import PipelineConfig, SelectionReport, answer_query, dig_select
from .refine import SelectionTrace, build_segments, iterative_select, refine_video
from .scoring import (
    ChatScorer,
    EmbeddingScorer,
    MockScorer,
    RewardVector,
    ScoreRequest,
    build_reward_prompt,
    embed_sim_score,
    parse_reward_response,
    score_rframes,
)

__all__ = [
    "__version__",
    "CoverageScore",
    "ChatEndpoint",
    "ChatScorer",
    "DistanceSequence",
    "EmbeddingScorer",
    "FeatureSequence",
    "FrameRef",
    "FrameSieveError",
    "Interval",
    "MockScorer",
    "Peak",
    "PipelineConfig",
    "QueryKind",
    "QueryLabel",
    "RFrame",
    "RFrameSet",
    "RefinedTimeline",
    "RetryPolicy",
    "RewardVector",
    "ScoreRequest",
    "SelectionReport",
    "SelectionTrace",
    "answer_query",
    "build_classification_prompt",
    "build_reward_prompt",
    "build_segments",
    "cafs",
    "classify_query",
    "compute_distances",
    "detect_peaks",
    "dig_select",
    "embed_sim_score",
    "fps_sample",
    "glc",
    "iterative_select",
    "loc",
    "merge_intervals",
    "parse_classification",
    "parse_reward_response",
    "read_digf",
    "refine_video",
    "sample_timeline",
    "score_rframes",
    "select_rframes",
    "uniform_sample",
    "write_digf",
]
