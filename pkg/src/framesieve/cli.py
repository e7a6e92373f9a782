"""Command-line surface: every stage standalone plus the end-to-end run.

Every intermediate artifact is a file so stages compose offline:
``cafs`` -> ``score`` -> ``refine`` reproduces one ``select`` run exactly.
Endpoint secrets come from environment variables only.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .bench import InstanceParams, compare
from .cafs import RFrameSet, cafs
from .chat import DEFAULT_ENDPOINT_ENV, ChatEndpoint, RetryPolicy
from .classify import classify_query
from .core import FeatureSequence
from .digf import read_digf
from .errors import FrameSieveError, ProviderDownError
from .metrics import glc, loc
from .pipeline import PipelineConfig, answer_query, dig_select
from .refine import refine_video
from .scoring import ChatScorer, EmbeddingScorer, MockScorer, RewardVector, score_rframes


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _non_negative_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return value


def _endpoint_from(args, attr: str = "endpoint") -> ChatEndpoint:
    url = getattr(args, attr, None) or os.environ.get(DEFAULT_ENDPOINT_ENV)
    if not url:
        raise FrameSieveError(
            f"no endpoint configured; pass --{attr.replace('_', '-')} "
            f"or set {DEFAULT_ENDPOINT_ENV}"
        )
    return ChatEndpoint(url=url, model=args.model, timeout_s=args.timeout)


def _load_rframes(path: str) -> RFrameSet:
    with open(path) as fh:
        return RFrameSet.from_json_dict(json.load(fh))


def _load_rewards(path: str) -> RewardVector:
    with open(path) as fh:
        data = json.load(fh)
    return RewardVector(
        values=tuple(data["values"]),
        provider_tag=data.get("provider", "file"),
        warnings=tuple(data.get("warnings", [])),
    )


def _write_json(path: str, payload: dict) -> None:
    Path(path).write_text(json.dumps(payload, indent=2, ensure_ascii=False) + "\n")


def _image_source(frames_dir: str):
    root = Path(frames_dir)

    def load(index: int) -> bytes:
        candidate = root / f"{index}.jpg"
        if not candidate.exists():
            raise FrameSieveError(f"no frame image for index {index} under {root}")
        return candidate.read_bytes()

    return load


def _scorer_setup(args, features: FeatureSequence):
    """Build (provider, frame_source) for the chosen scorer."""
    if args.scorer == "mock":
        mapping: dict[int, float] = {}
        default = 0.0
        if args.mock_map:
            with open(args.mock_map) as fh:
                raw = json.load(fh)
            default = float(raw.pop("default", 0.0))
            mapping = {int(k): float(v) for k, v in raw.items()}
        return MockScorer(mapping, default=default), None
    if args.scorer == "embed":
        if not args.text_vec:
            raise FrameSieveError("--scorer embed requires --text-vec FILE")
        with open(args.text_vec) as fh:
            text_vec = np.asarray(json.load(fh), dtype=np.float64)
        source = lambda idx: features.vectors[features.nearest_position(idx)]  # noqa: E731
        return EmbeddingScorer(text_vec), source
    if args.scorer == "lmm":
        if not args.frames:
            raise FrameSieveError("--scorer lmm requires --frames DIR with frame images")
        endpoint = _endpoint_from(args, "scorer_endpoint")
        return ChatScorer(endpoint), _image_source(args.frames)
    raise FrameSieveError(f"unknown scorer {args.scorer!r}")


def _cmd_classify(args) -> int:
    endpoint = _endpoint_from(args)
    policy = RetryPolicy(attempts=args.attempts)
    label = classify_query(args.query, endpoint, policy, fail_hard=args.fail_hard)
    print(json.dumps(label.to_json_dict(), ensure_ascii=False))
    return 0


def _cmd_cafs(args) -> int:
    features = read_digf(args.features)
    result = cafs(features, args.threshold, args.boundary)
    _write_json(args.out, result.to_json_dict())
    print(
        f"{len(result)} r-frames from {len(features)} candidates "
        f"({len(result.peaks)} prominent peaks) -> {args.out}"
    )
    return 0


def _cmd_score(args) -> int:
    features = read_digf(args.features)
    rframes = _load_rframes(args.rframes)
    provider, frame_source = _scorer_setup(args, features)
    policy = RetryPolicy(attempts=args.attempts)
    rewards = score_rframes(
        rframes,
        args.query,
        provider,
        frame_source,
        features=features,
        policy=policy,
        parallelism=args.parallelism,
    )
    _write_json(args.out, rewards.to_json_dict())
    print(f"{len(rewards)} rewards via {rewards.provider_tag} -> {args.out}")
    return 0


def _cmd_refine(args) -> int:
    rframes = _load_rframes(args.rframes)
    rewards = _load_rewards(args.rewards)
    result = refine_video(rframes, rewards, args.wlen, args.budget)
    payload = {
        "selected_frames": {"indices": result.frames},
        "selection_trace": result.trace.to_json_dict(),
        "refined_intervals": [[iv.start, iv.end] for iv in result.timeline.intervals],
        "wlen": args.wlen,
        "budget": args.budget,
    }
    _write_json(args.out, payload)
    print(
        f"{len(result.frames)} frames from {len(result.timeline.intervals)} "
        f"refined intervals -> {args.out}"
    )
    return 0


def _cmd_select(args) -> int:
    features = read_digf(args.features)
    provider, frame_source = _scorer_setup(args, features)
    total_frames = args.total_frames
    video_fps = args.video_fps
    if args.manifest:
        with open(args.manifest) as fh:
            manifest = json.load(fh)
        total_frames = total_frames or manifest.get("total_frames")
        video_fps = video_fps or manifest.get("video_fps")
    config = PipelineConfig(
        budget=args.budget,
        prominence_threshold=args.threshold,
        wlen=args.wlen,
        boundary_mode=args.boundary,
        scorer=args.scorer,
        retry=RetryPolicy(attempts=args.attempts),
        parallelism=args.parallelism,
        fail_hard=args.fail_hard,
        seed=args.seed,
        total_frames=total_frames,
        video_fps=video_fps,
        classifier_endpoint=_endpoint_from(args, "classifier_endpoint"),
    )
    report = dig_select(features, frame_source, args.query, config, scorer=provider)
    _write_json(args.out, report.to_json_dict())
    print(
        f"strategy={report.strategy_used} frames={report.selected_frames} -> {args.out}"
    )
    return 0


def _cmd_metrics(args) -> int:
    features = read_digf(args.features)
    rframes = _load_rframes(args.rframes)
    if args.metric == "loc":
        score = loc(features, rframes)
    else:
        score = glc(features, rframes, sample_n=args.samples, seed=args.seed)
    print(
        json.dumps(
            {
                "metric": args.metric,
                "value": score.value,
                "samples": score.sample_count,
                "seed": score.seed,
            }
        )
    )
    return 0


def _cmd_bench(args) -> int:
    params = InstanceParams(
        frames=args.frames,
        scenes=args.scenes,
        dim=args.dim,
        jitter=args.jitter,
        reward_hi=args.reward_hi,
        reward_lo=args.reward_lo,
    )
    seeds = list(range(args.seed, args.seed + args.trials))
    table = compare(
        params,
        strategies=args.strategies.split(","),
        budgets=[int(b) for b in args.budgets.split(",")],
        seeds=seeds,
        rhos=[float(r) for r in args.rhos.split(",")],
        sigmas=[float(s) for s in args.sigmas.split(",")],
        out=args.out,
        wlen=args.wlen,
    )
    print(table, end="")
    return 0


def _cmd_answer(args) -> int:
    with open(args.selection) as fh:
        selection = json.load(fh)
    indices = selection.get("selected_frames", {}).get("indices")
    if indices is None:
        raise FrameSieveError(f"{args.selection} has no selected_frames.indices")
    endpoint = _endpoint_from(args)
    reply = answer_query(indices, _image_source(args.frames), args.query, endpoint)
    print(reply)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="framesieve",
        description="Query-adaptive frame selection for long-video question answering.",
    )
    parser.add_argument("--version", action="version", version=f"framesieve {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_endpoint_flags(p, *names):
        for name in names:
            p.add_argument(f"--{name.replace('_', '-')}", dest=name, default=None)
        p.add_argument("--model", default="default")
        p.add_argument("--timeout", type=float, default=60.0)
        p.add_argument("--attempts", type=_positive_int, default=3)

    p = sub.add_parser("classify", help="label a query as global or localized")
    p.add_argument("--query", "-Q", required=True)
    add_endpoint_flags(p, "endpoint")
    p.add_argument("--fail-hard", action="store_true")
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("cafs", help="segment a feature file into r-frames")
    p.add_argument("--features", required=True)
    p.add_argument("--threshold", type=float, default=0.1)
    p.add_argument("--boundary", choices=["padded", "strict"], default="padded")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_cafs)

    p = sub.add_parser("score", help="assign query-relevance rewards to r-frames")
    p.add_argument("--features", required=True)
    p.add_argument("--rframes", required=True)
    p.add_argument("--query", "-Q", required=True)
    p.add_argument("--scorer", choices=["lmm", "embed", "mock"], default="mock")
    p.add_argument("--mock-map", default=None)
    p.add_argument("--text-vec", default=None)
    p.add_argument("--frames", default=None, help="directory of <index>.jpg frame images")
    p.add_argument("--parallelism", type=_positive_int, default=4)
    p.add_argument("--out", required=True)
    add_endpoint_flags(p, "scorer_endpoint")
    p.set_defaults(func=_cmd_score)

    p = sub.add_parser("refine", help="reward-guided selection and sampling")
    p.add_argument("--rframes", required=True)
    p.add_argument("--rewards", required=True)
    p.add_argument("--wlen", type=_non_negative_int, default=2)
    p.add_argument("--budget", type=_positive_int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_refine)

    p = sub.add_parser("select", help="end-to-end query-adaptive selection")
    p.add_argument("--features", required=True)
    p.add_argument("--query", "-Q", required=True)
    p.add_argument("--budget", type=_positive_int, required=True)
    p.add_argument("--threshold", type=float, default=0.1)
    p.add_argument("--boundary", choices=["padded", "strict"], default="padded")
    p.add_argument("--wlen", type=_non_negative_int, default=2)
    p.add_argument("--scorer", choices=["lmm", "embed", "mock"], default="mock")
    p.add_argument("--mock-map", default=None)
    p.add_argument("--text-vec", default=None)
    p.add_argument("--frames", default=None)
    p.add_argument("--parallelism", type=_positive_int, default=4)
    p.add_argument("--fail-hard", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--total-frames", type=_positive_int, default=None)
    p.add_argument("--video-fps", type=float, default=None)
    p.add_argument("--manifest", default=None,
                   help="extractor manifest supplying total_frames/video_fps")
    p.add_argument("--out", required=True)
    add_endpoint_flags(p, "classifier_endpoint", "scorer_endpoint")
    p.set_defaults(func=_cmd_select)

    p = sub.add_parser("metrics", help="coverage metrics for an r-frame set")
    p.add_argument("metric", choices=["loc", "glc"])
    p.add_argument("--features", required=True)
    p.add_argument("--rframes", required=True)
    p.add_argument("--samples", type=_positive_int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_metrics)

    p = sub.add_parser("bench", help="synthetic strategy comparison")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=_positive_int, default=5)
    p.add_argument("--out", required=True)
    p.add_argument("--strategies", default="uni,fps,cafs_topk,dig")
    p.add_argument("--budgets", default="16")
    p.add_argument("--rhos", default="0.1")
    p.add_argument("--sigmas", default="0.0")
    p.add_argument("--frames", type=_positive_int, default=2000)
    p.add_argument("--scenes", type=_positive_int, default=20)
    p.add_argument("--dim", type=_positive_int, default=32)
    p.add_argument("--jitter", type=float, default=0.0)
    p.add_argument("--wlen", type=_non_negative_int, default=0)
    p.add_argument("--reward-hi", type=float, default=100.0)
    p.add_argument("--reward-lo", type=float, default=0.0)
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("answer", help="ask a chat endpoint with the selected frames")
    p.add_argument("--selection", required=True)
    p.add_argument("--frames", required=True)
    p.add_argument("--query", "-Q", required=True)
    add_endpoint_flags(p, "endpoint")
    p.set_defaults(func=_cmd_answer)

    return parser


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ProviderDownError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except FrameSieveError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
