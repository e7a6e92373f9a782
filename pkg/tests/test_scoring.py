import numpy as np
import pytest

from framesieve import (
    ChatEndpoint,
    ChatScorer,
    EmbeddingScorer,
    MockScorer,
    RetryPolicy,
    ScoreRequest,
    build_reward_prompt,
    cafs,
    embed_sim_score,
    parse_reward_response,
    score_rframes,
)
from framesieve.errors import (
    DegenerateVectorError,
    EmptyQueryError,
    MissingFieldError,
    NoJsonError,
    OutOfRangeError,
    ProviderDownError,
)
from framesieve.scoring import RewardVector

from stubchat import StubChat, reward_by_timestamp, reward_content

QUERY = "What kind of bike is the man riding?"


def request(timestamp=30.5, duration=120.0, index=40):
    return ScoreRequest(
        query=QUERY,
        frame_index=index,
        frame_timestamp_s=timestamp,
        video_duration_s=duration,
    )


class TestRewardPrompt:
    def test_contains_answer_contract(self):
        text = build_reward_prompt(request())
        assert '{"description": str, "reward": int}' in text

    def test_substitutes_metadata(self):
        text = build_reward_prompt(request(timestamp=30.5, duration=120.0))
        assert "120.0" in text
        assert "30.5" in text
        assert QUERY in text

    def test_mentions_both_scoring_factors(self):
        text = build_reward_prompt(request())
        assert "direct usefulness" in text.lower()
        assert "adjacent frames" in text.lower()

    def test_empty_query_rejected_before_rendering(self):
        with pytest.raises(EmptyQueryError):
            ScoreRequest(query="  ", frame_index=0, frame_timestamp_s=0, video_duration_s=1)

    def test_timestamp_beyond_duration_rejected(self):
        with pytest.raises(ValueError):
            request(timestamp=10.0, duration=5.0)


class TestParseRewardResponse:
    def test_direct(self):
        assert parse_reward_response('{"description":"a red bike","reward":85}') == 85

    def test_fenced(self):
        text = 'Here is my answer:\n```json\n{"description":"sky","reward":5}\n```'
        assert parse_reward_response(text) == 5

    def test_real_valued_reward(self):
        assert parse_reward_response('{"description":"x","reward":62.5}') == 62.5

    def test_out_of_range(self):
        with pytest.raises(OutOfRangeError):
            parse_reward_response('{"description":"x","reward":150}')
        with pytest.raises(OutOfRangeError):
            parse_reward_response('{"description":"x","reward":-1}')

    def test_missing_field(self):
        with pytest.raises(MissingFieldError):
            parse_reward_response('{"description":"x"}')
        with pytest.raises(MissingFieldError):
            parse_reward_response('{"description":"x","reward":"high"}')

    def test_no_json(self):
        with pytest.raises(NoJsonError):
            parse_reward_response("I cannot answer that.")
        with pytest.raises(NoJsonError):
            parse_reward_response("")


class TestEmbedSimScore:
    def test_identical(self):
        v = np.array([0.3, 0.4, 0.5])
        assert embed_sim_score(v, v) == 100.0

    def test_orthogonal(self):
        assert embed_sim_score(np.array([1.0, 0.0]), np.array([0.0, 1.0])) == 0.0

    def test_negative_cosine_clamps_to_zero(self):
        assert embed_sim_score(np.array([1.0, 0.0]), np.array([-0.8, 0.6])) == 0.0

    def test_zero_vector_rejected(self):
        with pytest.raises(DegenerateVectorError):
            embed_sim_score(np.zeros(3), np.ones(3))


class TestRewardVector:
    def test_bounds_enforced(self):
        with pytest.raises(OutOfRangeError):
            RewardVector(values=(50.0, 101.0), provider_tag="mock")
        with pytest.raises(OutOfRangeError):
            RewardVector(values=(-0.5,), provider_tag="mock")


class TestScoreRFrames:
    def test_mock_keyed_by_frame_index(self, three_block):
        rfs = cafs(three_block)
        assert rfs.frame_indices() == [67, 210, 360]
        provider = MockScorer({210: 90.0}, default=10.0)
        got = score_rframes(rfs, QUERY, provider, features=three_block)
        assert got.values == (10.0, 90.0, 10.0)
        assert got.provider_tag == "mock"
        assert got.warnings == ()

    def test_mock_is_referentially_transparent(self, three_block):
        rfs = cafs(three_block)
        provider = MockScorer({67: 1.0, 210: 2.0, 360: 3.0})
        first = score_rframes(rfs, QUERY, provider, features=three_block)
        second = score_rframes(rfs, QUERY, provider, features=three_block, parallelism=8)
        assert first == second

    def test_embedding_provider_scores_by_similarity(self, three_block):
        rfs = cafs(three_block)
        text_vec = three_block.vectors[14]  # block-2 direction
        provider = EmbeddingScorer(np.asarray(text_vec, dtype=np.float64))
        source = lambda idx: three_block.vectors[three_block.nearest_position(idx)]  # noqa: E731
        got = score_rframes(rfs, QUERY, provider, source, features=three_block)
        assert got.values == (0.0, 100.0, 0.0)

    def test_chat_provider_round_trip(self, three_block):
        rfs = cafs(three_block)
        with StubChat() as stub:
            stub.routes["/v1/chat/completions"] = reward_by_timestamp(
                {"2.0": 10, "7.0": 90, "12.0": 10}
            )
            provider = ChatScorer(ChatEndpoint(url=stub.url("/v1/chat/completions")))
            got = score_rframes(
                rfs,
                QUERY,
                provider,
                lambda idx: b"\xff\xd8fakejpeg",
                features=three_block,
                policy=RetryPolicy(attempts=2, backoff_s=0),
            )
        assert got.values == (10.0, 90.0, 10.0)
        assert got.provider_tag == "lmm"

    def test_chat_wire_contract(self, three_block):
        rfs = cafs(three_block)
        with StubChat() as stub:
            stub.routes["/chat"] = reward_by_timestamp({}, default=7)
            endpoint = ChatEndpoint(url=stub.url("/chat"), model="scorer-v1")
            provider = ChatScorer(endpoint)
            score_rframes(
                rfs,
                QUERY,
                provider,
                lambda idx: b"jpegbytes",
                features=three_block,
                parallelism=1,
            )
            path, body = stub.requests[0]
        assert body["model"] == "scorer-v1"
        assert body["temperature"] == 0.0
        message = body["messages"][0]
        assert message["role"] == "user"
        kinds = [part["type"] for part in message["content"]]
        assert kinds == ["text", "image_url"]
        url = message["content"][1]["image_url"]["url"]
        assert url.startswith("data:image/jpeg;base64,")

    def test_failed_frames_get_default_and_warning(self, three_block):
        rfs = cafs(three_block)

        class Flaky:
            tag = "flaky"

            def score(self, req):
                if req.frame_index == 210:
                    raise RuntimeError("boom")
                return 33.0

        got = score_rframes(
            rfs,
            QUERY,
            Flaky(),
            features=three_block,
            policy=RetryPolicy(attempts=3, backoff_s=0),
            default_reward=0.0,
        )
        assert got.values == (33.0, 0.0, 33.0)
        assert len(got.warnings) == 1
        assert "210" in got.warnings[0]

    def test_all_frames_failing_is_provider_down(self, three_block):
        rfs = cafs(three_block)

        class Dead:
            tag = "dead"

            def score(self, req):
                raise RuntimeError("unreachable")

        with pytest.raises(ProviderDownError):
            score_rframes(
                rfs,
                QUERY,
                Dead(),
                features=three_block,
                policy=RetryPolicy(attempts=2, backoff_s=0),
            )

    def test_retry_count_respected(self, three_block):
        rfs = cafs(three_block)
        calls = []

        class CountThenOk:
            tag = "count"

            def score(self, req):
                calls.append(req.frame_index)
                if len([c for c in calls if c == req.frame_index]) < 3:
                    raise RuntimeError("try again")
                return 44.0

        got = score_rframes(
            rfs,
            QUERY,
            CountThenOk(),
            features=three_block,
            policy=RetryPolicy(attempts=3, backoff_s=0),
            parallelism=1,
        )
        assert got.values == (44.0, 44.0, 44.0)
        assert len(calls) == 9

    def test_out_of_range_reply_becomes_warning_not_clamp(self, three_block):
        rfs = cafs(three_block)

        class TooBig:
            tag = "big"

            def score(self, req):
                if req.frame_index == 210:
                    return parse_reward_response(reward_content("x", 500))
                return 50.0

        got = score_rframes(
            rfs,
            QUERY,
            TooBig(),
            features=three_block,
            policy=RetryPolicy(attempts=2, backoff_s=0),
        )
        assert got.values == (50.0, 0.0, 50.0)
        assert any("210" in w for w in got.warnings)

    def test_empty_query_rejected(self, three_block):
        rfs = cafs(three_block)
        with pytest.raises(EmptyQueryError):
            score_rframes(rfs, "   ", MockScorer({}), features=three_block)
