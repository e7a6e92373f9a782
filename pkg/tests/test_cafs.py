import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from framesieve import (
    FeatureSequence,
    FrameRef,
    cafs,
    compute_distances,
    detect_peaks,
    select_rframes,
)
from framesieve.cafs import Peak, RFrameSet
from framesieve.errors import TooShortError

from conftest import block_features
from oracles import filtered_prominence_oracle


def seq_from_vectors(vectors):
    vectors = np.asarray(vectors, dtype=np.float64)
    frames = tuple(FrameRef(i, i * 500000) for i in range(len(vectors)))
    return FeatureSequence(dim=vectors.shape[1], frames=frames, vectors=vectors)


class TestComputeDistances:
    def test_identical_vectors_give_zero(self):
        seq = seq_from_vectors([[1.0, 2.0], [1.0, 2.0], [1.0, 2.0]])
        assert compute_distances(seq).values.tolist() == [0.0, 0.0]

    def test_orthogonal_vectors_give_one(self):
        seq = seq_from_vectors([[1.0, 0.0], [0.0, 1.0]])
        assert compute_distances(seq).values.tolist() == [1.0]

    def test_hand_cosine(self):
        seq = seq_from_vectors([[1.0, 0.0], [2 ** -0.5, 2 ** -0.5]])
        d = compute_distances(seq).values[0]
        assert d == pytest.approx(1 - 2 ** -0.5, abs=1e-12)

    def test_too_short(self):
        seq = seq_from_vectors([[1.0, 0.0]])
        with pytest.raises(TooShortError):
            compute_distances(seq)

    def test_opposite_vectors_give_two(self):
        seq = seq_from_vectors([[1.0, 0.0], [-1.0, 0.0]])
        assert compute_distances(seq).values.tolist() == [2.0]

    def test_power_of_two_scaling_is_bitwise_invariant(self):
        rng = np.random.default_rng(5)
        vectors = rng.standard_normal((40, 8))
        base = compute_distances(seq_from_vectors(vectors)).values
        for scale in (0.25, 2.0, 1024.0):
            scaled = compute_distances(seq_from_vectors(vectors * scale)).values
            assert np.array_equal(base, scaled)

    @given(st.integers(0, 2**32 - 1), st.floats(0.01, 97.0))
    @settings(max_examples=40, deadline=None)
    def test_positive_scaling_keeps_rframes(self, seed, scale):
        rng = np.random.default_rng(seed)
        vectors = rng.standard_normal((30, 6))
        a = cafs(seq_from_vectors(vectors))
        b = cafs(seq_from_vectors(vectors * scale))
        assert a.frame_indices() == b.frame_indices()


class TestDetectPeaks:
    def test_worked_sequence(self):
        peaks = detect_peaks([0.05, 0.5, 0.05, 0.05, 0.3, 0.05])
        assert [(p.position, p.prominence) for p in peaks] == [
            (2, pytest.approx(0.45)),
            (5, pytest.approx(0.25)),
        ]

    def test_constant_sequence_has_no_peaks(self):
        assert detect_peaks([0.3] * 10) == []

    def test_below_threshold_rejected(self):
        assert detect_peaks([0.0, 0.05, 0.0], 0.1) == []

    def test_threshold_is_strict(self):
        assert detect_peaks([0.0, 0.1, 0.0], 0.1) == []
        got = detect_peaks([0.0, 0.100001, 0.0], 0.1)
        assert [p.position for p in got] == [2]

    def test_first_and_last_positions_never_peak(self):
        assert detect_peaks([0.9, 0.1, 0.9]) == []

    def test_short_sequences_yield_nothing(self):
        assert detect_peaks([]) == []
        assert detect_peaks([1.0]) == []
        assert detect_peaks([1.0, 0.5]) == []

    def test_walk_passes_equal_values(self):
        # the plateau at 0.3 must not stop the leftward walk from 0.5
        d = [0.4, 0.05, 0.3, 0.3, 0.5, 0.1]
        got = {p.position: p.prominence for p in detect_peaks(d, 0.0)}
        assert got[5] == pytest.approx(0.4)

    @given(
        st.lists(st.floats(0.0, 2.0, allow_nan=False, width=64), min_size=0, max_size=64),
        st.floats(0.0, 1.0),
    )
    @settings(max_examples=200, deadline=None)
    def test_matches_bruteforce_oracle(self, values, threshold):
        got = [(p.position, p.prominence) for p in detect_peaks(values, threshold)]
        want = filtered_prominence_oracle(values, threshold)
        assert got == want  # bitwise equality, no tolerance

    def test_integer_grid_matches_oracle(self):
        rng = np.random.default_rng(123)
        for _ in range(200):
            values = rng.integers(0, 5, size=rng.integers(3, 40)) / 2.0
            got = [(p.position, p.prominence) for p in detect_peaks(values, 0.4)]
            assert got == filtered_prominence_oracle(values, 0.4)


class TestSelectRFrames:
    def frames_10_to_70(self):
        frames = tuple(FrameRef(i, (i - 10) * 500000 + 1) for i in [10, 20, 30, 40, 50, 60, 70])
        return FeatureSequence(dim=2, frames=frames, vectors=np.ones((7, 2)))

    def test_strict_midpoint(self):
        feats = self.frames_10_to_70()
        got = select_rframes([Peak(2, 0.5), Peak(6, 0.5)], feats, "strict")
        assert [(r.frame_index, r.left_peak_frame, r.right_peak_frame) for r in got.rframes] == [
            (40, 20, 60)
        ]

    def test_padded_adds_virtual_boundaries(self):
        feats = self.frames_10_to_70()
        got = select_rframes([Peak(2, 0.5), Peak(6, 0.5)], feats, "padded")
        assert [(r.frame_index, r.left_peak_frame, r.right_peak_frame) for r in got.rframes] == [
            (15, 10, 20),
            (40, 20, 60),
            (65, 60, 70),
        ]

    def test_zero_peaks_padded_covers_whole_video(self):
        frames = tuple(FrameRef(i, i * 500000 + 1) for i in range(100))
        feats = FeatureSequence(dim=2, frames=frames, vectors=np.ones((100, 2)))
        got = select_rframes([], feats, "padded")
        assert [(r.frame_index, r.left_peak_frame, r.right_peak_frame) for r in got.rframes] == [
            (49, 0, 99)
        ]

    def test_fewer_than_two_peaks_strict_is_empty(self):
        feats = self.frames_10_to_70()
        assert len(select_rframes([], feats, "strict")) == 0
        assert len(select_rframes([Peak(3, 0.9)], feats, "strict")) == 0

    def test_peak_counts_match_rframe_counts(self):
        feats = self.frames_10_to_70()
        peaks = [Peak(2, 0.5), Peak(4, 0.4), Peak(6, 0.3)]
        assert len(select_rframes(peaks, feats, "strict")) == len(peaks) - 1
        assert len(select_rframes(peaks, feats, "padded")) == len(peaks) + 1


class TestCafs:
    def test_three_blocks_padded(self, three_block):
        got = cafs(three_block)
        assert got.frame_indices() == [67, 210, 360]
        assert [(p.position, p.frame) for p in got.peaks] == [(10, 135), (20, 285)]
        assert all(p.prominence == pytest.approx(1.0) for p in got.peaks)

    def test_identical_features_padded(self):
        seq = block_features([12])
        got = cafs(seq)
        assert got.frame_indices() == [(0 + 11) // 2]

    def test_identical_features_strict_is_empty(self):
        seq = block_features([12])
        assert cafs(seq, boundary_mode="strict").frame_indices() == []

    def test_rframe_bounds_invariant(self, three_block):
        got = cafs(three_block)
        for rf in got.rframes:
            assert rf.left_peak_frame <= rf.frame_index <= rf.right_peak_frame

    def test_propagates_too_short(self):
        seq = block_features([1])
        with pytest.raises(TooShortError):
            cafs(seq)

    def test_json_round_trip(self, three_block):
        got = cafs(three_block)
        back = RFrameSet.from_json_dict(got.to_json_dict())
        assert back == got
