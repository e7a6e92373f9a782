import numpy as np
import pytest

from framesieve import FeatureSequence, FrameRef


def block_features(block_lengths, dim=None, stride=1, step_us=500000, fps=2.0, directions=None):
    """Piecewise-constant feature sequence: one unit direction per block."""
    n_blocks = len(block_lengths)
    if dim is None:
        dim = max(n_blocks, 2)
    if directions is None:
        directions = np.eye(n_blocks, dim)
    total = sum(block_lengths)
    vectors = np.repeat(np.asarray(directions, dtype=np.float64), block_lengths, axis=0)
    frames = tuple(FrameRef(i * stride, i * step_us) for i in range(total))
    return FeatureSequence(dim=dim, frames=frames, vectors=vectors, source_fps=fps)


@pytest.fixture
def three_block():
    """30 candidates sampled every 15 source frames; three orthogonal blocks."""
    return block_features([10, 10, 10], dim=4, stride=15)
