"""DIGF binary feature-file format.

Layout (little-endian):

    magic   4 bytes  b"DIGF"
    version u32      currently 1
    dim     u32
    count   u64
    fps     f64      nominal candidate sampling rate
    records count x { original_index u64, timestamp_us u64, vector dim x f32 }

The binary file is authoritative. An optional JSON sidecar (same stem,
``.json``) carries human-readable metadata only.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .core import FeatureSequence, FrameRef
from .errors import (
    DigfMagicError,
    DigfOrderError,
    DigfTruncatedError,
    DigfVersionError,
)

MAGIC = b"DIGF"
VERSION = 1
_HEADER = struct.Struct("<4sIIQd")


def write_digf(features: FeatureSequence, path: str | Path, video_path: str | None = None) -> None:
    """Write a feature sequence to ``path``; optionally emit a JSON sidecar."""
    path = Path(path)
    vectors = np.ascontiguousarray(features.vectors, dtype="<f4")
    head = struct.Struct("<QQ")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, features.dim, len(features), features.source_fps))
        for frame, vec in zip(features.frames, vectors):
            fh.write(head.pack(frame.original_index, frame.timestamp_us))
            fh.write(vec.tobytes())
    if video_path is not None:
        sidecar = {"video_path": video_path, "dim": features.dim, "count": len(features)}
        path.with_suffix(".json").write_text(json.dumps(sidecar, indent=2) + "\n")


def read_digf(path: str | Path) -> FeatureSequence:
    """Read and validate a DIGF file.

    Raises:
        DigfMagicError: wrong magic bytes.
        DigfVersionError: unsupported version.
        DigfTruncatedError: file shorter (or longer) than the header promises.
        DigfOrderError: record indices or timestamps not strictly increasing.
    """
    data = Path(path).read_bytes()
    if data[:4] != MAGIC:
        raise DigfMagicError(f"{path}: bad magic {data[:4]!r}")
    if len(data) < _HEADER.size:
        raise DigfTruncatedError(f"{path}: incomplete header ({len(data)} bytes)")
    _, version, dim, count, fps = _HEADER.unpack_from(data, 0)
    if version != VERSION:
        raise DigfVersionError(f"{path}: unsupported version {version}")
    record = np.dtype([("index", "<u8"), ("stamp", "<u8"), ("vec", "<f4", (dim,))])
    expected = _HEADER.size + count * record.itemsize
    if len(data) != expected:
        raise DigfTruncatedError(
            f"{path}: expected {expected} bytes for {count} records, got {len(data)}"
        )
    rows = np.frombuffer(data, dtype=record, count=count, offset=_HEADER.size)
    indices = rows["index"].astype(np.int64)
    stamps = rows["stamp"].astype(np.int64)
    if np.any(np.diff(indices) <= 0):
        raise DigfOrderError(f"{path}: original_index values are not strictly increasing")
    if np.any(np.diff(stamps) <= 0):
        raise DigfOrderError(f"{path}: timestamp_us values are not strictly increasing")
    frames = tuple(FrameRef(int(i), int(t)) for i, t in zip(indices, stamps))
    vectors = rows["vec"].reshape(count, dim).copy()
    return FeatureSequence(dim=dim, frames=frames, vectors=vectors, source_fps=fps)
