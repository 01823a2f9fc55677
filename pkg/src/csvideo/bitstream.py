"""Binary serialization of an encoded stream.

Layout (all little-endian): a fixed header
``magic "VALC", version u8, width u16, height u16, block size u8, GOP
size u8, key ratio f32, non-key ratio f32, allocation id u8, frame count
u32`` followed per frame by ``kind u8``, the per-block counts as u16 in
raster order, and the coefficient values as f32 in canonical per-block
order. Coefficients travel unquantized.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .codec import EncodedStream, FramePayload
from .sensing import KIND_KEY, KIND_NONKEY

MAGIC = b"VALC"
VERSION = 1
_HEADER = struct.Struct("<4sBHHBBffBI")

_ALLOCATION_IDS = {"THI": 0, "MDD": 1, "FIXED": 2}
_ALLOCATION_NAMES = {v: k for k, v in _ALLOCATION_IDS.items()}
_KIND_IDS = {KIND_KEY: 0, KIND_NONKEY: 1}
_KIND_NAMES = {v: k for k, v in _KIND_IDS.items()}


class BitstreamError(ValueError):
    """The byte stream violates the container format."""


class TruncatedStreamError(BitstreamError):
    """The byte stream ends before a frame payload is complete."""

    def __init__(self, frame_index: int, detail: str):
        super().__init__(f"stream truncated in frame {frame_index}: {detail}")
        self.frame_index = frame_index


def write_stream(stream: EncodedStream) -> bytes:
    """Serialize a stream; the inverse of :func:`read_stream`, bit-exact."""
    out = bytearray(
        _HEADER.pack(
            MAGIC,
            VERSION,
            stream.width,
            stream.height,
            stream.block_size,
            stream.gop_size,
            np.float32(stream.delta_key),
            np.float32(stream.delta_nonkey),
            _ALLOCATION_IDS[stream.allocation],
            stream.frame_count,
        )
    )
    n_blocks = stream.n_blocks
    for payload in stream.payloads:
        if len(payload.counts) != n_blocks:
            raise BitstreamError(
                f"payload has {len(payload.counts)} blocks, header implies {n_blocks}"
            )
        out.append(_KIND_IDS[payload.kind])
        out += np.asarray(payload.counts, dtype="<u2").tobytes()
        out += np.asarray(payload.values, dtype="<f4").tobytes()
    return bytes(out)


def read_stream(data: bytes) -> EncodedStream:
    """Parse bytes produced by :func:`write_stream`."""
    if len(data) < _HEADER.size:
        raise BitstreamError(f"{len(data)} bytes is shorter than the {_HEADER.size}-byte header")
    magic, version, width, height, block_size, gop_size, d_key, d_nonkey, alloc_id, frame_count = (
        _HEADER.unpack_from(data)
    )
    if magic != MAGIC:
        raise BitstreamError(f"bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise BitstreamError(f"unsupported version {version}, expected {VERSION}")
    if alloc_id not in _ALLOCATION_NAMES:
        raise BitstreamError(f"unknown allocation id {alloc_id}")
    if block_size == 0 or width < block_size or height < block_size:
        raise BitstreamError(f"geometry {width}x{height} invalid for block size {block_size}")
    for name, value in (("key", d_key), ("non-key", d_nonkey)):
        if not np.isfinite(value) or not 0 < value <= 1:
            raise BitstreamError(f"{name} ratio {value} outside (0, 1]")
    n_blocks = (height // block_size) * (width // block_size)
    bsq = block_size * block_size

    offset = _HEADER.size
    payloads = []
    for i in range(frame_count):
        if offset + 1 + 2 * n_blocks > len(data):
            raise TruncatedStreamError(i, "frame header and counts incomplete")
        kind_id = data[offset]
        if kind_id not in _KIND_NAMES:
            raise BitstreamError(f"frame {i} has unknown kind id {kind_id}")
        offset += 1
        counts = np.frombuffer(data, dtype="<u2", count=n_blocks, offset=offset)
        offset += 2 * n_blocks
        if counts.max(initial=0) > bsq:
            raise BitstreamError(f"frame {i} plans more than {bsq} coefficients in a block")
        total = int(counts.sum())
        if offset + 4 * total > len(data):
            raise TruncatedStreamError(i, f"expected {total} coefficient values")
        values = np.frombuffer(data, dtype="<f4", count=total, offset=offset).copy()
        offset += 4 * total
        payloads.append(FramePayload(_KIND_NAMES[kind_id], tuple(int(c) for c in counts), values))
    if offset != len(data):
        raise BitstreamError(f"{len(data) - offset} trailing bytes after the last frame")
    return EncodedStream(
        width=width,
        height=height,
        block_size=block_size,
        gop_size=gop_size,
        delta_key=float(d_key),
        delta_nonkey=float(d_nonkey),
        allocation=_ALLOCATION_NAMES[alloc_id],
        payloads=tuple(payloads),
    )


def save_stream(path, stream: EncodedStream) -> None:
    Path(path).write_bytes(write_stream(stream))


def load_stream(path) -> EncodedStream:
    return read_stream(Path(path).read_bytes())
