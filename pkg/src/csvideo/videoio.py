"""Raw video ingestion and frame file I/O.

Two sequence formats are read: raw planar YUV 4:2:0 (geometry supplied
by the caller, chroma planes skipped) and a minimal headered Y-only
container used for synthetic material. Decoded frames are written as
one binary PGM per frame.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

RAWY_MAGIC = b"RAWY"
_RAWY_HEADER = struct.Struct("<4sHHI")


def _to_uint8(frame: np.ndarray) -> np.ndarray:
    frame = np.asarray(frame)
    if frame.dtype == np.uint8:
        return frame
    return np.clip(np.rint(frame), 0, 255).astype(np.uint8)


def write_pgm(path, frame: np.ndarray) -> None:
    """Write one frame as an 8-bit binary PGM (P5)."""
    frame = _to_uint8(frame)
    h, w = frame.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(frame.tobytes())


def read_pgm(path) -> np.ndarray:
    """Read an 8-bit binary PGM into a (H, W) uint8 array."""
    data = Path(path).read_bytes()
    if not data.startswith(b"P5"):
        raise ValueError(f"{path} is not a binary PGM file")
    # header: magic, width, height, maxval as whitespace/comment separated tokens
    tokens, pos = [], 2
    while len(tokens) < 3:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos : pos + 1] != b"\n":
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise ValueError(f"{path} has a truncated PGM header")
        tokens.append(data[start:pos])
    pos += 1  # single whitespace after maxval
    w, h, maxval = (int(t) for t in tokens)
    if maxval != 255:
        raise ValueError(f"{path} has maxval {maxval}, only 8-bit PGM is supported")
    expected = w * h
    raster = data[pos : pos + expected]
    if len(raster) != expected:
        raise ValueError(f"{path} raster holds {len(raster)} bytes, expected {expected}")
    return np.frombuffer(raster, dtype=np.uint8).reshape(h, w).copy()


def write_y_sequence(path, frames) -> None:
    """Write luminance frames into the headered Y-only container."""
    frames = [_to_uint8(f) for f in frames]
    if not frames:
        raise ValueError("refusing to write an empty sequence")
    h, w = frames[0].shape
    with open(path, "wb") as fh:
        fh.write(_RAWY_HEADER.pack(RAWY_MAGIC, w, h, len(frames)))
        for i, frame in enumerate(frames):
            if frame.shape != (h, w):
                raise ValueError(f"frame {i} geometry {frame.shape} differs from {(h, w)}")
            fh.write(frame.tobytes())


def read_y_sequence(
    path, width: int | None = None, height: int | None = None, max_frames: int | None = None
) -> list[np.ndarray]:
    """Read luminance frames from a raw 4:2:0 file or the Y-only container.

    Raw planar 4:2:0 input needs ``width`` and ``height``; its chroma
    planes are skipped. The container is self-describing.
    """
    data = Path(path).read_bytes()
    if len(data) == 0:
        raise ValueError(f"{path} is empty")
    if data.startswith(RAWY_MAGIC):
        magic, w, h, count = _RAWY_HEADER.unpack_from(data)
        offset, frame_size = _RAWY_HEADER.size, w * h
        if len(data) < offset + count * frame_size:
            raise ValueError(f"{path} is truncated: header promises {count} frames")
        frames = []
        for i in range(count if max_frames is None else min(count, max_frames)):
            start = offset + i * frame_size
            frames.append(
                np.frombuffer(data[start : start + frame_size], dtype=np.uint8)
                .reshape(h, w)
                .copy()
            )
        return frames
    if width is None or height is None:
        raise ValueError("raw 4:2:0 input needs explicit width and height")
    frame_size = width * height * 3 // 2  # Y plane plus quarter-size U and V
    if len(data) % frame_size != 0:
        raise ValueError(
            f"{path} holds {len(data)} bytes, not a whole number of "
            f"{width}x{height} 4:2:0 frames ({frame_size} bytes each)"
        )
    count = len(data) // frame_size
    if max_frames is not None:
        count = min(count, max_frames)
    frames = []
    for i in range(count):
        start = i * frame_size
        frames.append(
            np.frombuffer(data[start : start + width * height], dtype=np.uint8)
            .reshape(height, width)
            .copy()
        )
    return frames


def write_frame_dir(directory, frames, prefix: str = "frame") -> list[Path]:
    """Write frames as zero-padded PGM files inside a directory."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for i, frame in enumerate(frames):
        path = directory / f"{prefix}_{i:04d}.pgm"
        write_pgm(path, frame)
        paths.append(path)
    return paths


def read_frame_dir(directory, prefix: str = "frame") -> list[np.ndarray]:
    """Read back the PGM frames written by :func:`write_frame_dir`."""
    paths = sorted(Path(directory).glob(f"{prefix}_*.pgm"))
    if not paths:
        raise ValueError(f"no {prefix}_*.pgm frames found in {directory}")
    return [read_pgm(p) for p in paths]
