import csv
import logging

import numpy as np
import pytest

from helpers import translating_sequence

from csvideo.cli import main
from csvideo.videoio import read_frame_dir, write_y_sequence


@pytest.fixture
def clip_420(tmp_path):
    """Raw 4:2:0 file: 5 frames of 48x32 with flat chroma."""
    rng = np.random.default_rng(110)
    frames = translating_sequence(rng, 32, 48, 5, shift=2)
    path = tmp_path / "clip.yuv"
    chroma = bytes([128]) * (48 * 32 // 2)
    with open(path, "wb") as fh:
        for frame in frames:
            fh.write(np.clip(np.rint(frame), 0, 255).astype(np.uint8).tobytes())
            fh.write(chroma)
    return path, frames


def test_end_to_end_smoke(tmp_path, clip_420):
    clip, frames = clip_420
    stream_path = tmp_path / "clip.vcs"
    out_dir = tmp_path / "decoded"
    csv_path = tmp_path / "clip.csv"
    summary_path = tmp_path / "summary.csv"

    assert main([
        "encode", "--input", str(clip), "--output", str(stream_path),
        "--width", "48", "--height", "32", "--gop", "4",
        "--delta-key", "0.5", "--delta-avg", "0.175", "--block-size", "16",
        "--alloc", "mdd",
    ]) == 0
    assert stream_path.exists()

    assert main([
        "decode", "--input", str(stream_path), "--output-dir", str(out_dir),
        "--interp", "linear", "--recon", "fast",
    ]) == 0
    decoded = read_frame_dir(out_dir)
    assert len(decoded) == 5
    assert decoded[0].shape == (32, 48)

    assert main([
        "metrics", "--original", str(clip), "--decoded", str(out_dir),
        "--csv", str(csv_path), "--width", "48", "--height", "32",
    ]) == 0
    with open(csv_path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 6  # 5 frames + average
    assert rows[0]["kind"] == "key"
    assert rows[1]["kind"] == "non-key"
    assert float(rows[1]["delta_realized"]) > 0

    assert main(["report", str(csv_path), "--output", str(summary_path)]) == 0
    with open(summary_path, newline="") as fh:
        summary = list(csv.DictReader(fh))
    assert summary[0]["sequence"] == "clip"
    assert summary[-1]["sequence"] == "average"


def test_encode_logs_derived_nonkey_ratio(tmp_path, caplog):
    rng = np.random.default_rng(111)
    clip = tmp_path / "clip.rawy"
    write_y_sequence(clip, [rng.integers(0, 256, (32, 32)).astype(np.uint8) for _ in range(3)])
    out = tmp_path / "out.vcs"
    with caplog.at_level(logging.INFO, logger="csvideo.cli"):
        code = main([
            "encode", "--input", str(clip), "--output", str(out),
            "--gop", "8", "--delta-key", "0.7", "--delta-avg", "0.175",
        ])
    assert code == 0
    assert "0.1000" in caplog.text


def test_usage_errors_exit_2():
    assert main(["encode", "--input", "x"]) == 2  # missing --output
    assert main(["bogus-command"]) == 2
    assert main(["decode", "--input", "x", "--output-dir", "y", "--interp", "teleport"]) == 2


def test_external_interp_requires_plugin_cmd(tmp_path, clip_420):
    clip, _ = clip_420
    stream_path = tmp_path / "clip.vcs"
    main([
        "encode", "--input", str(clip), "--output", str(stream_path),
        "--width", "48", "--height", "32", "--gop", "4", "--delta-key", "0.5",
    ])
    assert main([
        "decode", "--input", str(stream_path), "--output-dir", str(tmp_path / "d"),
        "--interp", "external",
    ]) == 1


def test_corrupt_stream_exits_1(tmp_path):
    bad = tmp_path / "bad.vcs"
    bad.write_bytes(b"NOPE" + bytes(64))
    assert main(["decode", "--input", str(bad), "--output-dir", str(tmp_path / "d")]) == 1


def test_metrics_length_mismatch_exits_1(tmp_path, clip_420):
    clip, _ = clip_420
    stream_path = tmp_path / "clip.vcs"
    out_dir = tmp_path / "decoded"
    main([
        "encode", "--input", str(clip), "--output", str(stream_path),
        "--width", "48", "--height", "32", "--gop", "4", "--delta-key", "0.5",
        "--frames", "3",
    ])
    main(["decode", "--input", str(stream_path), "--output-dir", str(out_dir)])
    assert main([
        "metrics", "--original", str(clip), "--decoded", str(out_dir),
        "--csv", str(tmp_path / "m.csv"), "--width", "48", "--height", "32",
    ]) == 1
