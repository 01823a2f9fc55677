import json
import subprocess
import sys

import numpy as np
import pytest

from flowinterp.interp import flow_interpolate
from flowinterp.pgm import read_pgm, write_pgm
from flowinterp.serve import serve


def smooth_pattern(height, width, seed=0):
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:height, 0:width].astype(float)
    frame = np.full((height, width), 128.0)
    for _ in range(5):
        fy, fx = rng.uniform(0.5, 3.0, 2)
        amp = rng.uniform(10, 40)
        frame += amp * np.sin(2 * np.pi * fy * yy / height) * np.cos(2 * np.pi * fx * xx / width)
    return np.clip(np.rint(frame), 0, 255).astype(np.uint8)


def write_request(workdir, frame_a, frame_b, timestamps, **overrides):
    write_pgm(workdir / "input_000.pgm", frame_a)
    write_pgm(workdir / "input_001.pgm", frame_b)
    request = {
        "version": 1,
        "role": "interpolate",
        "width": frame_a.shape[1],
        "height": frame_a.shape[0],
        "inputs": ["input_000.pgm", "input_001.pgm"],
        "timestamps": list(timestamps),
    }
    request.update(overrides)
    (workdir / "request.json").write_text(json.dumps(request))
    return request


def read_response(workdir):
    return json.loads((workdir / "response.json").read_text())


def test_identical_inputs_reproduce_themselves(tmp_path):
    frame = smooth_pattern(48, 64)
    write_request(tmp_path, frame, frame, [0.25, 0.5])
    assert serve(tmp_path) == 0
    response = read_response(tmp_path)
    assert response["outputs"] == ["output_000.pgm", "output_001.pgm"]
    for name in response["outputs"]:
        out = read_pgm(tmp_path / name)
        assert out.shape == frame.shape
        assert np.abs(out.astype(float) - frame.astype(float)).max() <= 1.0


def test_midpoint_beats_both_endpoints_on_translate(tmp_path):
    canvas = smooth_pattern(64, 96, seed=3)
    frame_a = canvas[:, :64]
    frame_b = canvas[:, 4:68]  # 4 px horizontal translate
    truth = canvas[:, 2:66].astype(float)
    write_request(tmp_path, frame_a, frame_b, [0.5])
    assert serve(tmp_path) == 0
    mid = read_pgm(tmp_path / read_response(tmp_path)["outputs"][0]).astype(float)
    mse_mid = np.mean((mid - truth) ** 2)
    assert mse_mid < np.mean((frame_a.astype(float) - truth) ** 2)
    assert mse_mid < np.mean((frame_b.astype(float) - truth) ** 2)


def test_direct_backend_translate_accuracy():
    canvas = smooth_pattern(48, 80, seed=5)
    frame_a, frame_b = canvas[:, :48], canvas[:, 6:54]
    truth = canvas[:, 3:51].astype(float)
    mid = flow_interpolate(frame_a, frame_b, [0.5])[0]
    # interior error well below the 3 px no-motion baseline
    core = (slice(8, -8), slice(8, -8))
    assert np.mean((mid[core] - truth[core]) ** 2) < 0.25 * np.mean(
        (frame_a.astype(float)[core] - truth[core]) ** 2
    )


def test_output_count_matches_timestamps(tmp_path):
    frame = smooth_pattern(32, 32, seed=1)
    write_request(tmp_path, frame, frame, [0.2, 0.4, 0.6, 0.8])
    assert serve(tmp_path) == 0
    assert len(read_response(tmp_path)["outputs"]) == 4


def test_missing_input_file_errors(tmp_path):
    frame = smooth_pattern(32, 32, seed=2)
    write_request(tmp_path, frame, frame, [0.5])
    (tmp_path / "input_001.pgm").unlink()
    assert serve(tmp_path) != 0
    assert "cannot read inputs" in read_response(tmp_path)["error"]


def test_malformed_request_errors(tmp_path):
    (tmp_path / "request.json").write_text("{not json")
    assert serve(tmp_path) != 0
    assert "error" in read_response(tmp_path)

    frame = smooth_pattern(32, 32, seed=4)
    write_request(tmp_path, frame, frame, [0.5], version=99)
    assert serve(tmp_path) != 0
    assert "version" in read_response(tmp_path)["error"]

    write_request(tmp_path, frame, frame, [0.5], role="denoise")
    assert serve(tmp_path) != 0
    assert "role" in read_response(tmp_path)["error"]

    write_request(tmp_path, frame, frame, [1.5])
    assert serve(tmp_path) != 0


def test_missing_request_errors(tmp_path):
    assert serve(tmp_path) != 0


def test_command_line_entry(tmp_path):
    frame = smooth_pattern(32, 32, seed=6)
    write_request(tmp_path, frame, frame, [0.5])
    proc = subprocess.run(
        [sys.executable, "-m", "flowinterp", str(tmp_path)], capture_output=True
    )
    assert proc.returncode == 0
    assert (tmp_path / "response.json").exists()
    proc = subprocess.run([sys.executable, "-m", "flowinterp"], capture_output=True)
    assert proc.returncode == 2
