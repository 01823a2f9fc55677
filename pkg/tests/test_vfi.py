import json
import sys
import textwrap

import numpy as np
import pytest

from csvideo.plugin import PluginError, run_plugin
from csvideo.vfi import (
    ExternalInterpolator,
    InterpolationRequest,
    LinearInterpolator,
    interpolate_external,
    interpolate_linear,
)

ECHO_PLUGIN = textwrap.dedent(
    """
    import json, sys
    from pathlib import Path

    workdir = Path(sys.argv[1])
    request = json.loads((workdir / "request.json").read_text())
    first = (workdir / request["inputs"][0]).read_bytes()
    count = len(request.get("timestamps") or [0])
    outputs = []
    for i in range(count):
        name = f"output_{i:03d}.pgm"
        (workdir / name).write_bytes(first)
        outputs.append(name)
    (workdir / "response.json").write_text(json.dumps({"version": 1, "outputs": outputs}))
    """
)

CRASH_PLUGIN = "import sys; sys.exit(3)"

SLEEPY_PLUGIN = "import time, sys; time.sleep(30)"


@pytest.fixture
def echo_command(tmp_path):
    script = tmp_path / "echo_plugin.py"
    script.write_text(ECHO_PLUGIN)
    return f"{sys.executable} {script}"


def make_request(rng, height=16, width=24, timestamps=(0.25, 0.5, 0.75)):
    a = rng.uniform(0, 255, (height, width))
    b = rng.uniform(0, 255, (height, width))
    return InterpolationRequest(a, b, tuple(timestamps))


def test_linear_endpoint_limits():
    rng = np.random.default_rng(60)
    request = make_request(rng, timestamps=(1e-9, 1 - 1e-9))
    frames = interpolate_linear(request)
    assert np.abs(frames[0] - request.frame_a).max() < 1e-6
    assert np.abs(frames[1] - request.frame_b).max() < 1e-6


def test_linear_fixed_points_and_midpoint():
    rng = np.random.default_rng(61)
    a = rng.uniform(0, 255, (8, 8))
    same = InterpolationRequest(a, a.copy(), (0.2, 0.7))
    for frame in interpolate_linear(same):
        assert np.abs(frame - a).max() < 1e-12
    mid = InterpolationRequest(np.full((4, 4), 10.0), np.full((4, 4), 20.0), (0.5,))
    assert np.abs(interpolate_linear(mid)[0] - 15.0).max() < 1e-12


def test_linear_is_convex():
    rng = np.random.default_rng(62)
    request = make_request(rng)
    lo = np.minimum(request.frame_a, request.frame_b)
    hi = np.maximum(request.frame_a, request.frame_b)
    for frame in interpolate_linear(request):
        assert np.all(frame >= lo - 1e-12)
        assert np.all(frame <= hi + 1e-12)


def test_request_validation():
    rng = np.random.default_rng(63)
    a = rng.uniform(0, 255, (8, 8))
    with pytest.raises(ValueError):
        InterpolationRequest(a, a[:4], (0.5,))
    with pytest.raises(ValueError):
        InterpolationRequest(a, a, (0.0,))
    with pytest.raises(ValueError):
        InterpolationRequest(a, a, (1.0,))
    with pytest.raises(ValueError):
        InterpolationRequest(a, a, (0.5, 0.25))


def test_echo_plugin_round_trip(echo_command):
    rng = np.random.default_rng(64)
    request = make_request(rng)
    result = ExternalInterpolator(echo_command)(request)
    assert not result.degraded
    assert len(result.frames) == 3
    quantized_a = np.clip(np.rint(request.frame_a), 0, 255)
    for frame in result.frames:
        assert np.array_equal(frame, quantized_a)


def test_protocol_is_lossless_for_8bit_frames(echo_command):
    rng = np.random.default_rng(65)
    frame = rng.integers(0, 256, (16, 24)).astype(np.uint8)
    outputs = run_plugin(
        echo_command, role="interpolate", inputs=[frame, frame],
        timestamps=[0.5], expected_outputs=1,
    )
    assert np.array_equal(outputs[0].astype(np.uint8), frame)


def test_missing_plugin_falls_back_to_linear():
    rng = np.random.default_rng(66)
    request = make_request(rng)
    result = ExternalInterpolator("/nonexistent/plugin-binary")(request)
    assert result.degraded
    expected = interpolate_linear(request)
    for got, want in zip(result.frames, expected):
        assert np.array_equal(got, want)


def test_crashing_plugin_falls_back_to_linear(tmp_path):
    script = tmp_path / "crash.py"
    script.write_text(CRASH_PLUGIN)
    rng = np.random.default_rng(67)
    request = make_request(rng)
    result = interpolate_external(request, f"{sys.executable} {script}")
    assert result.degraded
    for got, want in zip(result.frames, interpolate_linear(request)):
        assert np.array_equal(got, want)


def test_plugin_timeout_falls_back(tmp_path):
    script = tmp_path / "sleepy.py"
    script.write_text(SLEEPY_PLUGIN)
    rng = np.random.default_rng(68)
    request = make_request(rng, timestamps=(0.5,))
    result = ExternalInterpolator(f"{sys.executable} {script}", timeout=0.5)(request)
    assert result.degraded


def test_plugin_geometry_violation_is_rejected(tmp_path):
    bad = textwrap.dedent(
        """
        import json, sys
        from pathlib import Path

        workdir = Path(sys.argv[1])
        (workdir / "output_000.pgm").write_bytes(b"P5\\n2 2\\n255\\n" + bytes(4))
        (workdir / "response.json").write_text(json.dumps({"version": 1, "outputs": ["output_000.pgm"]}))
        """
    )
    script = tmp_path / "bad_geometry.py"
    script.write_text(bad)
    rng = np.random.default_rng(69)
    with pytest.raises(PluginError, match="geometry"):
        run_plugin(
            f"{sys.executable} {script}", role="interpolate",
            inputs=[rng.uniform(0, 255, (8, 8))], timestamps=[0.5], expected_outputs=1,
        )


def test_plugin_error_response_is_surfaced(tmp_path):
    script = tmp_path / "error.py"
    script.write_text(
        textwrap.dedent(
            """
            import json, sys
            from pathlib import Path

            (Path(sys.argv[1]) / "response.json").write_text(json.dumps({"version": 1, "error": "boom"}))
            sys.exit(1)
            """
        )
    )
    rng = np.random.default_rng(70)
    with pytest.raises(PluginError, match="boom"):
        run_plugin(
            f"{sys.executable} {script}", role="denoise",
            inputs=[rng.uniform(0, 255, (8, 8))], sigma=4.0, expected_outputs=1,
        )


def test_linear_interpolator_object():
    rng = np.random.default_rng(71)
    request = make_request(rng)
    result = LinearInterpolator()(request)
    assert not result.degraded
    assert len(result.frames) == len(request.timestamps)


def test_decode_survives_echo_plugin(echo_command):
    # a plugin that returns the first key frame for every timestamp is a
    # legal (if useless) interpolator; the per-pixel arbiter bounds the damage
    from csvideo.codec import GopConfig, decode_sequence, encode_sequence

    rng = np.random.default_rng(72)
    frames = [rng.uniform(0, 255, (32, 32)) for _ in range(5)]
    config = GopConfig(gop_size=4, delta_key=0.5, delta_avg=0.175, block_size=8)
    stream = encode_sequence(frames, config)
    decoded = decode_sequence(stream, ExternalInterpolator(echo_command))
    assert len(decoded) == 5
    for frame in decoded:
        assert frame.pixels.shape == (32, 32)
        assert np.all(np.isfinite(frame.pixels))
        assert frame.pixels.min() >= 0.0 and frame.pixels.max() <= 255.0
