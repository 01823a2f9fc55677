"""Request handling: one working directory in, PGM frames plus response out."""

import json
import sys
from pathlib import Path

from .interp import flow_interpolate
from .pgm import read_pgm, write_pgm

PROTOCOL_VERSION = 1
REQUEST_NAME = "request.json"
RESPONSE_NAME = "response.json"


def _fail(workdir: Path, message: str) -> int:
    # best effort: the client keys off the error field and the exit code
    try:
        (workdir / RESPONSE_NAME).write_text(
            json.dumps({"version": PROTOCOL_VERSION, "error": message})
        )
    except OSError:
        pass
    print(f"flowinterp: {message}", file=sys.stderr)
    return 1


def serve(workdir) -> int:
    """Handle the request in `workdir`; returns a process exit code."""
    workdir = Path(workdir)
    request_path = workdir / REQUEST_NAME
    if not request_path.exists():
        return _fail(workdir, f"{REQUEST_NAME} not found in {workdir}")
    try:
        request = json.loads(request_path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        return _fail(workdir, f"malformed request: {exc}")

    if request.get("version") != PROTOCOL_VERSION:
        return _fail(workdir, f"unsupported protocol version {request.get('version')!r}")
    if request.get("role") != "interpolate":
        return _fail(workdir, f"unsupported role {request.get('role')!r}")
    inputs = request.get("inputs") or []
    if len(inputs) != 2:
        return _fail(workdir, f"expected 2 input frames, got {len(inputs)}")
    timestamps = request.get("timestamps") or []
    if not timestamps or any(not 0 < float(t) < 1 for t in timestamps):
        return _fail(workdir, f"timestamps {timestamps!r} must lie strictly inside (0, 1)")

    try:
        frame_a = read_pgm(workdir / inputs[0])
        frame_b = read_pgm(workdir / inputs[1])
    except (OSError, ValueError) as exc:
        return _fail(workdir, f"cannot read inputs: {exc}")
    if frame_a.shape != frame_b.shape:
        return _fail(workdir, f"input geometry mismatch: {frame_a.shape} vs {frame_b.shape}")
    expected = (int(request.get("height", frame_a.shape[0])), int(request.get("width", frame_a.shape[1])))
    if frame_a.shape != expected:
        return _fail(workdir, f"inputs are {frame_a.shape}, request says {expected}")

    try:
        frames = flow_interpolate(frame_a, frame_b, timestamps)
    except Exception as exc:  # pragma: no cover - backend failure path
        return _fail(workdir, f"interpolation failed: {exc}")

    outputs = []
    for i, frame in enumerate(frames):
        name = f"output_{i:03d}.pgm"
        write_pgm(workdir / name, frame)
        outputs.append(name)
    # the response is written last: its presence signals completion
    (workdir / RESPONSE_NAME).write_text(
        json.dumps({"version": PROTOCOL_VERSION, "outputs": outputs})
    )
    return 0


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    if len(argv) != 1:
        print("usage: flowinterp <working-directory>", file=sys.stderr)
        return 2
    return serve(argv[0])


if __name__ == "__main__":
    sys.exit(main())
