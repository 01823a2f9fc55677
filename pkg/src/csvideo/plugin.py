"""File-based plugin protocol shared by the interpolation and denoise bridges.

One request per working directory: the client writes the input frames as
8-bit binary PGM plus a ``request.json``, then runs the plugin command
with the directory as its single argument. The plugin writes one output
PGM per expected frame and ``response.json`` last; the client treats the
presence of ``response.json`` after process exit as completion.

``request.json`` fields: ``version``, ``role`` ("interpolate" or
"denoise"), ``width``, ``height``, ``inputs`` (PGM filenames in order),
plus ``timestamps`` for interpolation and ``sigma`` for denoising.
``response.json`` carries ``outputs`` (PGM filenames in order) or an
``error`` string.
"""

from __future__ import annotations

import json
import shlex
import shutil
import subprocess
import tempfile
from pathlib import Path
from typing import Sequence

import numpy as np

from .videoio import read_pgm, write_pgm

PROTOCOL_VERSION = 1
REQUEST_NAME = "request.json"
RESPONSE_NAME = "response.json"


class PluginError(RuntimeError):
    """The plugin process failed or broke the protocol."""


def run_plugin(
    command: str,
    role: str,
    inputs: Sequence[np.ndarray],
    expected_outputs: int,
    timeout: float = 30.0,
    timestamps: Sequence[float] | None = None,
    sigma: float | None = None,
) -> list[np.ndarray]:
    """Execute one plugin request and return the output frames as float64."""
    if not inputs:
        raise ValueError("plugin request needs at least one input frame")
    height, width = np.asarray(inputs[0]).shape
    workdir = Path(tempfile.mkdtemp(prefix="csvideo-plugin-"))
    try:
        input_names = []
        for i, frame in enumerate(inputs):
            name = f"input_{i:03d}.pgm"
            write_pgm(workdir / name, frame)
            input_names.append(name)
        request: dict = {
            "version": PROTOCOL_VERSION,
            "role": role,
            "width": int(width),
            "height": int(height),
            "inputs": input_names,
        }
        if timestamps is not None:
            request["timestamps"] = [float(t) for t in timestamps]
        if sigma is not None:
            request["sigma"] = float(sigma)
        (workdir / REQUEST_NAME).write_text(json.dumps(request, indent=2))

        try:
            proc = subprocess.run(
                shlex.split(command) + [str(workdir)],
                timeout=timeout,
                capture_output=True,
            )
        except subprocess.TimeoutExpired as exc:
            raise PluginError(f"plugin timed out after {timeout} s") from exc
        except OSError as exc:
            raise PluginError(f"plugin could not be launched: {exc}") from exc

        response_path = workdir / RESPONSE_NAME
        if not response_path.exists():
            raise PluginError(
                f"plugin exited with code {proc.returncode} without writing {RESPONSE_NAME}"
            )
        try:
            response = json.loads(response_path.read_text())
        except json.JSONDecodeError as exc:
            raise PluginError(f"malformed {RESPONSE_NAME}: {exc}") from exc
        if response.get("error"):
            raise PluginError(f"plugin reported an error: {response['error']}")
        if proc.returncode != 0:
            raise PluginError(f"plugin exited with code {proc.returncode}")
        outputs = response.get("outputs")
        if not isinstance(outputs, list) or len(outputs) != expected_outputs:
            raise PluginError(
                f"plugin returned {outputs!r}, expected {expected_outputs} output frames"
            )
        frames = []
        for name in outputs:
            path = workdir / str(name)
            if not path.exists():
                raise PluginError(f"declared output {name} is missing")
            frame = read_pgm(path).astype(np.float64)
            if frame.shape != (height, width):
                raise PluginError(
                    f"output {name} geometry {frame.shape} differs from {(height, width)}"
                )
            frames.append(frame)
        return frames
    finally:
        shutil.rmtree(workdir, ignore_errors=True)
