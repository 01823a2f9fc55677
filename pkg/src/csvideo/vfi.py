"""Frame interpolation between decoded key frames.

A temporal blend is built in; heavier interpolators (optical flow,
neural) run out of process behind the file-based plugin protocol and the
decoder falls back to the blend if they misbehave, so a bad plugin can
only degrade prediction quality, never crash a decode.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .plugin import PluginError, run_plugin

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class InterpolationRequest:
    """Two bracketing frames and the intermediate times to synthesize."""

    frame_a: np.ndarray = field(repr=False)
    frame_b: np.ndarray = field(repr=False)
    timestamps: tuple[float, ...]

    def __post_init__(self):
        a = np.asarray(self.frame_a, dtype=np.float64)
        b = np.asarray(self.frame_b, dtype=np.float64)
        if a.shape != b.shape or a.ndim != 2:
            raise ValueError(f"frame geometry mismatch: {a.shape} vs {b.shape}")
        object.__setattr__(self, "frame_a", a)
        object.__setattr__(self, "frame_b", b)
        ts = tuple(float(t) for t in self.timestamps)
        if any(not 0 < t < 1 for t in ts):
            raise ValueError(f"timestamps {ts} must lie strictly inside (0, 1)")
        if any(t2 <= t1 for t1, t2 in zip(ts, ts[1:])):
            raise ValueError(f"timestamps {ts} must be strictly increasing")
        object.__setattr__(self, "timestamps", ts)


@dataclass(frozen=True)
class InterpolationResult:
    frames: tuple[np.ndarray, ...]
    degraded: bool = False


def interpolate_linear(request: InterpolationRequest) -> list[np.ndarray]:
    """Pixel-wise temporal blend (1 - t) * a + t * b."""
    return [
        (1.0 - t) * request.frame_a + t * request.frame_b for t in request.timestamps
    ]


class LinearInterpolator:
    """Built-in baseline interpolator."""

    def __call__(self, request: InterpolationRequest) -> InterpolationResult:
        return InterpolationResult(tuple(interpolate_linear(request)), degraded=False)


class ExternalInterpolator:
    """Client for an out-of-process interpolation plugin.

    Any failure (timeout, crash, malformed response, geometry change)
    falls back to the linear blend and marks the result degraded.
    """

    def __init__(self, command: str, timeout: float = 30.0):
        self.command = command
        self.timeout = timeout

    def __call__(self, request: InterpolationRequest) -> InterpolationResult:
        try:
            frames = run_plugin(
                self.command,
                role="interpolate",
                inputs=[request.frame_a, request.frame_b],
                timestamps=request.timestamps,
                expected_outputs=len(request.timestamps),
                timeout=self.timeout,
            )
        except PluginError as exc:
            log.warning("interpolation plugin failed (%s); falling back to linear blend", exc)
            return InterpolationResult(tuple(interpolate_linear(request)), degraded=True)
        return InterpolationResult(tuple(frames), degraded=False)


def interpolate_external(
    request: InterpolationRequest, command: str, timeout: float = 30.0
) -> InterpolationResult:
    """One-shot convenience wrapper around :class:`ExternalInterpolator`."""
    return ExternalInterpolator(command, timeout)(request)
