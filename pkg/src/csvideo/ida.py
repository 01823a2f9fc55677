"""Plug-and-play iterative refinement of a sensed frame.

Alternates a denoiser with an exact projection onto the measurement
constraint. Because the measurement operator selects rows of an
orthonormal transform, the projection is a cheap coefficient overwrite:
forward-transform each block, restore the measured values, invert.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import ndimage

from .plugin import run_plugin
from .sensing import SensedFrame, assemble_blocks, partition
from .transform import dct_kernel, dct2_forward_many, dct2_inverse_many

Denoiser = Callable[[np.ndarray, float], np.ndarray]


@dataclass(frozen=True)
class SigmaSchedule:
    """Per-iteration denoiser strength in 8-bit pixel units."""

    initial: float = 10.0
    decay: float = 1.0  # multiplier per iteration; 1.0 keeps sigma constant

    def __post_init__(self):
        if self.initial < 0:
            raise ValueError(f"sigma {self.initial} must be non-negative")
        if not 0 < self.decay <= 1:
            raise ValueError(f"decay {self.decay} outside (0, 1]")

    def at(self, iteration: int) -> float:
        return self.initial * self.decay ** iteration


def identity_denoiser(frame: np.ndarray, sigma: float) -> np.ndarray:
    return frame


def gaussian_denoiser(frame: np.ndarray, sigma: float) -> np.ndarray:
    """Gaussian blur whose width scales with the assumed noise level."""
    if sigma <= 0:
        return frame
    return ndimage.gaussian_filter(frame, sigma=sigma / 10.0, mode="nearest")


def haar_denoiser(frame: np.ndarray, sigma: float) -> np.ndarray:
    """Soft-threshold the detail bands of a one-level orthonormal Haar split."""
    if sigma <= 0:
        return frame
    h, w = frame.shape
    x = np.pad(frame, ((0, h % 2), (0, w % 2)), mode="edge")
    s = np.sqrt(2.0)
    lo_r, hi_r = (x[0::2] + x[1::2]) / s, (x[0::2] - x[1::2]) / s
    ll, lh = (lo_r[:, 0::2] + lo_r[:, 1::2]) / s, (lo_r[:, 0::2] - lo_r[:, 1::2]) / s
    hl, hh = (hi_r[:, 0::2] + hi_r[:, 1::2]) / s, (hi_r[:, 0::2] - hi_r[:, 1::2]) / s

    def soft(band):
        return np.sign(band) * np.maximum(np.abs(band) - sigma, 0.0)

    lh, hl, hh = soft(lh), soft(hl), soft(hh)
    lo_r = np.empty_like(x[0::2])
    lo_r[:, 0::2], lo_r[:, 1::2] = (ll + lh) / s, (ll - lh) / s
    hi_r = np.empty_like(x[1::2])
    hi_r[:, 0::2], hi_r[:, 1::2] = (hl + hh) / s, (hl - hh) / s
    out = np.empty_like(x)
    out[0::2], out[1::2] = (lo_r + hi_r) / s, (lo_r - hi_r) / s
    return out[:h, :w]


BUILTIN_DENOISERS: dict[str, Denoiser] = {
    "identity": identity_denoiser,
    "gaussian": gaussian_denoiser,
    "haar": haar_denoiser,
}


class ExternalDenoiser:
    """Out-of-process denoiser behind the shared plugin protocol."""

    def __init__(self, command: str, timeout: float = 30.0):
        self.command = command
        self.timeout = timeout

    def __call__(self, frame: np.ndarray, sigma: float) -> np.ndarray:
        return run_plugin(
            self.command,
            role="denoise",
            inputs=[frame],
            expected_outputs=1,
            sigma=sigma,
            timeout=self.timeout,
        )[0]


@dataclass(frozen=True)
class IdaConfig:
    iterations: int = 20
    damping: float = 1.0
    sigma: SigmaSchedule = field(default_factory=SigmaSchedule)
    denoiser: Denoiser = gaussian_denoiser

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError(f"iteration count {self.iterations} must be at least 1")
        if not 0 < self.damping <= 1:
            raise ValueError(f"damping {self.damping} outside (0, 1]")


def project_measurements(frame: np.ndarray, sensed: SensedFrame) -> np.ndarray:
    """Orthogonal projection onto frames consistent with the measurements."""
    frame = np.asarray(frame, dtype=np.float64)
    if frame.shape != (sensed.height, sensed.width):
        raise ValueError(
            f"frame geometry {frame.shape} does not match {(sensed.height, sensed.width)}"
        )
    b = sensed.plan.block_size
    kernel = dct_kernel(b)
    grid = partition(frame, b)
    coeffs = dct2_forward_many(grid.blocks, kernel)
    for i, (pos, vals) in enumerate(zip(sensed.plan.positions, sensed.values)):
        if pos:
            rows, cols = zip(*pos)
            coeffs[i][rows, cols] = vals
    core = assemble_blocks(
        dct2_inverse_many(coeffs, kernel), sensed.rows_of_blocks, sensed.cols_of_blocks
    )
    out = frame.copy()
    out[: core.shape[0], : core.shape[1]] = core
    return out


def ida_reconstruct(
    sensed: SensedFrame, config: IdaConfig | None = None, initial: np.ndarray | None = None
) -> np.ndarray:
    """Refine a frame by damped denoise-then-project iterations."""
    config = config or IdaConfig()
    if initial is None:
        from .codec import reconstruct_fast

        x = reconstruct_fast(sensed)
    else:
        x = np.asarray(initial, dtype=np.float64).copy()
    for k in range(config.iterations):
        denoised = config.denoiser(x, config.sigma.at(k))
        if not np.all(np.isfinite(denoised)):
            raise RuntimeError(
                f"denoiser produced non-finite values at iteration {k}; aborting refinement"
            )
        x = x + config.damping * (project_measurements(denoised, sensed) - x)
    return x
