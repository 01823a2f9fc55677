"""Objective quality measurement on the luminance plane.

PSNR uses the 8-bit peak; multi-scale SSIM follows the standard 5-scale
construction (11-tap Gaussian window, sigma 1.5, exponents 0.0448,
0.2856, 0.3001, 0.2363, 0.1333), dropping to fewer scales with
renormalized weights when the frame is too small for five dyadic
halvings.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.signal import fftconvolve

MS_SSIM_WEIGHTS = (0.0448, 0.2856, 0.3001, 0.2363, 0.1333)
_WINDOW_SIZE = 11
_WINDOW_SIGMA = 1.5


def _as_frame(frame) -> np.ndarray:
    pixels = getattr(frame, "pixels", frame)
    return np.asarray(pixels, dtype=np.float64)


def psnr(reference, test) -> float:
    """Peak signal-to-noise ratio in dB; +inf when the frames coincide."""
    a, b = _as_frame(reference), _as_frame(test)
    if a.shape != b.shape:
        raise ValueError(f"geometry mismatch: {a.shape} vs {b.shape}")
    mse = float(np.mean((a - b) ** 2))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(255.0 ** 2 / mse)


def _gaussian_window() -> np.ndarray:
    half = (_WINDOW_SIZE - 1) / 2.0
    coords = np.arange(_WINDOW_SIZE) - half
    g = np.exp(-(coords ** 2) / (2.0 * _WINDOW_SIGMA ** 2))
    window = np.outer(g, g)
    return window / window.sum()


def _ssim_means(a: np.ndarray, b: np.ndarray, data_range: float) -> tuple[float, float]:
    """Mean SSIM and mean contrast-structure term over the valid region."""
    c1 = (0.01 * data_range) ** 2
    c2 = (0.03 * data_range) ** 2
    win = _gaussian_window()
    mu_a = fftconvolve(a, win, mode="valid")
    mu_b = fftconvolve(b, win, mode="valid")
    var_a = fftconvolve(a * a, win, mode="valid") - mu_a * mu_a
    var_b = fftconvolve(b * b, win, mode="valid") - mu_b * mu_b
    cov = fftconvolve(a * b, win, mode="valid") - mu_a * mu_b
    cs_map = (2.0 * cov + c2) / (var_a + var_b + c2)
    luminance = (2.0 * mu_a * mu_b + c1) / (mu_a * mu_a + mu_b * mu_b + c1)
    return float(np.mean(luminance * cs_map)), float(np.mean(cs_map))


def _downsample(frame: np.ndarray) -> np.ndarray:
    h, w = (frame.shape[0] // 2) * 2, (frame.shape[1] // 2) * 2
    cropped = frame[:h, :w]
    return (cropped[0::2, 0::2] + cropped[0::2, 1::2] + cropped[1::2, 0::2] + cropped[1::2, 1::2]) / 4.0


def _scale_count(height: int, width: int) -> int:
    scales = 0
    h, w = height, width
    while scales < len(MS_SSIM_WEIGHTS) and min(h, w) >= _WINDOW_SIZE:
        scales += 1
        h, w = h // 2, w // 2
    return scales


def ms_ssim(reference, test, data_range: float = 255.0) -> float:
    """Multi-scale SSIM in [0, 1]; symmetric in its arguments."""
    a, b = _as_frame(reference), _as_frame(test)
    if a.shape != b.shape:
        raise ValueError(f"geometry mismatch: {a.shape} vs {b.shape}")
    scales = _scale_count(*a.shape)
    if scales == 0:
        raise ValueError(
            f"frame {a.shape} is too small for the {_WINDOW_SIZE}-tap SSIM window"
        )
    weights = np.array(MS_SSIM_WEIGHTS[:scales])
    weights = weights / weights.sum()
    score = 1.0
    for level in range(scales):
        ssim_mean, cs_mean = _ssim_means(a, b, data_range)
        term = ssim_mean if level == scales - 1 else cs_mean
        score *= max(term, 0.0) ** weights[level]
        if level < scales - 1:
            a, b = _downsample(a), _downsample(b)
    return float(min(max(score, 0.0), 1.0))


@dataclass(frozen=True)
class FrameQuality:
    frame: int
    kind: str
    delta_realized: float
    psnr: float
    ms_ssim: float


@dataclass(frozen=True)
class QualityReport:
    rows: tuple[FrameQuality, ...]

    @property
    def average_psnr(self) -> float:
        return float(np.mean([r.psnr for r in self.rows]))

    @property
    def average_ms_ssim(self) -> float:
        return float(np.mean([r.ms_ssim for r in self.rows]))

    def averages_by_kind(self) -> dict[str, tuple[float, float]]:
        out: dict[str, tuple[float, float]] = {}
        for kind in sorted({r.kind for r in self.rows}):
            rows = [r for r in self.rows if r.kind == kind]
            out[kind] = (
                float(np.mean([r.psnr for r in rows])),
                float(np.mean([r.ms_ssim for r in rows])),
            )
        return out

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["frame", "kind", "delta_realized", "psnr", "ms_ssim"])
            for r in self.rows:
                writer.writerow([r.frame, r.kind, f"{r.delta_realized:.6f}", repr(r.psnr), repr(r.ms_ssim)])
            writer.writerow(
                ["average", "", "", repr(self.average_psnr), repr(self.average_ms_ssim)]
            )


def evaluate_sequence(
    originals: Sequence, decoded: Sequence, metadata: Iterable[tuple[str, float]] | None = None
) -> QualityReport:
    """Per-frame PSNR/MS-SSIM rows plus sequence averages.

    ``metadata`` supplies (kind, realized ratio) per frame, typically from
    the encoded stream; both default to placeholders when absent.
    """
    if len(originals) != len(decoded):
        raise ValueError(f"{len(originals)} originals vs {len(decoded)} decoded frames")
    meta = list(metadata) if metadata is not None else [("?", float("nan"))] * len(originals)
    if len(meta) != len(originals):
        raise ValueError(f"{len(meta)} metadata entries for {len(originals)} frames")
    rows = []
    for i, (orig, dec) in enumerate(zip(originals, decoded)):
        kind, ratio = meta[i]
        rows.append(
            FrameQuality(i, kind, float(ratio), psnr(orig, dec), ms_ssim(orig, dec))
        )
    return QualityReport(tuple(rows))
