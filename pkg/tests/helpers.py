"""Synthetic content generators shared across the test suite."""

import numpy as np


def smooth_frame(rng: np.random.Generator, height: int, width: int) -> np.ndarray:
    """Band-limited random frame with a strongly decaying spectrum."""
    yy, xx = np.mgrid[0:height, 0:width].astype(np.float64)
    frame = np.full((height, width), 128.0)
    for _ in range(6):
        fy, fx = rng.uniform(0.25, 2.5, size=2)
        py, px = rng.uniform(0, 2 * np.pi, size=2)
        amp = rng.uniform(8.0, 45.0)
        frame += amp * np.sin(2 * np.pi * fy * yy / height + py) * np.cos(
            2 * np.pi * fx * xx / width + px
        )
    return np.clip(frame, 0.0, 255.0)


def textured_canvas(rng: np.random.Generator, height: int, width: int) -> np.ndarray:
    """Smooth base plus rectangles and texture, for motion sequences."""
    canvas = smooth_frame(rng, height, width)
    for _ in range(8):
        r = rng.integers(0, height - 12)
        c = rng.integers(0, width - 12)
        rh, rw = rng.integers(6, 24, size=2)
        canvas[r : r + rh, c : c + rw] = rng.uniform(20, 235)
    canvas += rng.normal(0, 3.0, canvas.shape)
    return np.clip(canvas, 0.0, 255.0)


def translating_sequence(
    rng: np.random.Generator, height: int, width: int, count: int, shift: int = 2
) -> list[np.ndarray]:
    """Frames sliding a window over a wide canvas, `shift` px per frame."""
    canvas = textured_canvas(rng, height, width + shift * count)
    return [canvas[:, i * shift : i * shift + width].copy() for i in range(count)]


def soft_translating_sequence(
    rng: np.random.Generator,
    height: int,
    width: int,
    count: int,
    shift: int = 1,
    blur: float = 1.5,
) -> list[np.ndarray]:
    """Translating pattern with softened edges; kind to blend interpolation."""
    from scipy import ndimage

    canvas = textured_canvas(rng, height, width + shift * count)
    canvas = np.clip(ndimage.gaussian_filter(canvas, blur), 0.0, 255.0)
    return [canvas[:, i * shift : i * shift + width].copy() for i in range(count)]


def phantom_frame(height: int, width: int) -> np.ndarray:
    """Deterministic piecewise-constant test frame."""
    frame = np.full((height, width), 64.0)
    frame[: height // 2, : width // 2] = 200.0
    frame[height // 3 : 2 * height // 3, width // 2 :] = 120.0
    frame[3 * height // 4 :, width // 4 : 3 * width // 4] = 30.0
    return frame
