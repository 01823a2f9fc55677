"""Flow-based warp-and-blend interpolation between two frames."""

import cv2
import numpy as np

_FARNEBACK = dict(
    pyr_scale=0.5,
    levels=4,
    winsize=21,
    iterations=3,
    poly_n=7,
    poly_sigma=1.5,
    flags=0,
)


def _flow(src: np.ndarray, dst: np.ndarray) -> np.ndarray:
    """Dense flow such that src(p) lands near dst(p + flow(p))."""
    return cv2.calcOpticalFlowFarneback(src, dst, None, **_FARNEBACK)


def _warp(frame: np.ndarray, flow: np.ndarray, scale: float) -> np.ndarray:
    """Backward-sample `frame` at grid - scale * flow."""
    height, width = frame.shape
    grid_x, grid_y = np.meshgrid(np.arange(width), np.arange(height))
    map_x = (grid_x - scale * flow[..., 0]).astype(np.float32)
    map_y = (grid_y - scale * flow[..., 1]).astype(np.float32)
    return cv2.remap(
        frame.astype(np.float32), map_x, map_y,
        interpolation=cv2.INTER_LINEAR, borderMode=cv2.BORDER_REPLICATE,
    )


def flow_interpolate(
    frame_a: np.ndarray, frame_b: np.ndarray, timestamps
) -> list[np.ndarray]:
    """One intermediate frame per timestamp t in (0, 1).

    A moving point sits at p + t * flow_ab(p) at time t; both endpoint
    frames are warped toward that instant and blended with weights
    (1 - t, t) so each timestamp leans on the nearer frame.
    """
    a = np.asarray(frame_a, dtype=np.uint8)
    b = np.asarray(frame_b, dtype=np.uint8)
    if a.shape != b.shape:
        raise ValueError(f"geometry mismatch: {a.shape} vs {b.shape}")
    flow_ab = _flow(a, b)
    flow_ba = _flow(b, a)
    outputs = []
    for t in timestamps:
        t = float(t)
        if not 0.0 < t < 1.0:
            raise ValueError(f"timestamp {t} outside (0, 1)")
        from_a = _warp(a.astype(np.float64), flow_ab, t)
        from_b = _warp(b.astype(np.float64), flow_ba, 1.0 - t)
        outputs.append((1.0 - t) * from_a + t * from_b)
    return outputs
