"""Driving an out-of-process interpolation plugin, with graceful fallback.

Interpolates the midpoint between a frame and its 4-pixel translate,
first with the built-in blend, then through the flow plugin if the
`flowinterp` package is installed, and finally through a command that
does not exist to demonstrate the fallback path.
"""

import importlib.util
import sys

import numpy as np

from csvideo.vfi import ExternalInterpolator, InterpolationRequest, LinearInterpolator


def pattern(height=64, width=96):
    yy, xx = np.mgrid[0:height, 0:width].astype(float)
    frame = 128 + 55 * np.sin(2 * np.pi * 2.7 * yy / height) * np.cos(2 * np.pi * 4.1 * xx / width)
    return np.clip(np.rint(frame), 0, 255)


def main():
    canvas = pattern()
    frame_a, frame_b = canvas[:, :64], canvas[:, 4:68]
    truth = canvas[:, 2:66]
    request = InterpolationRequest(frame_a, frame_b, (0.5,))

    def report(label, result):
        mse = float(np.mean((result.frames[0] - truth) ** 2))
        flag = " (degraded fallback)" if result.degraded else ""
        print(f"{label:24s} midpoint MSE {mse:8.2f}{flag}")

    print(f"no-motion baseline       midpoint MSE {np.mean((frame_a - truth) ** 2):8.2f}")
    report("built-in linear blend", LinearInterpolator()(request))

    if importlib.util.find_spec("flowinterp"):
        plugin = ExternalInterpolator(f"{sys.executable} -m flowinterp")
        report("flow plugin", plugin(request))
    else:
        print("flow plugin              not installed (pip install -e vfi_plugin)")

    report("missing plugin", ExternalInterpolator("/no/such/binary")(request))


if __name__ == "__main__":
    main()
