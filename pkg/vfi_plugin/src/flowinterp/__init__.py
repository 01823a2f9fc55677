"""Optical-flow frame interpolation plugin.

Serves one request per working directory: reads ``request.json`` plus
the referenced input PGM frames, synthesizes one frame per timestamp by
flow warping and blending, writes the output PGMs and finally
``response.json``.
"""

from .interp import flow_interpolate
from .serve import serve

__version__ = "0.1.0"
