"""Distributed video block compressive sensing codec.

An encoder adaptively senses partial 2D-DCT coefficients per block; the
decoder restores low-rate frames through frame interpolation,
transform-domain temporal DPCM, per-pixel arbitration, and optional
plug-and-play iterative refinement.
"""

from .codec import (
    DecodedFrame,
    EncodedStream,
    FramePayload,
    GopConfig,
    PlanMismatchError,
    StreamFormatError,
    best_pixel_discriminator,
    decode_sequence,
    dpcm_mix,
    encode_sequence,
    rate_split,
    reconstruct_fast,
)
from .ida import IdaConfig, SigmaSchedule, ida_reconstruct, project_measurements
from .metrics import QualityReport, evaluate_sequence, ms_ssim, psnr
from .sensing import (
    BlockGrid,
    MeasurementPlan,
    SensedFrame,
    mdd_allocate,
    partition,
    phase1_count,
    sense_phase1,
    sense_with_plan,
    thi_allocate,
)
from .transform import (
    PositionMask,
    TransformKernel,
    ZigzagOrder,
    dct2_forward,
    dct2_inverse,
    dct_kernel,
    zigzag_order,
    zigzag_prefix,
)
from .vfi import (
    ExternalInterpolator,
    InterpolationRequest,
    InterpolationResult,
    LinearInterpolator,
    interpolate_external,
    interpolate_linear,
)

__version__ = "0.1.0"
