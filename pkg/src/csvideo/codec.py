"""GOP-structured encoding and decoding.

The encoder senses the first frame of every group of pictures (the key
frame) at a high measurement ratio with the threshold allocator and the
remaining frames at a low ratio. The decoder restores non-key frames by
interpolating between neighbouring decoded key frames, mixing measured
low-pass coefficients into the interpolated frame's transform plane
(temporal DPCM performed entirely at the decoder), and arbitrating per
pixel between the mixed frame and the plain low-rate reconstruction.

Only per-block coefficient counts and values travel in the stream; the
mixed-mode allocator's positions are recomputed at the decoder from the
key frame it has already received.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Sequence

import numpy as np

from . import vfi
from .sensing import (
    ALGORITHM_MDD,
    ALGORITHM_THI,
    KIND_KEY,
    KIND_NONKEY,
    BlockGrid,
    MeasurementPlan,
    SensedFrame,
    assemble_blocks,
    full_plan,
    mdd_allocate,
    partition,
    phase1_count,
    sense_phase1,
    sense_with_plan,
    thi_allocate,
    zigzag_order,
)
from .transform import dct_kernel, dct2_forward_many, dct2_inverse_many

if TYPE_CHECKING:
    from .ida import IdaConfig

log = logging.getLogger(__name__)

RECON_FAST = "FAST"
RECON_IDA = "IDA"
INTERP_LINEAR = "LINEAR"
INTERP_EXTERNAL = "EXTERNAL"
MIX_KEY_MEASURED = "KEY_MEASURED"
MIX_FULL_COMPLEMENT = "FULL_COMPLEMENT"

PROVENANCE_KEY = "KEY"
PROVENANCE_BPD = "BPD_OUTPUT"

BPD_THRESHOLD_FAST = 25.0
BPD_THRESHOLD_IDA = 10.0


class StreamFormatError(ValueError):
    """The encoded stream is structurally invalid."""


class PlanMismatchError(StreamFormatError):
    """Decoder-recomputed measurement plan disagrees with the stream counts."""


def rate_split(delta_avg: float, gop_size: int, delta_key: float) -> float:
    """Non-key ratio that keeps the average measurements per GOP constant."""
    if gop_size < 2:
        raise ValueError(f"GOP size {gop_size} must be at least 2")
    delta_nonkey = (gop_size * delta_avg - delta_key) / (gop_size - 1)
    if delta_nonkey <= 0 or delta_nonkey > delta_key + 1e-12:
        raise ValueError(
            f"rate split of avg={delta_avg} over G={gop_size} with key={delta_key} "
            f"gives non-key ratio {delta_nonkey:.4f} outside (0, {delta_key}]"
        )
    return delta_nonkey


@dataclass(frozen=True)
class GopConfig:
    """Every knob of the codec; decoder-side fields are ignored by the encoder."""

    gop_size: int = 8
    delta_key: float = 0.7
    delta_avg: float | None = 0.175
    delta_nonkey: float | None = None
    block_size: int = 16
    bpd_threshold: float | None = None  # None picks 25 (FAST) or 10 (IDA)
    allocation: str = ALGORITHM_MDD
    reconstruction: str = RECON_FAST
    interpolator: str = INTERP_LINEAR
    mixing_mask: str = MIX_FULL_COMPLEMENT

    def __post_init__(self):
        if self.gop_size < 2:
            raise ValueError(f"GOP size {self.gop_size} must be at least 2")
        if self.block_size not in (4, 8, 16, 32):
            raise ValueError(f"unsupported block size {self.block_size}")
        if not 0 < self.delta_key <= 1:
            raise ValueError(f"key ratio {self.delta_key} outside (0, 1]")
        if self.delta_nonkey is None:
            if self.delta_avg is None:
                raise ValueError("either delta_nonkey or delta_avg is required")
            object.__setattr__(
                self, "delta_nonkey", rate_split(self.delta_avg, self.gop_size, self.delta_key)
            )
        if not 0 < self.delta_nonkey <= self.delta_key:
            raise ValueError(
                f"non-key ratio {self.delta_nonkey} outside (0, {self.delta_key}]"
            )
        if self.allocation not in (ALGORITHM_THI, ALGORITHM_MDD):
            raise ValueError(f"unknown allocation {self.allocation!r}")
        if self.reconstruction not in (RECON_FAST, RECON_IDA):
            raise ValueError(f"unknown reconstruction {self.reconstruction!r}")
        if self.interpolator not in (INTERP_LINEAR, INTERP_EXTERNAL):
            raise ValueError(f"unknown interpolator {self.interpolator!r}")
        if self.mixing_mask not in (MIX_KEY_MEASURED, MIX_FULL_COMPLEMENT):
            raise ValueError(f"unknown mixing mask {self.mixing_mask!r}")

    def resolved_bpd_threshold(self) -> float:
        if self.bpd_threshold is not None:
            return self.bpd_threshold
        return BPD_THRESHOLD_IDA if self.reconstruction == RECON_IDA else BPD_THRESHOLD_FAST


@dataclass(frozen=True)
class FramePayload:
    """What one frame contributes to the stream: counts and coefficients."""

    kind: str
    counts: tuple[int, ...]
    values: np.ndarray = field(repr=False)  # concatenated, canonical per-block order

    def __post_init__(self):
        if self.kind not in (KIND_KEY, KIND_NONKEY):
            raise ValueError(f"unknown frame kind {self.kind!r}")
        if len(self.values) != sum(self.counts):
            raise ValueError(
                f"payload carries {len(self.values)} values for {sum(self.counts)} planned"
            )
        self.values.setflags(write=False)


@dataclass(frozen=True)
class EncodedStream:
    """Header fields plus one payload per frame, in capture order."""

    width: int
    height: int
    block_size: int
    gop_size: int
    delta_key: float
    delta_nonkey: float
    allocation: str
    payloads: tuple[FramePayload, ...]

    @property
    def frame_count(self) -> int:
        return len(self.payloads)

    @property
    def n_blocks(self) -> int:
        return (self.height // self.block_size) * (self.width // self.block_size)

    def realized_ratios(self) -> list[float]:
        capacity = self.n_blocks * self.block_size ** 2
        return [sum(p.counts) / capacity for p in self.payloads]


def _wire_delta(delta: float) -> float:
    """Quantize a ratio to the float32 precision it has on the wire.

    Budgets and phase-1 counts are derived from this value on both sides
    so encoder and decoder agree after a serialization round trip.
    """
    return float(np.float32(delta))


def measurement_budget(delta: float, n_blocks: int, block_size: int) -> int:
    return int(round(_wire_delta(delta) * n_blocks * block_size * block_size))


def phase1_count_for_delta(block_size: int, delta: float) -> int:
    return phase1_count(block_size, 1.0 / _wire_delta(delta))


def _allocate_key_plan(grid: BlockGrid, delta: float) -> MeasurementPlan:
    budget = measurement_budget(delta, grid.n_blocks, grid.block_size)
    if budget >= grid.n_blocks * grid.block_size ** 2:
        return full_plan(grid.block_size, grid.n_blocks)
    m1 = phase1_count_for_delta(grid.block_size, delta)
    return thi_allocate(sense_phase1(grid, m1), grid.block_size, budget)


def sense_key_frame(frame: np.ndarray, config: GopConfig) -> SensedFrame:
    """Sense a key frame at the key ratio with the threshold allocator."""
    grid = partition(frame, config.block_size)
    plan = _allocate_key_plan(grid, config.delta_key)
    return sense_with_plan(grid, plan, KIND_KEY)


def sense_nonkey_frame(
    frame: np.ndarray, config: GopConfig, key_sensed: SensedFrame
) -> SensedFrame:
    """Sense a non-key frame, adapting to the GOP's key frame under MDD."""
    grid = partition(frame, config.block_size)
    budget = measurement_budget(config.delta_nonkey, grid.n_blocks, grid.block_size)
    if budget >= grid.n_blocks * grid.block_size ** 2:
        plan = full_plan(grid.block_size, grid.n_blocks)
    else:
        m1 = phase1_count_for_delta(grid.block_size, config.delta_nonkey)
        phase1 = sense_phase1(grid, m1)
        if config.allocation == ALGORITHM_THI:
            plan = thi_allocate(phase1, grid.block_size, budget)
        else:
            plan = mdd_allocate(phase1, key_sensed.densify(), budget)
    return sense_with_plan(grid, plan, KIND_NONKEY)


def _payload_from_sensed(sensed: SensedFrame) -> FramePayload:
    counts = tuple(int(m) for m in sensed.plan.counts())
    values = np.concatenate(sensed.values) if counts else np.empty(0)
    return FramePayload(sensed.kind, counts, values)


def encode_sequence(frames: Sequence[np.ndarray], config: GopConfig) -> EncodedStream:
    """Encode a luminance sequence into a stream of per-block measurements."""
    if len(frames) == 0:
        raise ValueError("cannot encode an empty sequence")
    frames = [np.asarray(f, dtype=np.float64) for f in frames]
    height, width = frames[0].shape
    payloads = []
    key_sensed = None
    for index, frame in enumerate(frames):
        if frame.shape != (height, width):
            raise ValueError(
                f"frame {index} geometry {frame.shape} differs from {(height, width)}"
            )
        if index % config.gop_size == 0:
            key_sensed = sense_key_frame(frame, config)
            sensed = key_sensed
        else:
            sensed = sense_nonkey_frame(frame, config, key_sensed)
        log.debug("frame %d (%s): realized ratio %.4f", index, sensed.kind, sensed.delta_realized)
        payloads.append(_payload_from_sensed(sensed))
    return EncodedStream(
        width=width,
        height=height,
        block_size=config.block_size,
        gop_size=config.gop_size,
        delta_key=config.delta_key,
        delta_nonkey=config.delta_nonkey,
        allocation=config.allocation,
        payloads=tuple(payloads),
    )


def _pad_to_frame(core: np.ndarray, height: int, width: int) -> np.ndarray:
    """Edge-replicate the cropped reconstruction out to the frame geometry."""
    pad_h, pad_w = height - core.shape[0], width - core.shape[1]
    if pad_h == 0 and pad_w == 0:
        return core
    return np.pad(core, ((0, pad_h), (0, pad_w)), mode="edge")


def reconstruct_fast(sensed: SensedFrame) -> np.ndarray:
    """Per-block inverse DCT with zeros at unmeasured positions. Unclamped."""
    kernel = dct_kernel(sensed.plan.block_size)
    blocks = dct2_inverse_many(sensed.densify(), kernel)
    core = assemble_blocks(blocks, sensed.rows_of_blocks, sensed.cols_of_blocks)
    return _pad_to_frame(core, sensed.height, sensed.width)


def _plan_indicators(plan: MeasurementPlan) -> np.ndarray:
    """(n_blocks, B, B) float stack of ones at each block's planned positions."""
    b = plan.block_size
    out = np.zeros((plan.n_blocks, b, b))
    for i, pos in enumerate(plan.positions):
        if pos:
            rows, cols = zip(*pos)
            out[i, rows, cols] = 1.0
    return out


def dpcm_mix(
    nonkey: SensedFrame,
    reference: np.ndarray,
    mixing_mask: str = MIX_FULL_COMPLEMENT,
    key_plan: MeasurementPlan | None = None,
) -> np.ndarray:
    """Temporal DPCM in the transform domain, computed at the decoder.

    Per block the measured non-key coefficients occupy their positions
    and the reference frame's coefficients fill a disjoint mid-band mask:
    the key plan's extra positions (KEY_MEASURED) or everything left
    (FULL_COMPLEMENT). Margins outside the block grid pass through from
    the reference.
    """
    reference = np.asarray(reference, dtype=np.float64)
    if reference.shape != (nonkey.height, nonkey.width):
        raise ValueError(
            f"reference geometry {reference.shape} does not match "
            f"{(nonkey.height, nonkey.width)}"
        )
    if mixing_mask == MIX_KEY_MEASURED and key_plan is None:
        raise ValueError("KEY_MEASURED mixing requires the key frame's plan")
    b = nonkey.plan.block_size
    kernel = dct_kernel(b)
    ref_grid = partition(reference, b)
    ref_coeffs = dct2_forward_many(ref_grid.blocks, kernel)
    ind_low = _plan_indicators(nonkey.plan)
    if mixing_mask == MIX_FULL_COMPLEMENT:
        ind_mid = 1.0 - ind_low
    else:
        ind_mid = _plan_indicators(key_plan) * (1.0 - ind_low)
    mixed = nonkey.densify() + ref_coeffs * ind_mid
    core = assemble_blocks(
        dct2_inverse_many(mixed, kernel), nonkey.rows_of_blocks, nonkey.cols_of_blocks
    )
    out = reference.copy()
    out[: core.shape[0], : core.shape[1]] = core
    return out


def best_pixel_discriminator(
    dpcm: np.ndarray, interpolated: np.ndarray, nonkey_recon: np.ndarray, threshold: float
) -> np.ndarray:
    """Pick the DPCM pixel where it stays close to the interpolation."""
    dpcm = np.asarray(dpcm, dtype=np.float64)
    if dpcm.shape != interpolated.shape or dpcm.shape != nonkey_recon.shape:
        raise ValueError("best pixel discriminator inputs must share geometry")
    return np.where(np.abs(interpolated - dpcm) < threshold, dpcm, nonkey_recon)


@dataclass(frozen=True)
class DecodedFrame:
    """Final output frame, clamped to the 8-bit range."""

    pixels: np.ndarray = field(repr=False)
    provenance: str

    def __post_init__(self):
        self.pixels.setflags(write=False)


def _rebuild_prefix_sensed(
    payload: FramePayload, stream: EncodedStream, delta: float, algorithm: str
) -> SensedFrame:
    b = stream.block_size
    m1 = min(phase1_count_for_delta(b, delta), b * b)
    order = zigzag_order(b).order
    positions = []
    for i, count in enumerate(payload.counts):
        if count < m1 or count > b * b:
            raise StreamFormatError(
                f"block {i} carries {count} coefficients, outside [{m1}, {b * b}]"
            )
        positions.append(order[:count])
    plan = MeasurementPlan(b, m1, tuple(positions), algorithm)
    return _sensed_from_payload(payload, plan, stream)


def _sensed_from_payload(
    payload: FramePayload, plan: MeasurementPlan, stream: EncodedStream
) -> SensedFrame:
    splits = np.cumsum([0] + list(payload.counts))
    values = tuple(
        np.asarray(payload.values[splits[i] : splits[i + 1]], dtype=np.float64)
        for i in range(len(payload.counts))
    )
    return SensedFrame(plan, values, stream.height, stream.width, payload.kind)


def recompute_nonkey_plan(
    payload: FramePayload, key_sensed: SensedFrame, stream: EncodedStream
) -> MeasurementPlan:
    """Rebuild a mixed-mode plan from the key frame and received phase-1 values.

    Raises :class:`PlanMismatchError` when the recomputed per-block counts
    disagree with the counts the stream carries.
    """
    b = stream.block_size
    budget = measurement_budget(stream.delta_nonkey, stream.n_blocks, b)
    if budget >= stream.n_blocks * b * b:
        plan = full_plan(b, stream.n_blocks)
    else:
        m1 = phase1_count_for_delta(b, stream.delta_nonkey)
        splits = np.cumsum([0] + list(payload.counts))
        phase1 = np.zeros((stream.n_blocks, m1))
        for i, count in enumerate(payload.counts):
            if count < m1:
                raise StreamFormatError(
                    f"block {i} carries {count} coefficients, fewer than phase-1 {m1}"
                )
            phase1[i] = payload.values[splits[i] : splits[i] + m1]
        plan = mdd_allocate(phase1, key_sensed.densify(), budget)
    recomputed = tuple(int(m) for m in plan.counts())
    if recomputed != tuple(payload.counts):
        raise PlanMismatchError(
            "recomputed mixed-mode plan disagrees with stream counts (corrupt stream)"
        )
    return plan


def _rebuild_nonkey_sensed(
    payload: FramePayload, key_sensed: SensedFrame, stream: EncodedStream
) -> SensedFrame:
    if stream.allocation == ALGORITHM_MDD:
        plan = recompute_nonkey_plan(payload, key_sensed, stream)
        return _sensed_from_payload(payload, plan, stream)
    return _rebuild_prefix_sensed(payload, stream, stream.delta_nonkey, stream.allocation)


def _clamp(frame: np.ndarray) -> np.ndarray:
    return np.clip(frame, 0.0, 255.0)


def decode_sequence(
    stream: EncodedStream,
    interpolator=None,
    config: GopConfig | None = None,
    ida_config: "IdaConfig | None" = None,
) -> list[DecodedFrame]:
    """Decode a stream GOP by GOP with one-GOP lookahead.

    ``interpolator`` is any callable taking an
    :class:`~csvideo.vfi.InterpolationRequest` and returning an
    :class:`~csvideo.vfi.InterpolationResult`; the built-in linear blend
    is used when omitted. Decoder-side knobs (reconstruction mode, BPD
    threshold, mixing mask) are read from ``config``; structural fields
    always come from the stream header.
    """
    if interpolator is None:
        interpolator = vfi.LinearInterpolator()
    if config is None:
        config = GopConfig()  # only decoder-side fields are read from it
    if stream.frame_count == 0:
        return []
    if stream.payloads[0].kind != KIND_KEY:
        raise StreamFormatError("stream does not start with a key frame")

    reconstruction = config.reconstruction
    threshold = config.resolved_bpd_threshold()

    def reconstruct(sensed: SensedFrame) -> np.ndarray:
        if reconstruction == RECON_IDA:
            from . import ida

            return ida.ida_reconstruct(sensed, ida_config or ida.IdaConfig())
        return reconstruct_fast(sensed)

    # GOP index ranges: a key payload starts each group
    key_indices = [i for i, p in enumerate(stream.payloads) if p.kind == KIND_KEY]
    decoded_keys: dict[int, tuple[SensedFrame, np.ndarray]] = {}

    def decode_key(index: int) -> tuple[SensedFrame, np.ndarray]:
        if index not in decoded_keys:
            sensed = _rebuild_prefix_sensed(
                stream.payloads[index], stream, stream.delta_key, ALGORITHM_THI
            )
            decoded_keys[index] = (sensed, reconstruct(sensed))
        return decoded_keys[index]

    outputs: list[DecodedFrame | None] = [None] * stream.frame_count
    for gop_number, key_index in enumerate(key_indices):
        gop_end = key_indices[gop_number + 1] if gop_number + 1 < len(key_indices) else stream.frame_count
        key_sensed, key_frame = decode_key(key_index)
        outputs[key_index] = DecodedFrame(_clamp(key_frame), PROVENANCE_KEY)
        nonkey_indices = list(range(key_index + 1, gop_end))
        if not nonkey_indices:
            decoded_keys.pop(key_index, None)
            continue
        if gop_number + 1 < len(key_indices):
            _, next_key_frame = decode_key(key_indices[gop_number + 1])
            timestamps = tuple((j + 1) / stream.gop_size for j in range(len(nonkey_indices)))
            request = vfi.InterpolationRequest(key_frame, next_key_frame, timestamps)
            references = interpolator(request).frames
        else:
            # no following key frame: hold the current one as the reference
            references = [key_frame] * len(nonkey_indices)
        for j, frame_index in enumerate(nonkey_indices):
            payload = stream.payloads[frame_index]
            if payload.kind != KIND_NONKEY:
                raise StreamFormatError(f"frame {frame_index} has unexpected kind {payload.kind}")
            sensed = _rebuild_nonkey_sensed(payload, key_sensed, stream)
            nonkey_recon = reconstruct(sensed)
            mixed = dpcm_mix(sensed, references[j], config.mixing_mask, key_sensed.plan)
            chosen = best_pixel_discriminator(mixed, references[j], nonkey_recon, threshold)
            outputs[frame_index] = DecodedFrame(_clamp(chosen), PROVENANCE_BPD)
        decoded_keys.pop(key_index, None)
    return outputs  # type: ignore[return-value]
