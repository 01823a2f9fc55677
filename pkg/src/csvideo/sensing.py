"""Block partitioning and adaptive measurement allocation.

A frame is cropped to whole B x B blocks and each block is sensed by
keeping a subset of its 2D-DCT coefficients. Two two-phase allocators
decide how many coefficients each block gets:

* THI: a global magnitude threshold over the phase-1 (low-pass)
  coefficients of the whole image drives per-block phase-2 counts.
* MDD: phase-2 positions are the globally largest coefficients of a
  reference coefficient plane whose low-pass band has been refreshed
  with the current frame's phase-1 values.

Both allocators are pure functions of their inputs so a decoder can
reproduce the plan from data it already holds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .transform import dct_kernel, dct2_forward_many, zigzag_order, PositionMask

ALGORITHM_THI = "THI"
ALGORITHM_MDD = "MDD"
ALGORITHM_FIXED = "FIXED"

KIND_KEY = "key"
KIND_NONKEY = "non-key"


@dataclass(frozen=True)
class BlockGrid:
    """Whole B x B tiles of a frame, raster order, top-left aligned."""

    block_size: int
    height: int
    width: int
    blocks: np.ndarray = field(repr=False)  # (n_blocks, B, B) float64

    @property
    def rows_of_blocks(self) -> int:
        return self.height // self.block_size

    @property
    def cols_of_blocks(self) -> int:
        return self.width // self.block_size

    @property
    def n_blocks(self) -> int:
        return self.rows_of_blocks * self.cols_of_blocks


def partition(frame: np.ndarray, block_size: int) -> BlockGrid:
    """Crop a frame to whole blocks and tile it in raster order.

    Margins beyond the last whole block are dropped; the original frame
    geometry is kept on the grid so decoders can restore it.
    """
    frame = np.asarray(frame, dtype=np.float64)
    if frame.ndim != 2:
        raise ValueError(f"expected a 2D luminance frame, got shape {frame.shape}")
    h, w = frame.shape
    if h < block_size or w < block_size:
        raise ValueError(f"frame {h}x{w} smaller than one {block_size}x{block_size} block")
    rows, cols = h // block_size, w // block_size
    cropped = frame[: rows * block_size, : cols * block_size]
    blocks = (
        cropped.reshape(rows, block_size, cols, block_size)
        .transpose(0, 2, 1, 3)
        .reshape(rows * cols, block_size, block_size)
    )
    return BlockGrid(block_size, h, w, np.ascontiguousarray(blocks))


def assemble_blocks(blocks: np.ndarray, rows_of_blocks: int, cols_of_blocks: int) -> np.ndarray:
    """Inverse of :func:`partition` over the cropped region."""
    n, b, _ = blocks.shape
    if n != rows_of_blocks * cols_of_blocks:
        raise ValueError(f"{n} blocks cannot fill a {rows_of_blocks}x{cols_of_blocks} grid")
    return (
        blocks.reshape(rows_of_blocks, cols_of_blocks, b, b)
        .transpose(0, 2, 1, 3)
        .reshape(rows_of_blocks * b, cols_of_blocks * b)
    )


@dataclass(frozen=True)
class MeasurementPlan:
    """Per-block coefficient positions in the order they are sensed.

    Every block's position list starts with the zigzag prefix of length
    ``phase1_count``; phase-2 positions follow in a deterministic order
    so only counts need to travel with the coefficients.
    """

    block_size: int
    phase1_count: int
    positions: tuple[tuple[tuple[int, int], ...], ...]
    algorithm: str

    def __post_init__(self):
        if self.algorithm not in (ALGORITHM_THI, ALGORITHM_MDD, ALGORITHM_FIXED):
            raise ValueError(f"unknown allocation algorithm {self.algorithm!r}")
        bsq = self.block_size * self.block_size
        prefix = zigzag_order(self.block_size).order[: self.phase1_count]
        for i, pos in enumerate(self.positions):
            if len(pos) > bsq:
                raise ValueError(f"block {i} plans {len(pos)} positions, more than {bsq}")
            if pos[: self.phase1_count] != prefix:
                raise ValueError(f"block {i} does not start with the phase-1 zigzag prefix")

    @property
    def n_blocks(self) -> int:
        return len(self.positions)

    def counts(self) -> np.ndarray:
        """Per-block measurement counts m_i."""
        return np.array([len(p) for p in self.positions], dtype=np.int64)

    def phase2_counts(self) -> np.ndarray:
        return self.counts() - self.phase1_count

    @property
    def total_measurements(self) -> int:
        return int(self.counts().sum())

    def mask(self, block_index: int) -> PositionMask:
        return PositionMask(self.block_size, frozenset(self.positions[block_index]))


@dataclass(frozen=True)
class SensedFrame:
    """A measurement plan plus the coefficient values it selected."""

    plan: MeasurementPlan
    values: tuple[np.ndarray, ...]  # per block, aligned with plan.positions[i]
    height: int
    width: int
    kind: str

    def __post_init__(self):
        if self.kind not in (KIND_KEY, KIND_NONKEY):
            raise ValueError(f"unknown frame kind {self.kind!r}")
        for i, (pos, vals) in enumerate(zip(self.plan.positions, self.values)):
            if len(vals) != len(pos):
                raise ValueError(f"block {i} has {len(vals)} values for {len(pos)} positions")

    @property
    def rows_of_blocks(self) -> int:
        return self.height // self.plan.block_size

    @property
    def cols_of_blocks(self) -> int:
        return self.width // self.plan.block_size

    @property
    def delta_realized(self) -> float:
        bsq = self.plan.block_size ** 2
        return self.plan.total_measurements / (self.plan.n_blocks * bsq)

    def densify(self) -> np.ndarray:
        """(n_blocks, B, B) coefficient planes, zero where unmeasured."""
        b = self.plan.block_size
        planes = np.zeros((self.plan.n_blocks, b, b))
        for i, (pos, vals) in enumerate(zip(self.plan.positions, self.values)):
            if pos:
                rows, cols = zip(*pos)
                planes[i, rows, cols] = vals
        return planes


def phase1_count(block_size: int, compression_factor: float) -> int:
    """Non-adaptive phase-1 measurements per block, floor(B^2 / (2 C_F))."""
    if compression_factor < 1:
        raise ValueError(f"compression factor {compression_factor} must be >= 1")
    return int(math.floor(block_size * block_size / (2.0 * compression_factor)))


def sense_phase1(grid: BlockGrid, m1: int) -> np.ndarray:
    """Low-pass DCT coefficients of every block, zigzag order, shape (n_blocks, m1)."""
    bsq = grid.block_size * grid.block_size
    if not 0 <= m1 <= bsq:
        raise ValueError(f"phase-1 count {m1} out of range for block size {grid.block_size}")
    kernel = dct_kernel(grid.block_size)
    coeffs = dct2_forward_many(grid.blocks, kernel)
    flat = coeffs.reshape(grid.n_blocks, bsq)
    return flat[:, zigzag_order(grid.block_size).flat_indices[:m1]]


def _prefix_plan(block_size: int, phase1: int, counts, algorithm: str) -> MeasurementPlan:
    order = zigzag_order(block_size).order
    positions = tuple(order[: int(m)] for m in counts)
    return MeasurementPlan(block_size, phase1, positions, algorithm)


def fixed_plan(block_size: int, n_blocks: int, count: int) -> MeasurementPlan:
    """Uniform zigzag-prefix plan of `count` coefficients per block."""
    if not 0 <= count <= block_size * block_size:
        raise ValueError(f"count {count} out of range for block size {block_size}")
    return _prefix_plan(block_size, count, [count] * n_blocks, ALGORITHM_FIXED)


def full_plan(block_size: int, n_blocks: int) -> MeasurementPlan:
    """Plan sensing every coefficient of every block."""
    bsq = block_size * block_size
    return _prefix_plan(block_size, bsq, [bsq] * n_blocks, ALGORITHM_FIXED)


def thi_allocate(phase1: np.ndarray, block_size: int, total_budget: int) -> MeasurementPlan:
    """Threshold-over-whole-image allocation.

    The (total_budget // 4)-th largest phase-1 magnitude becomes a global
    threshold; each block gets two extra coefficients per phase-1
    coefficient strictly above it, capped at the block capacity. Phase-2
    positions continue the zigzag prefix, so the plan is fully described
    by per-block counts.
    """
    phase1 = np.asarray(phase1, dtype=np.float64)
    n_blocks, m1 = phase1.shape
    bsq = block_size * block_size
    k = total_budget // 4
    if k > phase1.size:
        raise ValueError(f"budget rank {k} exceeds the {phase1.size} phase-1 coefficients available")
    if k < 1:
        threshold = np.inf
    else:
        magnitudes = np.abs(phase1).ravel()
        threshold = magnitudes[np.argpartition(magnitudes, -k)[-k]]
    exceeding = (np.abs(phase1) > threshold).sum(axis=1)
    m2 = np.minimum(2 * exceeding, bsq - m1)
    return _prefix_plan(block_size, m1, m1 + m2, ALGORITHM_THI)


def mdd_allocate(phase1: np.ndarray, tc_ref: np.ndarray, total_budget: int) -> MeasurementPlan:
    """Mixed-mode DCT-domain allocation against a reference coefficient plane.

    The reference planes get their zigzag prefix overwritten with the
    current frame's phase-1 values; the positions of the globally largest
    ``total_budget`` mixed coefficients, minus those already inside a
    prefix, become each block's phase-2 positions. Magnitudes are ranked
    at float32 precision so a decoder working from the serialized stream
    rebuilds the identical plan.
    """
    phase1 = np.asarray(phase1)
    tc_ref = np.asarray(tc_ref)
    n_blocks, m1 = phase1.shape
    if tc_ref.ndim != 3 or tc_ref.shape[0] != n_blocks:
        raise ValueError(f"reference planes {tc_ref.shape} do not cover {n_blocks} blocks")
    block_size = tc_ref.shape[1]
    bsq = block_size * block_size
    if total_budget > n_blocks * bsq:
        raise ValueError(f"budget {total_budget} exceeds {n_blocks * bsq} coefficients")
    order = zigzag_order(block_size)

    # mixed planes laid out (block-major, zigzag-rank-minor): a stable
    # descending sort then breaks magnitude ties by (block, zigzag rank)
    mixed = tc_ref.astype(np.float32).reshape(n_blocks, bsq)[:, order.flat_indices]
    mixed[:, :m1] = phase1.astype(np.float32)
    ranking = np.argsort(-np.abs(mixed).ravel(), kind="stable")[:total_budget]

    phase2: list[list[tuple[int, int]]] = [[] for _ in range(n_blocks)]
    for idx in ranking:
        block, rank = divmod(int(idx), bsq)
        if rank >= m1:
            phase2[block].append(order.order[rank])
    prefix = order.order[:m1]
    positions = tuple(prefix + tuple(extra) for extra in phase2)
    return MeasurementPlan(block_size, m1, positions, ALGORITHM_MDD)


def sense_with_plan(grid: BlockGrid, plan: MeasurementPlan, kind: str = KIND_NONKEY) -> SensedFrame:
    """Measure the planned coefficient positions of every block."""
    if plan.n_blocks != grid.n_blocks or plan.block_size != grid.block_size:
        raise ValueError("measurement plan does not match the block grid")
    kernel = dct_kernel(grid.block_size)
    coeffs = dct2_forward_many(grid.blocks, kernel)
    values = []
    for i, pos in enumerate(plan.positions):
        if pos:
            rows, cols = zip(*pos)
            values.append(coeffs[i][rows, cols].copy())
        else:
            values.append(np.empty(0))
    return SensedFrame(plan, tuple(values), grid.height, grid.width, kind)
