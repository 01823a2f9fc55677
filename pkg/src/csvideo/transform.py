"""Unitary block DCT, JPEG zigzag ordering, and coefficient position masks.

All block math is separable: a B x B orthonormal type-II DCT matrix is
applied to rows and columns. Coefficients are kept in natural (row, col)
layout; the zigzag ordering is a view used for prefix selection, not a
storage order. Arithmetic is float64 throughout.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

BLOCK_SIZES = (4, 8, 16, 32)


@dataclass(frozen=True)
class TransformKernel:
    """Orthonormal type-II DCT basis for B x B blocks."""

    block_size: int
    basis: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.block_size not in BLOCK_SIZES:
            raise ValueError(f"unsupported block size {self.block_size}, expected one of {BLOCK_SIZES}")
        self.basis.setflags(write=False)


@lru_cache(maxsize=None)
def dct_kernel(block_size: int) -> TransformKernel:
    """Build (and cache) the orthonormal DCT-II basis for a block size."""
    n = np.arange(block_size)
    k = n[:, None]
    basis = np.sqrt(2.0 / block_size) * np.cos(np.pi * (2 * n[None, :] + 1) * k / (2 * block_size))
    basis[0, :] = np.sqrt(1.0 / block_size)
    return TransformKernel(block_size, basis)


def _check_block(block: np.ndarray, kernel: TransformKernel) -> np.ndarray:
    block = np.asarray(block, dtype=np.float64)
    b = kernel.block_size
    if block.shape != (b, b):
        raise ValueError(f"block shape {block.shape} does not match kernel block size {b}")
    return block


def dct2_forward(block: np.ndarray, kernel: TransformKernel) -> np.ndarray:
    """Forward 2D DCT of one B x B block."""
    block = _check_block(block, kernel)
    c = kernel.basis
    return c @ block @ c.T


def dct2_inverse(coeffs: np.ndarray, kernel: TransformKernel) -> np.ndarray:
    """Inverse 2D DCT of one B x B coefficient plane."""
    coeffs = _check_block(coeffs, kernel)
    c = kernel.basis
    return c.T @ coeffs @ c


def dct2_forward_many(blocks: np.ndarray, kernel: TransformKernel) -> np.ndarray:
    """Forward 2D DCT of a (n, B, B) stack of blocks."""
    blocks = np.asarray(blocks, dtype=np.float64)
    b = kernel.block_size
    if blocks.ndim != 3 or blocks.shape[1:] != (b, b):
        raise ValueError(f"expected (n, {b}, {b}) stack, got {blocks.shape}")
    c = kernel.basis
    return c @ blocks @ c.T


def dct2_inverse_many(coeffs: np.ndarray, kernel: TransformKernel) -> np.ndarray:
    """Inverse 2D DCT of a (n, B, B) stack of coefficient planes."""
    coeffs = np.asarray(coeffs, dtype=np.float64)
    b = kernel.block_size
    if coeffs.ndim != 3 or coeffs.shape[1:] != (b, b):
        raise ValueError(f"expected (n, {b}, {b}) stack, got {coeffs.shape}")
    c = kernel.basis
    return c.T @ coeffs @ c


@dataclass(frozen=True)
class ZigzagOrder:
    """JPEG anti-diagonal serpentine over a B x B plane, DC first."""

    block_size: int
    order: tuple[tuple[int, int], ...]

    def rank(self, position: tuple[int, int]) -> int:
        return self.order.index(position)

    @property
    def flat_indices(self) -> np.ndarray:
        """Zigzag rank -> flattened (row * B + col) index."""
        b = self.block_size
        return np.array([r * b + c for r, c in self.order], dtype=np.int64)


@lru_cache(maxsize=None)
def zigzag_order(block_size: int) -> ZigzagOrder:
    """Build (and cache) the JPEG zigzag traversal for a block size."""
    n = block_size
    out: list[tuple[int, int]] = []
    for s in range(2 * n - 1):
        lo, hi = max(0, s - n + 1), min(s, n - 1)
        # even anti-diagonals run bottom-left to top-right, odd ones reverse
        rows = range(lo, hi + 1) if s % 2 else range(hi, lo - 1, -1)
        out.extend((r, s - r) for r in rows)
    return ZigzagOrder(n, tuple(out))


@dataclass(frozen=True)
class PositionMask:
    """Set of (row, col) coefficient positions inside a B x B plane."""

    block_size: int
    positions: frozenset[tuple[int, int]]

    def __post_init__(self):
        b = self.block_size
        for r, c in self.positions:
            if not (0 <= r < b and 0 <= c < b):
                raise ValueError(f"position ({r}, {c}) outside {b} x {b} plane")

    def __len__(self) -> int:
        return len(self.positions)

    def __contains__(self, position: tuple[int, int]) -> bool:
        return position in self.positions

    def _check_compatible(self, other: "PositionMask") -> None:
        if self.block_size != other.block_size:
            raise ValueError(f"block size mismatch: {self.block_size} vs {other.block_size}")

    def union(self, other: "PositionMask") -> "PositionMask":
        self._check_compatible(other)
        return PositionMask(self.block_size, self.positions | other.positions)

    def difference(self, other: "PositionMask") -> "PositionMask":
        self._check_compatible(other)
        return PositionMask(self.block_size, self.positions - other.positions)

    def complement(self) -> "PositionMask":
        b = self.block_size
        full = {(r, c) for r in range(b) for c in range(b)}
        return PositionMask(b, frozenset(full - self.positions))

    def isdisjoint(self, other: "PositionMask") -> bool:
        self._check_compatible(other)
        return self.positions.isdisjoint(other.positions)

    def indicator(self) -> np.ndarray:
        """B x B float plane of ones at the masked positions."""
        out = np.zeros((self.block_size, self.block_size))
        for r, c in self.positions:
            out[r, c] = 1.0
        return out


def zigzag_prefix(block_size: int, m: int) -> PositionMask:
    """Mask holding the first m positions in zigzag order."""
    if not 0 <= m <= block_size * block_size:
        raise ValueError(f"prefix length {m} out of range for block size {block_size}")
    order = zigzag_order(block_size).order
    return PositionMask(block_size, frozenset(order[:m]))


def full_mask(block_size: int) -> PositionMask:
    return zigzag_prefix(block_size, block_size * block_size)
