"""Orthonormal 2D type-II DCT on square blocks, plus zigzag ordering.

The transform matrix T has rows T[u, x] = alpha(u) * cos((2x+1)u*pi / 2B)
with alpha(0) = sqrt(1/B) and alpha(u>0) = sqrt(2/B), so the 2D transform
is the separable product T A T^T and its inverse is T^T D T. Both accept
stacks of blocks (shape (..., B, B)) and run as batched matmuls, which is
what the block-grid codecs in this package rely on.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

__all__ = ["basis_matrix", "dct2", "idct2", "zigzag_order", "inverse_zigzag_order"]


@lru_cache(maxsize=None)
def _basis(block_size: int) -> np.ndarray:
    if block_size < 1:
        raise ValueError(f"block size must be >= 1, got {block_size}")
    b = block_size
    x = np.arange(b)
    u = np.arange(b)[:, None]
    t = np.cos((2 * x + 1) * u * np.pi / (2 * b))
    t *= np.sqrt(2.0 / b)
    t[0, :] = np.sqrt(1.0 / b)
    t.setflags(write=False)
    return t


def basis_matrix(block_size: int) -> np.ndarray:
    """Return the orthonormal 1D DCT-II basis matrix (a fresh copy)."""
    return _basis(block_size).copy()


def _check_square(block: np.ndarray) -> int:
    block = np.asarray(block)
    if block.ndim < 2 or block.shape[-1] != block.shape[-2]:
        raise ValueError(f"expected square block(s), got shape {block.shape}")
    return block.shape[-1]


def dct2(block: np.ndarray) -> np.ndarray:
    """Forward 2D DCT-II of one block or a stack of blocks.

    The caller is responsible for level shifting (zero-centering) the input.
    """
    block = np.asarray(block, dtype=np.float64)
    t = _basis(_check_square(block))
    return t @ block @ t.T


def idct2(coeffs: np.ndarray) -> np.ndarray:
    """Inverse of :func:`dct2` (exact up to floating-point rounding)."""
    coeffs = np.asarray(coeffs, dtype=np.float64)
    t = _basis(_check_square(coeffs))
    return t.T @ coeffs @ t


@lru_cache(maxsize=None)
def _zigzag(block_size: int) -> np.ndarray:
    if block_size < 1:
        raise ValueError(f"block size must be >= 1, got {block_size}")
    b = block_size
    order = []
    for d in range(2 * b - 1):
        lo, hi = max(0, d - b + 1), min(d, b - 1)
        rows = range(lo, hi + 1) if d % 2 == 1 else range(hi, lo - 1, -1)
        order.extend(r * b + (d - r) for r in rows)
    perm = np.array(order, dtype=np.intp)
    perm.setflags(write=False)
    return perm


def zigzag_order(block_size: int) -> np.ndarray:
    """Zigzag permutation: rank -> flattened (row-major) coefficient index.

    JPEG convention: start at (0,0), first move right, then alternate
    up-right / down-left along anti-diagonals.
    """
    return _zigzag(block_size)


@lru_cache(maxsize=None)
def _inverse_zigzag(block_size: int) -> np.ndarray:
    perm = _zigzag(block_size)
    inv = np.empty_like(perm)
    inv[perm] = np.arange(perm.size, dtype=np.intp)
    inv.setflags(write=False)
    return inv


def inverse_zigzag_order(block_size: int) -> np.ndarray:
    """Inverse permutation: flattened coefficient index -> zigzag rank."""
    return _inverse_zigzag(block_size)
