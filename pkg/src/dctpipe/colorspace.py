"""RGB <-> YCbCr conversion and 2x chroma subsampling.

Uses the ITU-R BT.601 full-range matrix (the JPEG convention):

    Y  =  0.299 R + 0.587 G + 0.114 B
    Cb = -0.168736 R - 0.331264 G + 0.5 B + 128
    Cr =  0.5 R - 0.418688 G - 0.081312 B + 128

All arithmetic is double precision; quantization happens only when
converting back to 8-bit RGB. Downsampling is 2x2 mean pooling and
upsampling is nearest-neighbor replication, so down(up(s)) == s exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .image_io import RgbImage

__all__ = [
    "RGB_TO_YCBCR",
    "YCBCR_OFFSET",
    "SubsampledImage",
    "rgb_to_ycbcr",
    "ycbcr_to_rgb",
    "chroma_downsample",
    "chroma_upsample",
    "subsample_rgb",
    "assemble_rgb",
]

RGB_TO_YCBCR = np.array(
    [
        [0.299, 0.587, 0.114],
        [-0.168736, -0.331264, 0.5],
        [0.5, -0.418688, -0.081312],
    ]
)
YCBCR_OFFSET = np.array([0.0, 128.0, 128.0])
_YCBCR_TO_RGB = np.linalg.inv(RGB_TO_YCBCR)


@dataclass
class SubsampledImage:
    """Full-resolution luma plane plus half-resolution chroma planes."""

    y: np.ndarray
    cb: np.ndarray
    cr: np.ndarray

    def __post_init__(self):
        self.y = np.asarray(self.y, dtype=np.float64)
        self.cb = np.asarray(self.cb, dtype=np.float64)
        self.cr = np.asarray(self.cr, dtype=np.float64)
        if self.cb.shape != self.cr.shape:
            raise ValueError(f"Cb/Cr shapes differ: {self.cb.shape} vs {self.cr.shape}")
        if self.y.shape != (2 * self.cb.shape[0], 2 * self.cb.shape[1]):
            raise ValueError(
                f"Y must be exactly 2x the chroma size, got {self.y.shape} vs {self.cb.shape}"
            )
        for name, plane in (("Y", self.y), ("Cb", self.cb), ("Cr", self.cr)):
            if not np.all(np.isfinite(plane)):
                raise ValueError(f"{name} plane contains non-finite values")

    @property
    def height(self) -> int:
        return self.y.shape[0]

    @property
    def width(self) -> int:
        return self.y.shape[1]


def _as_pixel_array(img) -> np.ndarray:
    pixels = img.pixels if isinstance(img, RgbImage) else np.asarray(img)
    if pixels.ndim != 3 or pixels.shape[2] != 3:
        raise ValueError(f"expected (h, w, 3) pixels, got shape {pixels.shape}")
    return pixels.astype(np.float64)


def rgb_to_ycbcr(img) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Convert an RgbImage (or raw (h, w, 3) array) to full-resolution Y, Cb, Cr planes.

    Purely affine: no clamping, no rounding.
    """
    pixels = _as_pixel_array(img)
    planes = pixels @ RGB_TO_YCBCR.T + YCBCR_OFFSET
    return planes[..., 0], planes[..., 1], planes[..., 2]


def ycbcr_to_rgb(y: np.ndarray, cb: np.ndarray, cr: np.ndarray) -> RgbImage:
    """Invert :func:`rgb_to_ycbcr`; clamp to [0, 255] and round only here."""
    y, cb, cr = (np.asarray(p, dtype=np.float64) for p in (y, cb, cr))
    if not (y.shape == cb.shape == cr.shape):
        raise ValueError(f"plane shapes differ: {y.shape}, {cb.shape}, {cr.shape}")
    stacked = np.stack([y, cb, cr], axis=-1) - YCBCR_OFFSET
    rgb = stacked @ _YCBCR_TO_RGB.T
    return RgbImage(np.clip(np.rint(rgb), 0, 255).astype(np.uint8))


def _pool2(plane: np.ndarray) -> np.ndarray:
    h, w = plane.shape
    if h % 2 or w % 2:
        raise ValueError(f"plane dimensions must be even, got {w}x{h}")
    return plane.reshape(h // 2, 2, w // 2, 2).mean(axis=(1, 3))


def chroma_downsample(y: np.ndarray, cb: np.ndarray, cr: np.ndarray) -> SubsampledImage:
    """2x2 mean-pool the chroma planes; the Y plane passes through untouched."""
    y, cb, cr = (np.asarray(p, dtype=np.float64) for p in (y, cb, cr))
    return SubsampledImage(y, _pool2(cb), _pool2(cr))


def chroma_upsample(s: SubsampledImage) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Replicate each chroma sample into its 2x2 cell (nearest-neighbor)."""
    cb = np.repeat(np.repeat(s.cb, 2, axis=0), 2, axis=1)
    cr = np.repeat(np.repeat(s.cr, 2, axis=0), 2, axis=1)
    return s.y.copy(), cb, cr


def subsample_rgb(img) -> SubsampledImage:
    """RGB image -> subsampled YCbCr representation (encode-side pipeline)."""
    return chroma_downsample(*rgb_to_ycbcr(img))


def assemble_rgb(s: SubsampledImage) -> RgbImage:
    """Subsampled YCbCr representation -> 8-bit RGB image (decode-side pipeline)."""
    return ycbcr_to_rgb(*chroma_upsample(s))
