"""Image <-> token-matrix codec and the DCTK token file format.

Encoding path: level shift each plane by -128, split into BxB blocks,
2D DCT, zigzag, keep the first B^2 - m coefficients, divide by eta.
Each token packs the four Y blocks covering one 2B x 2B luma patch with
the Cb and Cr blocks covering the same patch at half resolution, laid
out as [Y_TL | Y_TR | Y_BL | Y_BR | Cb | Cr]. Decoding inverts every
step; with m = 0 the codec is lossless to floating-point rounding.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .block_dct import dct2, idct2, zigzag_order
from .colorspace import SubsampledImage

__all__ = [
    "LEVEL_SHIFT",
    "TokenConfig",
    "TokenArray",
    "tokenize",
    "detokenize",
    "dct_coefficient_matrices",
    "write_dctk",
    "read_dctk",
]

LEVEL_SHIFT = 128.0

_MAGIC = b"DCTK"
_VERSION = 1
_HEADER = struct.Struct("<IIHHdQ")  # h, w, block_size, drop_count, eta, token_count


@dataclass(frozen=True)
class TokenConfig:
    """Geometry and scaling of a token array.

    The patch size is 2B, so height and width must be divisible by 2B;
    drop_count may remove everything except the DC coefficient.
    """

    block_size: int
    drop_count: int
    eta: float
    height: int
    width: int

    def __post_init__(self):
        b = self.block_size
        if b < 1:
            raise ValueError(f"block size must be >= 1, got {b}")
        if not 0 <= self.drop_count <= b * b - 1:
            raise ValueError(
                f"drop count must be in [0, {b * b - 1}] for B={b}, got {self.drop_count}"
            )
        if not (self.eta > 0 and np.isfinite(self.eta)):
            raise ValueError(f"eta must be a positive finite real, got {self.eta}")
        patch = 2 * b
        if self.height % patch or self.width % patch:
            raise ValueError(
                f"image {self.width}x{self.height} is not tiled by the {patch}x{patch} patch"
            )

    @property
    def kept(self) -> int:
        """Coefficients kept per block after truncation."""
        return self.block_size**2 - self.drop_count

    @property
    def token_width(self) -> int:
        return 6 * self.kept

    @property
    def token_count(self) -> int:
        return (self.height * self.width) // (4 * self.block_size**2)


@dataclass
class TokenArray:
    """N x 6(B^2 - m) matrix of scaled DCT coefficients plus its config."""

    config: TokenConfig
    tokens: np.ndarray

    def __post_init__(self):
        self.tokens = np.asarray(self.tokens, dtype=np.float64)
        want = (self.config.token_count, self.config.token_width)
        if self.tokens.shape != want:
            raise ValueError(f"token matrix shape {self.tokens.shape} != expected {want}")


def _blockify(plane: np.ndarray, b: int) -> np.ndarray:
    h, w = plane.shape
    return plane.reshape(h // b, b, w // b, b).swapaxes(1, 2)


def _unblockify(blocks: np.ndarray) -> np.ndarray:
    gh, gw, b, _ = blocks.shape
    return blocks.swapaxes(1, 2).reshape(gh * b, gw * b)


def _zigzag_coeffs(plane: np.ndarray, b: int) -> np.ndarray:
    """Level-shifted plane -> (grid_h, grid_w, B^2) zigzag-ordered DCT coefficients."""
    blocks = dct2(_blockify(plane - LEVEL_SHIFT, b))
    gh, gw = blocks.shape[:2]
    return blocks.reshape(gh, gw, b * b)[..., zigzag_order(b)]


def tokenize(s: SubsampledImage, cfg: TokenConfig) -> TokenArray:
    """Encode a subsampled image into a scaled token matrix."""
    if (s.height, s.width) != (cfg.height, cfg.width):
        raise ValueError(
            f"image is {s.width}x{s.height} but config says {cfg.width}x{cfg.height}"
        )
    b, k = cfg.block_size, cfg.kept
    ys = _zigzag_coeffs(s.y, b)
    cb = _zigzag_coeffs(s.cb, b)
    cr = _zigzag_coeffs(s.cr, b)
    parts = [
        ys[0::2, 0::2, :k],
        ys[0::2, 1::2, :k],
        ys[1::2, 0::2, :k],
        ys[1::2, 1::2, :k],
        cb[..., :k],
        cr[..., :k],
    ]
    tokens = np.concatenate(parts, axis=-1).reshape(cfg.token_count, cfg.token_width)
    return TokenArray(cfg, tokens / cfg.eta)


def _plane_from_zigzag(coeffs: np.ndarray, b: int) -> np.ndarray:
    """(grid_h, grid_w, B^2) zigzag coefficients -> plane (level shift restored)."""
    gh, gw = coeffs.shape[:2]
    blocks = np.empty((gh, gw, b * b))
    blocks[..., zigzag_order(b)] = coeffs
    return _unblockify(idct2(blocks.reshape(gh, gw, b, b))) + LEVEL_SHIFT


def detokenize(t: TokenArray) -> SubsampledImage:
    """Invert :func:`tokenize`, zero-filling the dropped high-frequency slots."""
    cfg = t.config
    b, k = cfg.block_size, cfg.kept
    nh, nw = cfg.height // (2 * b), cfg.width // (2 * b)
    segs = (t.tokens * cfg.eta).reshape(nh, nw, 6, k)
    full = np.zeros((nh, nw, 6, b * b))
    full[..., :k] = segs

    ys = np.zeros((2 * nh, 2 * nw, b * b))
    ys[0::2, 0::2] = full[:, :, 0]
    ys[0::2, 1::2] = full[:, :, 1]
    ys[1::2, 0::2] = full[:, :, 2]
    ys[1::2, 1::2] = full[:, :, 3]
    return SubsampledImage(
        _plane_from_zigzag(ys, b),
        _plane_from_zigzag(full[:, :, 4], b),
        _plane_from_zigzag(full[:, :, 5], b),
    )


def dct_coefficient_matrices(
    s: SubsampledImage, block_size: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-channel sample matrices of zigzag-ordered, unscaled DCT coefficients.

    Returns (y, cb, cr) with shapes (4N, B^2), (N, B^2), (N, B^2); rows are
    blocks, columns are zigzag ranks. This is the raw material for bound
    estimation and entropy statistics.
    """
    b = block_size
    if s.height % (2 * b) or s.width % (2 * b):
        raise ValueError(
            f"image {s.width}x{s.height} is not tiled by {2 * b}x{2 * b} patches"
        )
    mats = []
    for plane in (s.y, s.cb, s.cr):
        coeffs = _zigzag_coeffs(plane, b)
        mats.append(coeffs.reshape(-1, b * b))
    return mats[0], mats[1], mats[2]


def write_dctk(path, t: TokenArray) -> None:
    """Write a token array in the DCTK binary format (little-endian, f64 payload)."""
    cfg = t.config
    header = _HEADER.pack(
        cfg.height, cfg.width, cfg.block_size, cfg.drop_count, cfg.eta, cfg.token_count
    )
    payload = np.ascontiguousarray(t.tokens, dtype="<f8").tobytes()
    Path(path).write_bytes(_MAGIC + struct.pack("<H", _VERSION) + header + payload)


def read_dctk(path) -> TokenArray:
    """Read a DCTK file written by :func:`write_dctk`."""
    data = Path(path).read_bytes()
    if data[:4] != _MAGIC:
        raise ValueError(f"not a DCTK file: bad magic {data[:4]!r}")
    (version,) = struct.unpack_from("<H", data, 4)
    if version != _VERSION:
        raise ValueError(f"unsupported DCTK version {version}")
    h, w, b, m, eta, n = _HEADER.unpack_from(data, 6)
    cfg = TokenConfig(block_size=b, drop_count=m, eta=eta, height=h, width=w)
    if n != cfg.token_count:
        raise ValueError(f"header token count {n} != geometry-implied {cfg.token_count}")
    offset = 6 + _HEADER.size
    need = n * cfg.token_width * 8
    if len(data) - offset < need:
        raise ValueError(f"truncated DCTK payload: need {need} bytes")
    tokens = np.frombuffer(data, dtype="<f8", count=n * cfg.token_width, offset=offset)
    return TokenArray(cfg, tokens.reshape(n, cfg.token_width).astype(np.float64))
