"""Frechet distance between feature distributions and the m* compression scan.

The distance is the Gaussian Wasserstein-2 form
|mu1 - mu2|^2 + tr(S1 + S2 - 2 (S1 S2)^{1/2}) over a pluggable feature
space; two dependency-free extractors are built in (8x8 mean-pooled luma,
and per-image mean/std of each DCT coefficient per channel). The scan
pushes a dataset through the codec at increasing drop counts m and returns
the largest m whose reconstruction distance stays under a threshold.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .colorspace import assemble_rgb, rgb_to_ycbcr, subsample_rgb
from .image_io import RgbImage
from .tokenizer import TokenConfig, dct_coefficient_matrices, detokenize, tokenize

__all__ = [
    "GaussianStats",
    "gaussian_stats",
    "frechet_distance",
    "extract_pixel_features",
    "extract_dct_stat_features",
    "make_feature_extractor",
    "reconstruct_rgb",
    "ScanConfig",
    "MStarResult",
    "scan_mstar",
    "compression_ratio",
]

FEATURE_MODES = ("downsampled_pixels", "dct_block_stats")

_RIDGE = 1e-6
_EIG_DUST = 1e-8


@dataclass
class GaussianStats:
    """Sample mean and (ridge-regularized) covariance of a feature set."""

    mean: np.ndarray
    cov: np.ndarray
    n: int

    def __post_init__(self):
        self.mean = np.asarray(self.mean, dtype=np.float64)
        self.cov = np.asarray(self.cov, dtype=np.float64)
        d = self.mean.shape[0]
        if self.mean.ndim != 1 or self.cov.shape != (d, d):
            raise ValueError(f"inconsistent stat shapes {self.mean.shape} / {self.cov.shape}")
        if not np.allclose(self.cov, self.cov.T, atol=1e-10):
            raise ValueError("covariance must be symmetric")

    @property
    def dim(self) -> int:
        return self.mean.shape[0]


def gaussian_stats(features: np.ndarray, ridge: float = _RIDGE) -> GaussianStats:
    """Mean and unbiased covariance of an (n, d) feature matrix, plus ridge."""
    x = np.asarray(features, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError(f"features must be (n, d), got shape {x.shape}")
    n, d = x.shape
    if n < 2:
        raise ValueError(f"need at least 2 samples, got {n}")
    mean = x.mean(axis=0)
    centered = x - mean
    cov = centered.T @ centered / (n - 1)
    cov = 0.5 * (cov + cov.T) + ridge * np.eye(d)
    return GaussianStats(mean, cov, n)


def _psd_sqrt(mat: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh(mat)
    vals = _clamp_dust(vals)
    return (vecs * np.sqrt(vals)) @ vecs.T


def _clamp_dust(vals: np.ndarray) -> np.ndarray:
    # Negative dust from eigh rounding is zeroed; the tolerance scales with
    # the spectrum so large-magnitude feature spaces do not trip it.
    tol = _EIG_DUST * max(1.0, float(np.abs(vals).max()))
    if np.any(vals < -tol):
        raise ValueError(f"matrix is not PSD: eigenvalue {vals.min():.3e}")
    return np.where(vals < 0, 0.0, vals)


def frechet_distance(s1: GaussianStats, s2: GaussianStats) -> float:
    """Gaussian Frechet (Wasserstein-2 squared) distance between two stats.

    The cross term tr((S1^{1/2} S2 S1^{1/2})^{1/2}) is evaluated as the
    nuclear norm of root2 @ root1: the singular values of that product are
    exactly the square roots of the eigenvalues of S1^{1/2} S2 S1^{1/2},
    and the SVD keeps ridge-level eigenvalues from drowning in rounding
    noise when the covariances are nearly singular.
    """
    if s1.dim != s2.dim:
        raise ValueError(f"dimension mismatch: {s1.dim} vs {s2.dim}")
    cross = np.linalg.svd(_psd_sqrt(s2.cov) @ _psd_sqrt(s1.cov), compute_uv=False).sum()
    diff = s1.mean - s2.mean
    return float(diff @ diff + np.trace(s1.cov) + np.trace(s2.cov) - 2.0 * cross)


def _pool_to(plane: np.ndarray, grid: int) -> np.ndarray:
    h, w = plane.shape
    if h % grid or w % grid:
        raise ValueError(f"plane {w}x{h} is not divisible by the {grid}x{grid} feature grid")
    return plane.reshape(grid, h // grid, grid, w // grid).mean(axis=(1, 3))


def extract_pixel_features(img: RgbImage, grid: int = 8) -> np.ndarray:
    """Luma mean-pooled to grid x grid, flattened (default 64-dim)."""
    y, _, _ = rgb_to_ycbcr(img)
    return _pool_to(y, grid).ravel()


def extract_dct_stat_features(img: RgbImage, block_size: int, kept: int | None = None) -> np.ndarray:
    """Per-channel mean and std of each kept DCT coefficient rank.

    Dimension is 2 * 3 * kept (kept defaults to the full B^2).
    """
    k = block_size**2 if kept is None else kept
    mats = dct_coefficient_matrices(subsample_rgb(img), block_size)
    feats = []
    for mat in mats:
        feats.append(mat[:, :k].mean(axis=0))
        feats.append(mat[:, :k].std(axis=0))
    return np.concatenate(feats)


def make_feature_extractor(mode: str, block_size: int | None = None):
    """Feature function RgbImage -> 1-D vector for the given mode."""
    if mode == "downsampled_pixels":
        return extract_pixel_features
    if mode == "dct_block_stats":
        if block_size is None:
            raise ValueError("dct_block_stats features need a block size")
        return lambda img: extract_dct_stat_features(img, block_size)
    raise ValueError(f"unknown feature mode {mode!r} (want one of {FEATURE_MODES})")


def reconstruct_rgb(img: RgbImage, block_size: int, drop_count: int) -> RgbImage:
    """Round-trip an image through the full codec at the given drop count."""
    s = subsample_rgb(img)
    cfg = TokenConfig(
        block_size=block_size, drop_count=drop_count, eta=1.0, height=s.height, width=s.width
    )
    return assemble_rgb(detokenize(tokenize(s, cfg)))


@dataclass(frozen=True)
class ScanConfig:
    """Threshold, candidate drop counts, and feature space of an m* scan."""

    gamma: float
    m_grid: tuple[int, ...]
    feature_mode: str = "downsampled_pixels"

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        grid = tuple(int(m) for m in self.m_grid)
        if not grid or any(m < 0 for m in grid):
            raise ValueError("m_grid must be a nonempty list of nonnegative drop counts")
        if list(grid) != sorted(set(grid)):
            raise ValueError("m_grid must be strictly ascending")
        object.__setattr__(self, "m_grid", grid)
        if self.feature_mode not in FEATURE_MODES:
            raise ValueError(f"unknown feature mode {self.feature_mode!r}")


@dataclass
class MStarResult:
    """Outcome of a scan: chosen m*, the full (m, distance) curve, saturation."""

    m_star: int
    curve: tuple[tuple[int, float], ...]
    saturated: bool


def scan_mstar(images, block_size: int, cfg: ScanConfig, map_fn=map) -> MStarResult:
    """Find the largest drop count whose reconstruction distance stays under gamma.

    For each m in the grid the dataset is reconstructed through the codec,
    features are extracted from originals and reconstructions, and the
    Frechet distance between the two feature distributions is recorded.
    ``map_fn`` may be an order-preserving parallel map.
    """
    images = list(images)
    if len(images) < 500:
        raise ValueError(f"scan needs at least 500 images, got {len(images)}")
    if max(cfg.m_grid) > block_size**2 - 1:
        raise ValueError(f"m_grid exceeds B^2-1 = {block_size**2 - 1}")
    extract = make_feature_extractor(cfg.feature_mode, block_size)
    ref = gaussian_stats(np.stack(list(map_fn(extract, images))))

    curve = []
    for m in cfg.m_grid:
        def recon_features(img, _m=m):
            return extract(reconstruct_rgb(img, block_size, _m))

        stats = gaussian_stats(np.stack(list(map_fn(recon_features, images))))
        curve.append((m, frechet_distance(ref, stats)))

    passing = [m for m, d in curve if d < cfg.gamma]
    if passing:
        return MStarResult(max(passing), tuple(curve), saturated=False)
    return MStarResult(0, tuple(curve), saturated=True)


def compression_ratio(block_size: int, drop_count: int) -> float:
    """Signal-count ratio of raw RGB (3 h w) to the token representation.

    Chroma subsampling contributes the factor 2 and truncation the factor
    B^2 / (B^2 - m), giving 2 B^2 / (B^2 - m).
    """
    b2 = block_size**2
    if not 0 <= drop_count <= b2 - 1:
        raise ValueError(f"drop count must be in [0, {b2 - 1}], got {drop_count}")
    return 2.0 * b2 / (b2 - drop_count)
