"""Frequency-domain statistics of DCT coefficient datasets.

Covers four jobs: per-frequency entropy weights for loss reweighting,
the averaged power spectral density (APSD) of clean and noise-perturbed
blocks, power-law fits of spectra, and the time at which a frequency's
SNR crosses a threshold. The frequency axis is always the zigzag rank
of the block DCT, not a Fourier bin.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .block_dct import dct2, zigzag_order
from .diffuse import counter_normals, derive_stream, perturb_params
from .schedule import NoiseSchedule, y_scaled

__all__ = [
    "EntropyWeights",
    "entropy_weights",
    "apply_ebfr",
    "SpectrumProfile",
    "apsd",
    "power_law_fit",
    "ThresholdCrossing",
    "snr_threshold_time",
    "save_weights",
    "load_weights",
]

_CHANNELS = ("Y", "Cb", "Cr")


@dataclass(frozen=True)
class EntropyWeights:
    """Per-frequency loss weights, one per (channel, kept zigzag rank).

    ``weights`` is ordered Y ranks, then Cb ranks, then Cr ranks and is
    normalized to mean 1. ``clamped_ranks`` flags positions whose weight
    was degenerate (constant samples) or nonpositive and was replaced by
    the smallest positive weight seen.
    """

    weights: np.ndarray
    block_size: int
    drop_count: int
    clamped_ranks: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "weights", np.asarray(self.weights, dtype=np.float64))
        kept = self.block_size**2 - self.drop_count
        if self.weights.shape != (3 * kept,):
            raise ValueError(f"expected {3 * kept} weights, got shape {self.weights.shape}")
        if np.any(self.weights <= 0):
            raise ValueError("all weights must be strictly positive")
        if abs(self.weights.mean() - 1.0) > 1e-9:
            raise ValueError("weights must be normalized to mean 1")


def _hist_entropy(samples: np.ndarray, bins: int) -> float | None:
    lo, hi = samples.min(), samples.max()
    if hi == lo:
        return None
    counts, _ = np.histogram(samples, bins=bins, range=(lo, hi))
    p = counts[counts > 0] / samples.size
    return float(-(p * np.log(p)).sum() + np.log((hi - lo) / bins))


def entropy_weights(
    channel_samples,
    block_size: int,
    drop_count: int = 0,
    bins: int = 256,
) -> EntropyWeights:
    """Estimate per-frequency entropy weights from coefficient samples.

    ``channel_samples`` is a (y, cb, cr) triple of (n_blocks, kept) matrices
    of zigzag-ordered coefficients (n >= 1000 per channel). Each rank's
    differential entropy comes from a ``bins``-bin histogram over its own
    empirical range. Normalization to mean 1 is additive (H - mean(H) + 1):
    a global rescale of the samples shifts every entropy by the same ln k,
    so the shift cancels and the weights are scale invariant.
    """
    if bins < 16:
        raise ValueError(f"need at least 16 histogram bins, got {bins}")
    kept = block_size**2 - drop_count
    mats = [np.asarray(m, dtype=np.float64) for m in channel_samples]
    if len(mats) != 3:
        raise ValueError(f"expected (y, cb, cr) sample matrices, got {len(mats)}")
    raw = np.empty(3 * kept)
    degenerate = np.zeros(3 * kept, dtype=bool)
    for ci, (name, mat) in enumerate(zip(_CHANNELS, mats)):
        if mat.ndim != 2 or mat.shape[1] != kept:
            raise ValueError(f"{name} samples must have {kept} columns, got {mat.shape}")
        if mat.shape[0] < 1000:
            raise ValueError(f"{name} channel needs >= 1000 samples per rank, got {mat.shape[0]}")
        for r in range(kept):
            h = _hist_entropy(mat[:, r], bins)
            pos = ci * kept + r
            degenerate[pos] = h is None
            raw[pos] = np.nan if h is None else h

    if degenerate.all():
        raise ValueError("every rank is constant; no entropy to estimate")
    weights = raw - np.nanmean(raw) + 1.0
    clamp = degenerate | ~(weights > 0)
    if clamp.any():
        positive = weights[~np.isnan(weights) & (weights > 0)]
        weights[clamp] = positive.min() if positive.size else 1.0
        weights /= weights.mean()
    return EntropyWeights(
        weights=weights,
        block_size=block_size,
        drop_count=drop_count,
        clamped_ranks=tuple(int(i) for i in np.flatnonzero(clamp)),
    )


def apply_ebfr(squared_residuals: np.ndarray, w: EntropyWeights) -> float:
    """Weighted sum of squared residuals laid out like token rows.

    The last axis must be 6 * kept, matching [Y|Y|Y|Y|Cb|Cr]; the Y weight
    block is broadcast across the four Y segments.
    """
    sq = np.asarray(squared_residuals, dtype=np.float64)
    kept = w.block_size**2 - w.drop_count
    if sq.shape[-1] != 6 * kept:
        raise ValueError(f"last axis must be {6 * kept}, got {sq.shape[-1]}")
    wy, wcb, wcr = w.weights[:kept], w.weights[kept : 2 * kept], w.weights[2 * kept :]
    per_token = np.concatenate([wy, wy, wy, wy, wcb, wcr])
    return float(np.sum(sq * per_token))


@dataclass
class SpectrumProfile:
    """Averaged power per zigzag rank at one diffusion time (t=0 means clean)."""

    powers: np.ndarray
    sample_count: int
    channel: str
    time: float

    def __post_init__(self):
        self.powers = np.asarray(self.powers, dtype=np.float64)
        if np.any(self.powers < 0):
            raise ValueError("powers must be nonnegative")
        if self.sample_count <= 0:
            raise ValueError("sample count must be positive")


def apsd(
    blocks: np.ndarray,
    sched: NoiseSchedule,
    t_grid,
    seed: int = 0,
    mode: str = "vp",
    channel: str = "Y",
) -> list[SpectrumProfile]:
    """Monte-Carlo averaged power spectral density per zigzag rank.

    ``blocks`` are spatial-domain BxB blocks, shape (n, B, B) with n >= 1000;
    they are DCT-transformed here. For each t the blocks are perturbed in
    DCT space and E[D_r(x_t)^2] is estimated per rank. ``mode`` selects the
    kernel: "vp" is the variance-preserving x_t = m(t) x_0 + s(t) eps;
    "ve" is the additive x_t = x_0 + sigma(t) eps with sigma^2 = y'(t), the
    form under which noisy power = clean power + sigma^2 holds per rank.
    """
    blocks = np.asarray(blocks, dtype=np.float64)
    if blocks.ndim != 3 or blocks.shape[1] != blocks.shape[2]:
        raise ValueError(f"blocks must be (n, B, B), got {blocks.shape}")
    n, b = blocks.shape[0], blocks.shape[1]
    if n < 1000:
        raise ValueError(f"need at least 1000 blocks, got {n}")
    if mode not in ("vp", "ve"):
        raise ValueError(f"mode must be 'vp' or 've', got {mode!r}")

    coeffs = dct2(blocks).reshape(n, b * b)[:, zigzag_order(b)]
    profiles = []
    for ti, t in enumerate(np.atleast_1d(np.asarray(t_grid, dtype=np.float64))):
        if t == 0:
            xt = coeffs
        else:
            eps = counter_normals(derive_stream(seed, ti), coeffs.size).reshape(coeffs.shape)
            if mode == "vp":
                p = perturb_params(t, sched)
                xt = p.mean_coef * coeffs + p.std * eps
            else:
                xt = coeffs + np.sqrt(float(y_scaled(t, sched))) * eps
        profiles.append(
            SpectrumProfile(np.mean(xt * xt, axis=0), sample_count=n, channel=channel, time=float(t))
        )
    return profiles


def power_law_fit(profile: SpectrumProfile) -> tuple[float, float]:
    """Fit power ~ K rank^-alpha over ranks >= 1 by least squares in log-log.

    Returns (K, alpha). All fitted powers must be positive and there must be
    at least 4 of them.
    """
    powers = profile.powers[1:]
    if powers.size < 4:
        raise ValueError(f"need at least 4 ranks beyond DC, got {powers.size}")
    if np.any(powers <= 0):
        raise ValueError("cannot fit a power law through nonpositive powers")
    log_r = np.log(np.arange(1, powers.size + 1, dtype=np.float64))
    slope, intercept = np.polyfit(log_r, np.log(powers), 1)
    return float(np.exp(intercept)), float(-slope)


class ThresholdCrossing(NamedTuple):
    """Crossing time plus a flag for frequencies that never reach the threshold."""

    time: float
    saturated: bool


def snr_threshold_time(
    s0: float,
    gamma: float,
    sched: NoiseSchedule = NoiseSchedule(),
    mode: str = "vp",
    g: float = 1.0,
) -> ThresholdCrossing:
    """Time at which a frequency with clean power ``s0`` reaches SNR = gamma.

    mode "ve_const_g": SNR(t) = s0 / (t g^2), so t = s0 / (gamma g^2).
    mode "vp": the kernel gives SNR(t) = e^{-y} s0 / (1 - e^{-y}); solving
    for y yields y = ln((s0 + gamma) / gamma) and t follows from inverting
    y = a t + 0.5 b t^2. A crossing with t > 1 is flagged as saturated.
    """
    if s0 <= 0 or gamma <= 0:
        raise ValueError("s0 and gamma must be positive")
    if mode == "ve_const_g":
        t = s0 / (gamma * g * g)
    elif mode == "vp":
        y = float(np.log((s0 + gamma) / gamma))
        t = (-sched.a + np.sqrt(sched.a**2 + 2.0 * sched.b * y)) / sched.b
    else:
        raise ValueError(f"mode must be 've_const_g' or 'vp', got {mode!r}")
    return ThresholdCrossing(float(t), bool(t > 1.0))


def save_weights(path, w: EntropyWeights) -> None:
    doc = {
        "block_size": w.block_size,
        "drop": w.drop_count,
        "weights": w.weights.tolist(),
        "clamped_ranks": list(w.clamped_ranks),
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


def load_weights(path) -> EntropyWeights:
    doc = json.loads(Path(path).read_text())
    return EntropyWeights(
        weights=np.asarray(doc["weights"]),
        block_size=doc["block_size"],
        drop_count=doc["drop"],
        clamped_ranks=tuple(doc.get("clamped_ranks", ())),
    )
