"""Percentile-based coefficient bounds.

Two estimators over a dataset of zigzag-ordered DCT blocks:

* entropy-consistent: one global bound eta taken from the Y-channel DC
  distribution, eta = max(|P_tau|, |P_{100-tau}|);
* naive: one bound per channel and zigzag rank (3 B^2 bounds total),
  same percentile rule applied per column.

Percentiles use linear interpolation between closest order statistics
(numpy's default). The default tau is 98.25.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .diffuse import counter_uniforms

__all__ = [
    "DEFAULT_TAU",
    "ScalingBounds",
    "estimate_ecs_bound",
    "estimate_naive_bounds",
    "reservoir_sample",
    "save_bounds",
    "load_bounds",
]

DEFAULT_TAU = 98.25

# Cap on pooled per-rank samples before the sort; beyond this a
# deterministic reservoir subsample stands in for the full set.
MAX_SAMPLES_PER_RANK = 1 << 22


def _check_tau(tau: float) -> float:
    if not 50.0 < tau < 100.0:
        raise ValueError(f"tau must lie in (50, 100), got {tau}")
    return float(tau)


def _percentile_bound(samples: np.ndarray, tau: float) -> float:
    up = np.percentile(samples, tau)
    low = np.percentile(samples, 100.0 - tau)
    return float(max(abs(up), abs(low)))


def estimate_ecs_bound(dc_samples, tau: float = DEFAULT_TAU) -> float:
    """Entropy-consistent bound: percentile envelope of the Y DC coefficients.

    ``dc_samples`` pools D(0, 0) over all Y blocks of all images.
    """
    tau = _check_tau(tau)
    x = np.asarray(dc_samples, dtype=np.float64).ravel()
    if x.size < 2:
        raise ValueError(f"need at least 2 DC samples, got {x.size}")
    if not np.all(np.isfinite(x)):
        raise ValueError("DC samples contain non-finite values")
    eta = _percentile_bound(x, tau)
    if eta <= 0:
        raise ValueError("DC percentile bound is zero; dataset has no luma spread")
    return eta


def estimate_naive_bounds(channel_samples, tau: float = DEFAULT_TAU) -> np.ndarray:
    """Per-frequency bounds for all three channels.

    ``channel_samples`` is a (y, cb, cr) triple of (n_blocks, B^2) matrices of
    zigzag-ordered coefficients. Returns 3 B^2 bounds ordered Y ranks 0..B^2-1,
    then Cb, then Cr. Every rank must have spread: a zero bound (constant
    column) is an error because it cannot scale anything.
    """
    tau = _check_tau(tau)
    mats = [np.asarray(m, dtype=np.float64) for m in channel_samples]
    if len(mats) != 3:
        raise ValueError(f"expected (y, cb, cr) sample matrices, got {len(mats)}")
    width = mats[0].shape[1] if mats[0].ndim == 2 else -1
    bounds = []
    for name, mat in zip(("Y", "Cb", "Cr"), mats):
        if mat.ndim != 2 or mat.shape[1] != width:
            raise ValueError(f"{name} samples must be (n, B^2) with a shared B^2")
        if mat.shape[0] < 2:
            raise ValueError(f"{name} channel needs at least 2 blocks, got {mat.shape[0]}")
        if not np.all(np.isfinite(mat)):
            raise ValueError(f"{name} samples contain non-finite values")
        up = np.percentile(mat, tau, axis=0)
        low = np.percentile(mat, 100.0 - tau, axis=0)
        bounds.append(np.maximum(np.abs(up), np.abs(low)))
    out = np.concatenate(bounds)
    if np.any(out <= 0):
        bad = int(np.argmax(out <= 0))
        raise ValueError(f"rank {bad % width} of channel {bad // width} has zero spread")
    return out


def reservoir_sample(samples: np.ndarray, limit: int, seed: int = 0) -> np.ndarray:
    """Deterministically subsample to at most ``limit`` values.

    Used when a pooled per-rank sample set would not fit in memory; the
    selection depends only on (input order, limit, seed).
    """
    x = np.asarray(samples)
    if limit < 1:
        raise ValueError(f"limit must be >= 1, got {limit}")
    if x.size <= limit:
        return x
    # Keep the `limit` smallest keys: equivalent to a uniform reservoir.
    keys = counter_uniforms(seed, np.arange(x.size, dtype=np.uint64))
    return x[np.sort(np.argpartition(keys, limit)[:limit])]


@dataclass(frozen=True)
class ScalingBounds:
    """Result of a bound estimation run, as stored in bounds JSON files."""

    mode: str
    tau: float
    block_size: int
    eta: float | None = None
    naive_bounds: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.mode not in ("ecs", "naive"):
            raise ValueError(f"mode must be 'ecs' or 'naive', got {self.mode!r}")
        _check_tau(self.tau)
        if self.block_size < 1:
            raise ValueError(f"block size must be >= 1, got {self.block_size}")
        if self.mode == "ecs":
            if self.eta is None or not self.eta > 0:
                raise ValueError("ecs bounds require a positive eta")
        else:
            if self.naive_bounds is None:
                raise ValueError("naive bounds require the bound vector")
            want = 3 * self.block_size**2
            if len(self.naive_bounds) != want:
                raise ValueError(f"expected {want} naive bounds, got {len(self.naive_bounds)}")
            if any(b <= 0 for b in self.naive_bounds):
                raise ValueError("all naive bounds must be strictly positive")


def save_bounds(path, bounds: ScalingBounds) -> None:
    doc: dict = {"mode": bounds.mode, "tau": bounds.tau, "block_size": bounds.block_size}
    if bounds.mode == "ecs":
        doc["eta"] = bounds.eta
    else:
        doc["naive_bounds"] = list(bounds.naive_bounds)
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


def load_bounds(path) -> ScalingBounds:
    doc = json.loads(Path(path).read_text())
    naive = doc.get("naive_bounds")
    return ScalingBounds(
        mode=doc["mode"],
        tau=doc["tau"],
        block_size=doc["block_size"],
        eta=doc.get("eta"),
        naive_bounds=tuple(naive) if naive is not None else None,
    )
