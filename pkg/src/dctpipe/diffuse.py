"""Forward VP perturbation of token arrays with counter-based noise.

Noise is keyed by (seed, coefficient counter) rather than drawn from a
sequential stream, so any parallel or chunked execution order produces
identical output. The generator is SplitMix64 used in counter mode:

    word(seed, n) = mix64(mix64(seed) + (n + 1) * 0x9E3779B97F4A7C15)

Each standard normal consumes two words via Box-Muller:

    z = sqrt(-2 ln u1) * cos(2 pi u2),  u_k = ((word_k >> 11) + 1) * 2^-53

where coefficient i uses counters 2i and 2i+1. The scheme is fixed so
that outputs are reproducible across runs and comparable in distribution
across implementations (not bit-exactly, since libm cos/log may differ).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .schedule import NoiseSchedule, y_scaled
from .tokenizer import TokenArray

__all__ = [
    "counter_uniforms",
    "counter_normals",
    "derive_stream",
    "PerturbParams",
    "perturb_params",
    "perturb",
]

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


def _mix64(x):
    x = (x ^ (x >> np.uint64(30))) * _MIX1
    x = (x ^ (x >> np.uint64(27))) * _MIX2
    return x ^ (x >> np.uint64(31))


def _key(seed: int) -> np.uint64:
    return _mix64(np.uint64(int(seed) & 0xFFFFFFFFFFFFFFFF) + _GOLDEN)


def counter_uniforms(seed: int, counters: np.ndarray) -> np.ndarray:
    """Uniforms in (0, 1], one per counter value, independent of call order."""
    counters = np.asarray(counters, dtype=np.uint64)
    with np.errstate(over="ignore"):
        words = _mix64(_key(seed) + (counters + np.uint64(1)) * _GOLDEN)
    return ((words >> np.uint64(11)).astype(np.float64) + 1.0) * 2.0**-53


def counter_normals(seed: int, count: int, start: int = 0) -> np.ndarray:
    """Standard normals for coefficient indices start..start+count-1."""
    idx = np.arange(start, start + count, dtype=np.uint64)
    u1 = counter_uniforms(seed, idx * np.uint64(2))
    u2 = counter_uniforms(seed, idx * np.uint64(2) + np.uint64(1))
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)


def derive_stream(seed: int, stream: int) -> int:
    """Derive an independent sub-seed, e.g. one per time point of a sweep."""
    with np.errstate(over="ignore"):
        return int(_mix64(_key(seed) ^ np.uint64(int(stream) & 0xFFFFFFFFFFFFFFFF)))


@dataclass(frozen=True)
class PerturbParams:
    """Mean coefficient and noise std of the VP kernel at one time."""

    mean_coef: float
    std: float

    def __post_init__(self):
        if not 0 < self.mean_coef <= 1:
            raise ValueError(f"mean coefficient must lie in (0, 1], got {self.mean_coef}")
        if abs(self.mean_coef**2 + self.std**2 - 1.0) > 1e-12:
            raise ValueError("kernel is not variance preserving")


def perturb_params(t: float, sched: NoiseSchedule = NoiseSchedule()) -> PerturbParams:
    """VP kernel coefficients at time t under the (SNR-scaled) schedule."""
    yp = float(y_scaled(t, sched))
    return PerturbParams(mean_coef=np.exp(-0.5 * yp), std=np.sqrt(-np.expm1(-yp)))


def perturb(x0: TokenArray, t: float, sched: NoiseSchedule, seed: int) -> TokenArray:
    """Sample x_t = mean(t) x_0 + std(t) eps with counter-keyed noise.

    Coefficient (token i, column j) uses counter i * width + j, so the
    result does not depend on how the work is split across threads.
    """
    if t == 0:
        return TokenArray(x0.config, x0.tokens.copy())
    p = perturb_params(t, sched)
    eps = counter_normals(seed, x0.tokens.size).reshape(x0.tokens.shape)
    return TokenArray(x0.config, p.mean_coef * x0.tokens + p.std * eps)
