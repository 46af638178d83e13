"""File-request popularity."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class PopularityDist:
    """Request probabilities ``p[j]`` for files ``j = 0..n-1`` (0-based)."""

    p: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=np.float64)
        if p.ndim != 1 or p.size < 1:
            raise ValueError("popularity needs at least one file")
        if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-12:
            raise ValueError("popularity must be a probability vector")
        p.setflags(write=False)
        cdf = np.cumsum(p)
        cdf[-1] = 1.0
        cdf.setflags(write=False)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "_cdf", cdf)

    @property
    def n(self) -> int:
        return self.p.size

    def sample(self, rng: np.random.Generator) -> int:
        return int(np.searchsorted(self._cdf, rng.random(), side="right"))


def zipf(n: int, alpha: float) -> PopularityDist:
    """Zipf law ``p_j ∝ j^-alpha`` over ranks ``1..n``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    w = np.arange(1, n + 1, dtype=np.float64) ** -float(alpha)
    return PopularityDist(w / w.sum())


def sample_file(dist: PopularityDist, rng: np.random.Generator) -> int:
    return dist.sample(rng)
