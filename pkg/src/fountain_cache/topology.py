"""How many hubs a user sees: explicit distributions and square-grid geometry."""

from __future__ import annotations

import logging
import math
from collections.abc import Iterable, Mapping
from dataclasses import dataclass

import numpy as np

logger = logging.getLogger(__name__)

#: Connectivity used for the reference scenarios (r = 60 km, d = 45 km).
REFERENCE_GAMMA = {1: 0.2907, 2: 0.6591, 3: 0.0430, 4: 0.0072}


@dataclass(frozen=True, eq=False)
class ConnectivityDist:
    """``gamma[i]`` is the probability that a user is connected to ``hubs[i]`` hubs."""

    hubs: np.ndarray
    gamma: np.ndarray

    def __post_init__(self):
        hubs = np.asarray(self.hubs, dtype=np.int64)
        gamma = np.asarray(self.gamma, dtype=np.float64)
        if hubs.shape != gamma.shape or hubs.ndim != 1 or hubs.size == 0:
            raise ValueError("hubs and gamma must be equal-length nonempty vectors")
        if np.any(hubs < 0) or np.unique(hubs).size != hubs.size:
            raise ValueError("hub counts must be distinct nonnegative integers")
        if np.any(gamma < 0) or abs(gamma.sum() - 1.0) > 1e-9:
            raise ValueError("gamma must be a probability vector")
        order = np.argsort(hubs)
        hubs, gamma = hubs[order], gamma[order]
        hubs.setflags(write=False)
        gamma.setflags(write=False)
        cdf = np.cumsum(gamma)
        cdf[-1] = 1.0
        object.__setattr__(self, "hubs", hubs)
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "_cdf", cdf)

    def as_dict(self) -> dict[int, float]:
        return {int(h): float(g) for h, g in zip(self.hubs, self.gamma)}

    @property
    def uncovered(self) -> float:
        return float(self.gamma[self.hubs == 0].sum())

    def mean(self) -> float:
        return float(np.dot(self.hubs, self.gamma))

    def served(self) -> ConnectivityDist:
        """Distribution conditioned on ``H >= 1``.

        Users with no hub in range cannot be served at all, so every rate
        computation works with the conditioned distribution.
        """
        keep = (self.hubs > 0) & (self.gamma > 0)
        if keep.all():
            return self
        mass = self.gamma[keep].sum()
        if mass <= 0:
            raise ValueError("no user is connected to any hub")
        if self.uncovered > 0:
            logger.info("conditioning on H >= 1: dropping uncovered mass %.6g", self.uncovered)
        return ConnectivityDist(self.hubs[keep], self.gamma[keep] / mass)

    def sample(self, rng: np.random.Generator) -> int:
        return int(self.hubs[np.searchsorted(self._cdf, rng.random(), side="right")])


def connectivity_explicit(values: Mapping[int, float] | Iterable[tuple[int, float]]) -> ConnectivityDist:
    """Validate a user-supplied ``h -> gamma_h`` table.

    Small rounding (total within 1e-6 of one) is renormalized away; anything
    further off is rejected.
    """
    pairs = list(values.items()) if isinstance(values, Mapping) else list(values)
    if not pairs:
        raise ValueError("empty connectivity distribution")
    hubs = np.array([int(h) for h, _ in pairs])
    gamma = np.array([float(g) for _, g in pairs])
    if np.any(gamma < 0):
        raise ValueError("connectivity probabilities must be nonnegative")
    total = gamma.sum()
    if abs(total - 1.0) > 1e-6:
        raise ValueError(f"connectivity probabilities sum to {total:.6g}, not 1")
    return ConnectivityDist(hubs, gamma / total)


@dataclass(frozen=True)
class GridGeometry:
    r: float
    d: float
    resolution: int = 2001

    def __post_init__(self):
        if self.r <= 0 or self.d <= 0:
            raise ValueError("radius and spacing must be positive")
        if self.resolution < 100:
            raise ValueError("resolution must be at least 100")


def connectivity_from_grid(geom: GridGeometry) -> ConnectivityDist:
    """Hub-count distribution for a uniform user on an infinite square hub grid.

    Midpoint quadrature over the cell ``[0, d/2]^2``, which the grid's
    8-fold symmetry makes representative of the whole plane.
    """
    r, d, res = float(geom.r), float(geom.d), geom.resolution
    axis = (np.arange(res) + 0.5) * (d / 2 / res)
    reach = math.ceil((r + d * math.sqrt(2)) / d)
    counts = np.zeros((res, res), dtype=np.int16)
    r2 = r * r
    for a in range(-reach, reach + 1):
        dx2 = (axis - a * d) ** 2
        if dx2.min() > r2:
            continue
        for b in range(-reach, reach + 1):
            dy2 = (axis - b * d) ** 2
            if dy2.min() + dx2.min() > r2:
                continue
            counts += dx2[:, None] + dy2[None, :] <= r2
    freq = np.bincount(counts.ravel())
    hubs = np.nonzero(freq)[0]
    return ConnectivityDist(hubs, freq[hubs] / counts.size)
