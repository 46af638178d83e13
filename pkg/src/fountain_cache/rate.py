"""Expected backhaul load per request under a given cache placement.

A user asking for file ``j`` while connected to ``h`` hubs finds
``z = x[j] * h`` distinct cached output symbols locally; the satellite sends
whatever else the decoder needs.  ``Z`` has finite support, so the expected
backhaul count has a closed form in terms of the fountain code's failure
probabilities, and an upper bound that swaps the mean overhead for its
geometric bound.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lrfc import (
    DEFAULT_TAIL_TOL,
    avg_overhead,
    avg_overhead_bound,
    p_fail,
    p_fail_partial_sum,
)
from .popularity import PopularityDist
from .topology import ConnectivityDist


@dataclass(frozen=True, eq=False)
class Placement:
    """``x[j]`` coded symbols of file ``j`` cached in every hub."""

    x: np.ndarray
    k: int
    M: int

    def __post_init__(self):
        x = np.asarray(self.x, dtype=np.int64)
        if x.ndim != 1 or np.any(x < 0):
            raise ValueError("placement must be a vector of nonnegative counts")
        if x.sum() != self.M * self.k:
            raise ValueError(f"placement stores {x.sum()} symbols, cache holds {self.M * self.k}")
        x.setflags(write=False)
        object.__setattr__(self, "x", x)

    @property
    def n(self) -> int:
        return self.x.size

    def __eq__(self, other):
        return (
            isinstance(other, Placement)
            and (self.k, self.M) == (other.k, other.M)
            and np.array_equal(self.x, other.x)
        )

    __hash__ = None


def _counts(x) -> np.ndarray:
    return x.x if isinstance(x, Placement) else np.asarray(x, dtype=np.int64)


def _pairs(x, pop: PopularityDist, conn: ConnectivityDist):
    """Flattened ``(z, weight)`` over all (file, hub-count) pairs."""
    xs = _counts(x)
    if xs.size != pop.n:
        raise ValueError(f"placement covers {xs.size} files, library has {pop.n}")
    conn = conn.served()
    z = np.outer(xs, conn.hubs).ravel()
    w = np.outer(pop.p, conn.gamma).ravel()
    return z, w


@dataclass(frozen=True, eq=False)
class ZDist:
    support: np.ndarray
    prob: np.ndarray

    def as_dict(self) -> dict[int, float]:
        return {int(z): float(p) for z, p in zip(self.support, self.prob)}


def z_dist(x, pop: PopularityDist, conn: ConnectivityDist) -> ZDist:
    """Law of the number of cached symbols a requesting user can reach."""
    z, w = _pairs(x, pop, conn)
    support, inverse = np.unique(z, return_inverse=True)
    prob = np.bincount(inverse, weights=w, minlength=support.size)
    keep = prob > 0
    return ZDist(support[keep], prob[keep])


def t_given_z(t: int, z: int, k: int, q: int) -> float:
    """Probability that exactly ``t`` backhaul symbols complete decoding given ``z`` cached ones."""
    if t < 0 or z < 0:
        return 0.0
    if z > k and t == 0:
        return 1.0 - p_fail(k, z - k, q)
    return p_fail(k, z - k + t - 1, q) - p_fail(k, z - k + t, q)


def expected_backhaul_exact(
    x, pop: PopularityDist, conn: ConnectivityDist, k: int, q: int, tail_tol: float = DEFAULT_TAIL_TOL
) -> float:
    zd = z_dist(x, pop, conn)
    e_delta = avg_overhead(k, q, tail_tol)
    total = e_delta
    for z, pz in zip(zd.support.tolist(), zd.prob.tolist()):
        if z <= k:
            total += (k - z) * pz
        else:
            total -= pz * p_fail_partial_sum(k, q, z - k, tail_tol)
    return total


def _shortfall(x, pop: PopularityDist, conn: ConnectivityDist, k: int) -> float:
    """``E[(k - Z)^+]``, summed directly over (file, hub-count) pairs."""
    z, w = _pairs(x, pop, conn)
    return float(np.dot(w, np.maximum(0, k - z)))


def expected_backhaul_bound(x, pop: PopularityDist, conn: ConnectivityDist, k: int, q: int) -> float:
    return avg_overhead_bound(q) + _shortfall(x, pop, conn, k)


def expected_backhaul_mds(x, pop: PopularityDist, conn: ConnectivityDist, k: int) -> float:
    """Backhaul load when any ``k`` distinct symbols decode (MDS baseline)."""
    xs = _counts(x)
    if np.any(xs > k):
        raise ValueError("an MDS placement never caches more than k symbols of a file")
    return _shortfall(xs, pop, conn, k)


@dataclass(frozen=True)
class RateReport:
    k: int
    q: int
    e_delta: float
    e_t_exact: float
    e_t_bound: float
    e_t_mds: float

    @property
    def t_hat_exact(self) -> float:
        return self.e_t_exact / self.k

    @property
    def t_hat_bound(self) -> float:
        return self.e_t_bound / self.k

    @property
    def t_hat_mds(self) -> float:
        return self.e_t_mds / self.k


def report(
    x, pop: PopularityDist, conn: ConnectivityDist, k: int, q: int, tail_tol: float = DEFAULT_TAIL_TOL
) -> RateReport:
    return RateReport(
        k=k,
        q=q,
        e_delta=avg_overhead(k, q, tail_tol),
        e_t_exact=expected_backhaul_exact(x, pop, conn, k, q, tail_tol),
        e_t_bound=expected_backhaul_bound(x, pop, conn, k, q),
        e_t_mds=expected_backhaul_mds(x, pop, conn, k),
    )
