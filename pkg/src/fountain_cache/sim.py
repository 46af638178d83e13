"""Monte-Carlo delivery phase with real coded symbols.

Every trial draws a file and a hub count, builds a fresh source block, and
pushes i.i.d. coded symbols through the incremental decoder: the first
``z = x_j * h`` stand for the symbols cached in the user's hubs, the rest
come over the backhaul.  Trial ``i`` owns the Philox stream keyed by
``(seed, i)``, so results do not depend on how trials are split across
workers.
"""

from __future__ import annotations

import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .gf import Field, field_for_order
from .lrfc import DecoderState, SourceBlock, encode_packed
from .placement import optimize_bound
from .popularity import PopularityDist
from .rate import Placement
from .topology import ConnectivityDist

# extra columns drawn beyond the rank deficit on each refill
_SLACK = 4


@dataclass(frozen=True, eq=False)
class Scenario:
    pop: PopularityDist
    conn: ConnectivityDist
    x: Placement
    q: int

    def __post_init__(self):
        if self.x.n != self.pop.n:
            raise ValueError("placement and popularity disagree on the library size")
        field_for_order(self.q)
        object.__setattr__(self, "conn", self.conn.served())

    @property
    def n(self) -> int:
        return self.pop.n

    @property
    def k(self) -> int:
        return self.x.k

    @property
    def M(self) -> int:
        return self.x.M

    @property
    def field(self) -> Field:
        return field_for_order(self.q)

    @classmethod
    def optimized(cls, pop: PopularityDist, conn: ConnectivityDist, k: int, q: int, M: int) -> Scenario:
        return cls(pop, conn, optimize_bound(pop, conn, k, M, q), q)


@dataclass
class SimResult:
    trials: int
    mean_t: float
    std_err: float
    histogram: dict[int, int] = field(default_factory=dict)

    @classmethod
    def from_histogram(cls, histogram: dict[int, int]) -> SimResult:
        hist = dict(sorted(histogram.items()))
        n = sum(hist.values())
        if n == 0:
            raise ValueError("empty histogram")
        mean = math.fsum(t * c for t, c in hist.items()) / n
        if n > 1:
            var = math.fsum(c * (t - mean) ** 2 for t, c in hist.items()) / (n - 1)
            se = math.sqrt(var / n)
        else:
            se = 0.0
        return cls(n, mean, se, hist)

    def frequency(self, t: int) -> float:
        return self.histogram.get(t, 0) / self.trials


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=np.array([trial, seed], dtype=np.uint64)))


def simulate_request(s: Scenario, rng: np.random.Generator, check: bool = False) -> int:
    """Backhaul symbols needed to serve one random request."""
    j = s.pop.sample(rng)
    h = s.conn.sample(rng)
    z = int(s.x.x[j]) * h
    block = SourceBlock.random(s.field, s.k, rng)
    dec = DecoderState(s.field, s.k)
    # Once full rank is reached the remaining cached symbols cannot matter,
    # so they are never drawn.
    while not dec.full_rank:
        dec.add_packed_until_full(encode_packed(block, rng, s.k - dec.rank + _SLACK))
    if check and dec.solve() != block:
        raise AssertionError("decoder returned a block different from the one encoded")
    return max(0, dec.m_collected - z)


def _run_range(s: Scenario, seed: int, start: int, stop: int, check: bool) -> Counter:
    hist = Counter()
    for i in range(start, stop):
        hist[simulate_request(s, trial_rng(seed, i), check)] += 1
    return hist


def simulate(s: Scenario, trials: int, seed: int = 0, workers: int = 1, check: bool = False) -> SimResult:
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if workers <= 1:
        return SimResult.from_histogram(_run_range(s, seed, 0, trials, check))
    bounds = np.linspace(0, trials, workers + 1).astype(int)
    hist = Counter()
    with ProcessPoolExecutor(workers) as pool:
        futures = [
            pool.submit(_run_range, s, seed, int(a), int(b), check)
            for a, b in zip(bounds[:-1], bounds[1:])
            if b > a
        ]
        for fut in futures:
            hist.update(fut.result())
    return SimResult.from_histogram(hist)
