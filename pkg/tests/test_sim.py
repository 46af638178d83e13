from __future__ import annotations

import math

import numpy as np
import pytest

from fountain_cache.lrfc import avg_overhead, p_fail
from fountain_cache.placement import optimize_bound
from fountain_cache.popularity import PopularityDist, zipf
from fountain_cache.rate import Placement, expected_backhaul_exact, z_dist
from fountain_cache.sim import Scenario, SimResult, simulate, simulate_request, trial_rng
from fountain_cache.topology import REFERENCE_GAMMA, ConnectivityDist, connectivity_explicit

ONE = PopularityDist(np.array([1.0]))


def within(res: SimResult, target: float, sigmas: float = 3.0) -> bool:
    return abs(res.mean_t - target) <= sigmas * res.std_err


def test_uncached_file_needs_backhaul():
    s = Scenario(PopularityDist(np.array([0.5, 0.5])), connectivity_explicit({1: 1.0}), Placement([1, 0], 1, 1), 2)
    for i in range(200):
        rng = trial_rng(0, i)
        j = s.pop.sample(trial_rng(0, i))
        t = simulate_request(s, rng)
        if j == 1:
            assert t >= 1


@pytest.mark.parametrize("q,k", [(2, 4), (16, 10), (4, 1)])
def test_degenerate_scenario_mean_is_overhead(q, k):
    s = Scenario(ONE, connectivity_explicit({1: 1.0}), Placement([k], k, 1), q)
    res = simulate(s, 20_000, seed=3, check=True)
    assert within(res, avg_overhead(k, q))


def test_zero_backhaul_frequency():
    k, q, n = 3, 2, 50_000
    s = Scenario(ONE, connectivity_explicit({2: 1.0}), Placement([k], k, 1), q)
    res = simulate(s, n, seed=11)
    p0 = 1 - p_fail(k, k, q)
    assert abs(res.frequency(0) - p0) <= 3 * math.sqrt(p0 * (1 - p0) / n)


def test_zero_backhaul_frequency_mixture():
    k, q, n = 4, 2, 40_000
    pop = zipf(3, 1.0)
    conn = connectivity_explicit({1: 0.3, 2: 0.7})
    x = Placement([4, 3, 1], k, 2)
    res = simulate(Scenario(pop, conn, x, q), n, seed=5)
    zd = z_dist(x, pop, conn)
    p0 = sum(pz * (1 - p_fail(k, z - k, q)) for z, pz in zd.as_dict().items() if z >= k)
    assert abs(res.frequency(0) - p0) <= 3 * math.sqrt(p0 * (1 - p0) / n)
    assert within(res, expected_backhaul_exact(x, pop, conn, k, q))


def test_same_seed_same_result():
    s = Scenario.optimized(zipf(20, 0.8), connectivity_explicit(REFERENCE_GAMMA), 5, 4, 3)
    a = simulate(s, 2000, seed=9)
    b = simulate(s, 2000, seed=9)
    assert a == b
    assert simulate(s, 2000, seed=10) != a


def test_split_invariance():
    s = Scenario.optimized(zipf(20, 0.8), connectivity_explicit(REFERENCE_GAMMA), 5, 16, 3)
    serial = simulate(s, 600, seed=2)
    assert simulate(s, 600, seed=2, workers=2) == serial


def test_single_trial():
    s = Scenario.optimized(zipf(5, 1.0), connectivity_explicit(REFERENCE_GAMMA), 3, 2, 1)
    res = simulate(s, 1, seed=0)
    assert res.trials == 1 and len(res.histogram) == 1 and res.std_err == 0.0
    with pytest.raises(ValueError):
        simulate(s, 0)


def test_result_invariants():
    s = Scenario.optimized(zipf(10, 0.8), connectivity_explicit(REFERENCE_GAMMA), 4, 2, 3)
    res = simulate(s, 3000, seed=1)
    assert sum(res.histogram.values()) == res.trials == 3000
    assert all(isinstance(t, int) and t >= 0 for t in res.histogram)
    assert res.mean_t >= 0
    assert list(res.histogram) == sorted(res.histogram)


def test_reference_scenario_agreement_small():
    pop, conn, k, q, M = zipf(100, 0.8), connectivity_explicit(REFERENCE_GAMMA), 10, 2, 10
    x = optimize_bound(pop, conn, k, M)
    res = simulate(Scenario(pop, conn, x, q), 20_000, seed=4)
    assert within(res, expected_backhaul_exact(x, pop, conn, k, q))


def test_uncovered_mass_is_dropped():
    conn = ConnectivityDist(np.array([0, 1]), np.array([0.4, 0.6]))
    s = Scenario(ONE, conn, Placement([2], 2, 1), 4)
    assert s.conn.as_dict() == {1: 1.0}


def test_scenario_validation():
    with pytest.raises(ValueError):
        Scenario(zipf(3, 1), connectivity_explicit({1: 1.0}), Placement([1, 1], 1, 2), 2)
    with pytest.raises(ValueError):
        Scenario(ONE, connectivity_explicit({1: 1.0}), Placement([1], 1, 1), 3)
