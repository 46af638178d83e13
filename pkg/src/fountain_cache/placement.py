"""Integer cache placement.

The bound objective ``sum_j p_j * sum_h gamma_h * max(0, k - x_j h)`` is
separable and each per-file term is convex and piecewise linear in ``x_j``,
so handing out the ``M k`` symbol slots one at a time to the file with the
largest decrease is globally optimal.  Gains are compared as exact
rationals: ties between files are common (uniform popularity, saturated
files) and must resolve the same way every time.
"""

from __future__ import annotations

import heapq
import itertools
from collections.abc import Callable
from fractions import Fraction

import numpy as np

from .lrfc import DEFAULT_TAIL_TOL
from .popularity import PopularityDist
from .rate import Placement, expected_backhaul_exact
from .topology import ConnectivityDist

BRUTE_FORCE_MAX_UNITS = 12


class InfeasiblePlacement(ValueError):
    pass


def _check_budget(n: int, k: int, M: int):
    if k < 1:
        raise ValueError("k must be positive")
    if M < 0 or M > n:
        raise InfeasiblePlacement(f"cache of {M} files cannot be filled from a library of {n} (at most k symbols per file)")


def _shortfall_table(conn: ConnectivityDist, k: int) -> list[Fraction]:
    """``c[x] = sum_h gamma_h * max(0, k - x h)`` for ``x = 0..k``, exactly."""
    conn = conn.served()
    pairs = [(int(h), Fraction(float(g))) for h, g in zip(conn.hubs, conn.gamma)]
    return [sum((g * max(0, k - x * h) for h, g in pairs), Fraction(0)) for x in range(k + 1)]


def bound_residual(x, pop: PopularityDist, conn: ConnectivityDist, k: int) -> Fraction:
    """Exact ``E[(k - Z)^+]`` for a placement: the bound objective without its constant."""
    xs = x.x if isinstance(x, Placement) else np.asarray(x)
    c = _shortfall_table(conn, k)
    # c[k] == 0: no hub count h >= 1 leaves a shortfall once x_j >= k
    return sum((Fraction(float(p)) * c[min(int(v), k)] for p, v in zip(pop.p, xs)), Fraction(0))


def _greedy(pop: PopularityDist, conn: ConnectivityDist, k: int, M: int) -> Placement:
    n = pop.n
    _check_budget(n, k, M)
    c = _shortfall_table(conn, k)
    step = [c[i] - c[i + 1] for i in range(k)]
    p = [Fraction(float(v)) for v in pop.p]
    x = [0] * n
    heap = [(-p[j] * step[0], j) for j in range(n)]
    heapq.heapify(heap)
    for _ in range(M * k):
        _, j = heapq.heappop(heap)
        x[j] += 1
        if x[j] < k:
            heapq.heappush(heap, (-p[j] * step[x[j]], j))
    return Placement(np.array(x, dtype=np.int64), k, M)


def optimize_bound(pop: PopularityDist, conn: ConnectivityDist, k: int, M: int, q: int | None = None) -> Placement:
    """Minimize the upper bound on the expected backhaul load.

    ``q`` only shifts the objective by a constant and does not affect the
    result; it is accepted for symmetry with the rate functions.
    """
    return _greedy(pop, conn, k, M)


def optimize_mds(pop: PopularityDist, conn: ConnectivityDist, k: int, M: int) -> Placement:
    return _greedy(pop, conn, k, M)


def brute_force_optimum(
    pop: PopularityDist,
    conn: ConnectivityDist,
    k: int,
    M: int,
    objective: Callable[[np.ndarray], object] | None = None,
) -> Placement:
    """Exhaustive search over ``0 <= x_j <= k`` with ``sum(x) = M k``.

    ``objective`` maps a count vector to any orderable value and defaults to
    :func:`bound_residual`.  The lexicographically smallest minimizer wins.
    """
    n = pop.n
    _check_budget(n, k, M)
    if n * k > BRUTE_FORCE_MAX_UNITS:
        raise ValueError(f"search space too large: n*k = {n * k} > {BRUTE_FORCE_MAX_UNITS}")
    if objective is None:
        def objective(xs):
            return bound_residual(xs, pop, conn, k)
    best, best_val = None, None
    for cand in itertools.product(range(k + 1), repeat=n):
        if sum(cand) != M * k:
            continue
        xs = np.array(cand, dtype=np.int64)
        val = objective(xs)
        if best is None or val < best_val:
            best, best_val = xs, val
    return Placement(best, k, M)


def refine_exact(
    x: Placement,
    pop: PopularityDist,
    conn: ConnectivityDist,
    q: int,
    tail_tol: float = DEFAULT_TAIL_TOL,
    max_rounds: int = 10_000,
) -> Placement:
    """Single-unit moves that lower the exact expected load, until none does.

    Moves keep ``x_j <= k``.  Each round applies the best improving move.
    """
    k = x.k
    xs = x.x.copy()

    def value(v):
        return expected_backhaul_exact(v, pop, conn, k, q, tail_tol)

    current = value(xs)
    for _ in range(max_rounds):
        best_move, best_val = None, current
        donors = np.nonzero(xs > 0)[0]
        takers = np.nonzero(xs < k)[0]
        for i in donors:
            for j in takers:
                if i == j:
                    continue
                xs[i] -= 1
                xs[j] += 1
                val = value(xs)
                xs[i] += 1
                xs[j] -= 1
                if val < best_val - 1e-15:
                    best_move, best_val = (i, j), val
        if best_move is None:
            break
        i, j = best_move
        xs[i] -= 1
        xs[j] += 1
        current = best_val
    return Placement(xs, k, x.M)
