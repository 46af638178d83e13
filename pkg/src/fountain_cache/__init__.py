"""Fountain-coded caching for satellite backhaul offloading.

Hubs prefill their caches with output symbols of a linear random fountain
code; a user collects whatever its hubs hold and the satellite sends the
rest.  The package computes the expected backhaul load, optimizes the
placement and checks both against a symbol-level simulation.
"""

from __future__ import annotations

from .gf import Field, field_for_order, field_new
from .lrfc import (
    CodedSymbol,
    DecoderState,
    DecodingError,
    SourceBlock,
    avg_overhead,
    avg_overhead_bound,
    decoder_add,
    decoder_solve,
    encode,
    p_fail,
)
from .placement import InfeasiblePlacement, brute_force_optimum, optimize_bound, optimize_mds
from .popularity import PopularityDist, zipf
from .rate import (
    Placement,
    expected_backhaul_bound,
    expected_backhaul_exact,
    expected_backhaul_mds,
    z_dist,
)
from .sim import Scenario, SimResult, simulate, simulate_request
from .topology import REFERENCE_GAMMA, ConnectivityDist, GridGeometry, connectivity_explicit, connectivity_from_grid

__all__ = [
    "CodedSymbol", "ConnectivityDist", "DecoderState", "DecodingError", "Field", "GridGeometry",
    "InfeasiblePlacement", "REFERENCE_GAMMA", "Placement", "PopularityDist", "Scenario", "SimResult",
    "SourceBlock", "avg_overhead", "avg_overhead_bound", "brute_force_optimum", "connectivity_explicit",
    "connectivity_from_grid", "decoder_add", "decoder_solve", "encode", "expected_backhaul_bound",
    "expected_backhaul_exact", "expected_backhaul_mds", "field_for_order", "field_new", "optimize_bound",
    "optimize_mds", "p_fail", "simulate", "simulate_request", "z_dist", "zipf",
]
