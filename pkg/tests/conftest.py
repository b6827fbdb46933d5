"""Shared fixtures.

The per-weight echelon sweeps dominate the suite's runtime (the h1/16
module needs every weight up to 25), so they are computed once per
session, timed, and reused by both the acceptance criteria and the unit
tests.  The module-level echelon cache then serves all later lookups.
"""

import time

import pytest

from ising_pbw.reduction import module_spec, pivots_up_to

SWEEP_BOUNDS = {"h0": 15, "h1/2": 15, "h1/16": 25}


@pytest.fixture(scope="session")
def sweeps():
    """label -> (EchelonResult per weight, wall seconds for the sweep)."""
    out = {}
    for label, N in SWEEP_BOUNDS.items():
        spec = module_spec(label)
        t0 = time.perf_counter()
        results = pivots_up_to(spec, N)
        out[label] = (results, time.perf_counter() - t0)
    return out
