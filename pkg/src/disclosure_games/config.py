"""Numerical tolerances and enumeration caps shared across the package."""

from __future__ import annotations

import os
from dataclasses import dataclass

THREADS_ENV = "DISCLOSURE_GAMES_THREADS"


@dataclass(frozen=True)
class Tolerances:
    """Central place for every tolerance and cap used by the solvers.

    Attributes
    ----------
    kkt : float
        Absolute tolerance for stationarity, slackness and feasibility checks.
    degeneracy : float
        A boundary player whose marginal utility is smaller than this in
        absolute value makes the game degenerate.
    fixed_point : float
        Residual target for the interior stationarity solve.
    deviation : float
        Largest unilateral gain still treated as "no benefit" by the
        brute-force pure equilibrium oracle.
    enum_cap : int
        Largest player count for which outcome enumeration is allowed.
    support_cap : int
        Largest player count for the 3**n support-pattern search.
    max_iters : int
        Iteration budget for the interior solve.
    damping : float
        Backtracking factor applied to rejected Newton steps.
    n_starts : int
        Starting points per support pattern with three or more interior players.
    """

    kkt: float = 1e-8
    degeneracy: float = 1e-9
    fixed_point: float = 1e-10
    deviation: float = 1e-12
    enum_cap: int = 25
    support_cap: int = 12
    max_iters: int = 500
    damping: float = 0.5
    n_starts: int = 8


DEFAULTS = Tolerances()


def worker_count() -> int:
    """Worker bound from ``DISCLOSURE_GAMES_THREADS`` (default 1)."""
    raw = os.environ.get(THREADS_ENV, "").strip()
    if not raw:
        return 1
    try:
        value = int(raw)
    except ValueError:
        return 1
    return max(1, value)
