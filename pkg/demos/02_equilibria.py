"""
Finding every equilibrium
=========================

A profile is a Nash equilibrium when no player gains by moving towards
either pure strategy.  The KKT conditions of each player's problem state
this exactly, so the solver enumerates which players sit at 0, at 1 or in
the interior, solves the remaining system, and certifies each candidate.
"""

import numpy as np

from disclosure_games import GameSpec
from disclosure_games.equilibrium import (
    all_disclose_by_deviation,
    best_response_dynamics,
    brute_force_pure_equilibria,
    check_all_disclose,
    check_all_withhold,
    construct_threshold_equilibrium,
    solve_equilibria,
    verify_kkt,
)

###############################################################################
# Two symmetric players
# ---------------------
# Each player prefers to disclose alone but not alongside the other, so
# there are two asymmetric pure equilibria and one mixed one.

g = GameSpec(2.0, 0.71, [1.8, 1.8])
report = solve_equilibria(g)
for cert in report.certificates:
    print(cert.x, "valid:", bool(verify_kkt(g, cert)))
print("count:", len(report.certificates), "degenerate:", report.degenerate)

###############################################################################
# Threshold equilibria
# --------------------
# Sorting players by cost, some number of the cheapest disclose and the
# rest withhold.

g = GameSpec(4.0, 0.5, [1.0, 1.9, 3.0])
print("threshold:", construct_threshold_equilibrium(g).x)
print("pure equilibria:", [o.delta for o in brute_force_pure_equilibria(g)])

###############################################################################
# Corner checks
# -------------
# ``A <= min beta`` decides whether nobody discloses.  For everybody
# disclosing, the simple test ``A >= max beta`` is only exact when
# ``gamma == 1``; the deviation test compares the last discloser's gain.

g = GameSpec(3.0, 0.6, [1.0, 2.5])
print("all withhold:", check_all_withhold(g))
print("all disclose (A >= max beta):", check_all_disclose(g))
print("all disclose (no profitable deviation):", all_disclose_by_deviation(g))

###############################################################################
# Best-response dynamics
# ----------------------
# Simultaneous best responses do not always settle, but when they do the
# result is an equilibrium.

rng = np.random.default_rng(0)
g = GameSpec(5.0, 0.8, [2.0, 3.0, 4.5, 6.0])
x, converged = best_response_dynamics(g, rng.uniform(0, 1, g.n))
print("dynamics:", x.x, "converged:", converged)
