"""
Payoffs in a disclosure game
============================

Every participant of an article receives the common reward ``A S**gamma``,
where ``S`` counts the users who disclose, and a discloser pays a private
cost ``beta_j``.  This script evaluates payoffs for pure and mixed profiles
and shows how a player's expected utility is linear in their own strategy.
"""

import numpy as np

from disclosure_games import GameSpec, StrategyProfile
from disclosure_games.game import (
    contraction_coefficients,
    expected_utility,
    marginal_utilities,
    pure_payoff,
)

g = GameSpec(A=2.0, gamma=0.71, beta=[1.0, 2.0, 3.0])
print(g)

###############################################################################
# Pure outcomes
# -------------
# With everyone disclosing, player 0 gets ``2 * 3**0.71 - 1``.

print("all disclose:", pure_payoff(g, (1, 1, 1), 0))
print("only player 0:", pure_payoff(g, (1, 0, 0), 0))

###############################################################################
# Mixed profiles
# --------------
# ``x_j`` is the probability that player j discloses.  The expectation runs
# over all outcomes, grouped by how many users disclose.

x = StrategyProfile([0.4, 0.5, 0.6])
for j in range(g.n):
    print(f"u_{j} = {expected_utility(g, x.x, j):.6f}")

###############################################################################
# Linearity in the own strategy
# -----------------------------
# ``C1`` and ``C0`` are the payoffs of disclosing and withholding against the
# others' mixture; ``u_j = (C1 - C0) x_j + C0``.

c1, c0 = contraction_coefficients(g, np.delete(x.x, 1), 1)
for t in (0.0, 0.5, 1.0):
    prof = x.x.copy()
    prof[1] = t
    print(f"x_1 = {t}: u_1 = {expected_utility(g, prof, 1):.6f}, line = {(c1 - c0) * t + c0:.6f}")

# The gap C1 - C0 is what decides a best response.
print("marginals:", marginal_utilities(g, x.x))
