"""
Recovering disclosure costs
===========================

A user's strategy is estimated by the share of their comments that
disclose.  For a user who mixes, indifference pins their cost to the
expected reward gain from disclosing, which depends only on the other users
of the article.  We estimate costs on simulated data and check them against
the values implied by the true strategies.
"""

import math
from collections import defaultdict

import numpy as np

from disclosure_games import GameSpec
from disclosure_games.dataset import simulate_dataset
from disclosure_games.estimation import (
    beta_contribution,
    correlate_x_beta,
    estimate_betas,
    estimate_strategies,
    fit_beta_constrained_lsq,
)

A, gamma = math.exp(2.2), 0.71
sim = simulate_dataset(GameSpec(A, gamma, [1.0]), 1000, noise_sigma=0.5, seed=3, n_users=200)

###############################################################################
# Strategies and costs
# --------------------
# Only users active in at least 15 articles get an estimate; costs use
# articles with at least three such users and average over them.

strategies = estimate_strategies(sim.records, min_posts=15)
result = estimate_betas(sim.records, strategies, A, gamma)
print(f"{len(strategies)} strategies, {len(result.estimates)} costs, mean strategy {result.x_bar:.3f}")

###############################################################################
# Comparison with the truth
# -------------------------
# The same articles evaluated with the true co-user probabilities.

xhat = {s.user_id: s.x_hat for s in strategies}
members = defaultdict(set)
for rec in sim.records:
    members[rec.article_id].add(rec.user_id)
truth = defaultdict(list)
for users in members.values():
    if sum(u in xhat for u in users) < 3:
        continue
    for u in users:
        if u in xhat:
            truth[u].append(beta_contribution(A, gamma, [sim.x_true[v] for v in users if v != u]))
errors = [abs(b.beta_hat - np.mean(truth[b.user_id])) / np.mean(truth[b.user_id]) for b in result.estimates]
print(f"median relative error {np.median(errors):.3f}")

fit = correlate_x_beta([(xhat[b.user_id], b.beta_hat) for b in result.estimates])
print(f"x_hat = {fit.intercept:.3f} + {fit.slope:.3f} beta_hat (p = {fit.p_values[1]:.3f})")

###############################################################################
# Costs consistent with an equilibrium
# ------------------------------------
# Given observed strategies of a few users, find the nearest profile that
# is an equilibrium for some costs inside a window.

y = np.array([0.2, 0.35, 0.7, 0.2])
res = fit_beta_constrained_lsq(y, 2.0, gamma, beta_bounds=(1.0, 1.4))
print("fitted x:", np.round(res.x, 4), "pattern:", res.pattern)
print("costs:", np.round(res.beta, 4), "objective:", round(res.objective, 6), "certified:", res.success)
