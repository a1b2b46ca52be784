import math

import numpy as np
import pytest

from disclosure_games.equilibrium import KktCertificate, verify_kkt
from disclosure_games.estimation import fit_beta_constrained_lsq
from disclosure_games.game import GameSpec, marginal_utilities
from oracles import grid_clsq

A = math.exp(2.2)
GAMMA = 0.71


def test_interior_target_is_fitted_exactly(rng):
    for _ in range(30):
        n = int(rng.integers(1, 7))
        y = rng.uniform(0.05, 0.95, n)
        res = fit_beta_constrained_lsq(y, A, GAMMA)
        assert res.success and res.objective < 1e-8
        np.testing.assert_allclose(res.x, y)
        assert not res.lam.any() and not res.mu.any()
        np.testing.assert_allclose(res.beta, marginal_utilities(GameSpec(A, GAMMA, np.zeros(n)), y))
        assert verify_kkt(GameSpec(A, GAMMA, res.beta), KktCertificate(res.x, res.lam, res.mu))


def test_zero_target():
    res = fit_beta_constrained_lsq(np.zeros(3), 2.0, 0.8)
    assert res.objective == 0.0
    assert res.x.tolist() == [0, 0, 0]
    assert not res.mu.any()
    # every withholder's cost is at least the reward of disclosing alone
    assert (res.beta >= 2.0 - 1e-12).all()
    assert res.pattern == ("zero", "zero", "zero")


def test_outside_box_is_clipped():
    res = fit_beta_constrained_lsq([-0.2, 1.3, 0.5], A, GAMMA)
    np.testing.assert_allclose(res.x, [0.0, 1.0, 0.5])
    assert res.objective == pytest.approx(0.04 + 0.09)
    assert res.success


def test_cap():
    with pytest.raises(ValueError):
        fit_beta_constrained_lsq(np.full(11, 0.5), A, GAMMA)


def test_bad_bounds():
    with pytest.raises(ValueError):
        fit_beta_constrained_lsq([0.5], A, GAMMA, beta_bounds=(2.0, 1.0))


def test_bounded_costs_certified(rng):
    for _ in range(10):
        y = rng.uniform(0, 1, 3)
        lo = rng.uniform(0.9, 1.6)
        res = fit_beta_constrained_lsq(y, 2.0, 0.71, beta_bounds=(lo, lo + 0.2))
        assert res.success
        assert (res.beta >= lo - 1e-12).all() and (res.beta <= lo + 0.2 + 1e-12).all()


def test_single_player_with_bounds():
    # the increment is A whatever x is, so a cost window above A forces x = 0
    res = fit_beta_constrained_lsq([0.6], 2.0, 0.5, beta_bounds=(3.0, 4.0))
    assert res.x.tolist() == [0.0]
    assert res.objective == pytest.approx(0.36)


def test_no_worse_than_grid_oracle():
    rng = np.random.default_rng(1)
    for _ in range(5):
        y = rng.uniform(0, 1, 4)
        lo = rng.uniform(0.9, 1.6)
        hi = lo + rng.uniform(0.05, 0.4)
        res = fit_beta_constrained_lsq(y, 2.0, 0.71, beta_bounds=(lo, hi))
        assert res.objective <= grid_clsq(2.0, 0.71, y, 0.05, lo, hi) + 1e-4


def test_serializes():
    doc = fit_beta_constrained_lsq([0.3, 0.6], A, GAMMA).to_dict()
    assert doc["kkt_valid"] is True
    assert doc["pattern"] == ["interior", "interior"]
