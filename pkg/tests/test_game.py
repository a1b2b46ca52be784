import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from disclosure_games.game import (
    DisclosureOutcome,
    EnumerationCapError,
    GameSpec,
    StrategyProfile,
    contraction_coefficients,
    count_distribution,
    expected_utility,
    marginal_utilities,
    marginal_utility,
    outcomes,
    pure_payoff,
)
from oracles import enum_expected_utility, finite_difference_marginal, monte_carlo_utility


class TestTypes:
    def test_gamespec_validation(self):
        with pytest.raises(ValueError):
            GameSpec(0.0, 1.0, [1.0])
        with pytest.raises(ValueError):
            GameSpec(1.0, 0.0, [1.0])
        with pytest.raises(ValueError):
            GameSpec(1.0, 1.0, [-0.1])
        with pytest.raises(ValueError):
            GameSpec(1.0, 1.0, [])
        assert GameSpec(1, 1, [1, 2]).n == 2

    def test_sorted_view(self):
        g = GameSpec(1.0, 0.5, [3.0, 1.0, 2.0])
        sg, perm = g.sorted()
        assert sg.beta == (1.0, 2.0, 3.0)
        assert perm.tolist() == [1, 2, 0]
        np.testing.assert_array_equal(g.beta_array[perm], sg.beta_array)

    def test_json_round_trip(self):
        g = GameSpec(2.5, 0.71, [1.0, 2.0])
        doc = json.loads(g.to_json())
        assert doc == {"A": 2.5, "gamma": 0.71, "beta": [1.0, 2.0]}
        assert GameSpec.from_json(g.to_json()) == g
        with pytest.raises(ValueError):
            GameSpec.from_dict({"A": 1.0, "beta": [1.0]})

    def test_profile(self):
        assert StrategyProfile([0, 1, 1]).is_pure()
        assert not StrategyProfile([0, 0.5]).is_pure()
        with pytest.raises(ValueError):
            StrategyProfile([1.2])
        with pytest.raises(ValueError):
            DisclosureOutcome([0, 2])
        assert StrategyProfile([1, 0]).to_outcome().delta == (1, 0)

    def test_outcome_order_counts_from_player_zero(self):
        assert list(outcomes(2)) == [(0, 0), (1, 0), (0, 1), (1, 1)]
        assert len(list(outcomes(5))) == 32


class TestPurePayoff:
    def test_linear_case(self):
        assert pure_payoff(GameSpec(1, 1, [0.5, 0.5]), (1, 1), 0) == 1.5

    def test_all_withhold(self):
        assert pure_payoff(GameSpec(2, 0.5, [1, 1, 1]), (0, 0, 0), 0) == 0.0

    def test_concave_case(self):
        assert pure_payoff(GameSpec(2, 0.5, [1, 1]), (1, 1), 0) == pytest.approx(1.8284271247461903, abs=1e-12)

    def test_index_out_of_range(self):
        with pytest.raises(IndexError):
            pure_payoff(GameSpec(1, 1, [1]), (1,), 1)


class TestExpectedUtility:
    def test_single_player(self):
        assert expected_utility(GameSpec(3, 0.7, [1]), [0.5], 0) == pytest.approx(1.0)

    def test_linear_reward(self):
        assert expected_utility(GameSpec(1, 1, [0, 0]), [0.5, 0.5], 0) == pytest.approx(1.0)

    def test_three_player_monte_carlo(self):
        g = GameSpec(2, 0.71, [1, 2, 3])
        x = [0.4, 0.5, 0.6]
        u = expected_utility(g, x, 1)
        assert u == pytest.approx(1.5267721820832456, abs=1e-12)
        mean, se = monte_carlo_utility(2, 0.71, [1, 2, 3], x, 1, 10**6, np.random.default_rng(3))
        assert abs(u - mean) < 3 * se

    def test_matches_explicit_enumeration(self, rng):
        for _ in range(50):
            n = int(rng.integers(1, 8))
            g = GameSpec(rng.uniform(0.1, 10), rng.uniform(0.2, 1.5), rng.uniform(0, 10, n))
            x = rng.uniform(0, 1, n)
            x[rng.random(n) < 0.3] = rng.integers(0, 2)
            j = int(rng.integers(n))
            assert expected_utility(g, x, j) == pytest.approx(
                enum_expected_utility(g.A, g.gamma, g.beta, x, j), abs=1e-11
            )

    def test_enumeration_cap(self):
        g = GameSpec(1, 0.5, np.ones(30))
        with pytest.raises(EnumerationCapError):
            expected_utility(g, np.full(30, 0.5), 0)
        assert np.isfinite(expected_utility(g, np.full(30, 0.5), 0, cap=30))

    def test_pure_profiles_equal_pure_payoff_exactly(self, rng):
        for _ in range(100):
            n = int(rng.integers(1, 9))
            g = GameSpec(rng.uniform(0.1, 10), rng.uniform(0.2, 1.5), rng.uniform(0, 10, n))
            delta = rng.integers(0, 2, n)
            j = int(rng.integers(n))
            assert expected_utility(g, delta.astype(float), j) == pure_payoff(g, delta, j)


class TestContraction:
    def test_opponent_withholds(self):
        c1, c0 = contraction_coefficients(GameSpec(1, 1, [0.5, 7.0]), [0.0], 0)
        assert (c1, c0) == (pytest.approx(0.5), pytest.approx(0.0))

    def test_opponent_discloses(self):
        c1, c0 = contraction_coefficients(GameSpec(1, 1, [0.5, 7.0]), [1.0], 0)
        assert (c1, c0) == (pytest.approx(1.5), pytest.approx(1.0))

    def test_gap_matches_finite_difference(self):
        g = GameSpec(2, 0.71, [1, 1, 1, 1])
        others = [0.3, 0.5, 0.7]
        c1, c0 = contraction_coefficients(g, others, 0)
        fd = finite_difference_marginal(2, 0.71, g.beta, [0.4] + others, 0)
        assert abs((c1 - c0) - fd) < 1e-6

    def test_wrong_length(self):
        with pytest.raises(ValueError):
            contraction_coefficients(GameSpec(1, 1, [1, 1]), [0.5, 0.5], 0)


class TestMarginal:
    def test_single_player(self):
        g = GameSpec(3, 0.4, [1])
        for t in (0.0, 0.3, 1.0):
            assert marginal_utility(g, [t], 0) == pytest.approx(2.0)

    def test_constant_in_own_strategy(self):
        g = GameSpec(1, 1, [0.5, 0.5])
        for t in np.linspace(0, 1, 7):
            assert marginal_utility(g, [t, 0.5], 0) == pytest.approx(0.5)

    def test_random_five_player_finite_difference(self, rng):
        A, gamma = rng.uniform(0.5, 5), rng.uniform(0.3, 1.4)
        beta = rng.uniform(0, 5, 5)
        x = rng.uniform(0.05, 0.95, 5)
        g = GameSpec(A, gamma, beta)
        for j in range(5):
            fd = finite_difference_marginal(A, gamma, beta, x, j)
            assert abs(marginal_utility(g, x, j) - fd) < 1e-6

    def test_vector_form_agrees(self, rng):
        g = GameSpec(3.0, 0.6, rng.uniform(0, 5, 6))
        x = rng.uniform(0, 1, 6)
        np.testing.assert_allclose(
            marginal_utilities(g, x), [marginal_utility(g, x, j) for j in range(6)], atol=1e-12
        )


def test_count_distribution_sums_to_one(rng):
    p = rng.uniform(0, 1, 12)
    pmf = count_distribution(p)
    assert pmf.sum() == pytest.approx(1.0)
    assert pmf @ np.arange(13) == pytest.approx(p.sum())


game_params = st.tuples(
    st.floats(0.1, 10.0),
    st.floats(0.2, 1.5),
    st.lists(st.floats(0.0, 10.0), min_size=1, max_size=7),
)


@settings(max_examples=150, deadline=None)
@given(game_params, st.data())
def test_decomposition_identity(params, data):
    A, gamma, beta = params
    g = GameSpec(A, gamma, beta)
    x = data.draw(st.lists(st.floats(0.0, 1.0), min_size=g.n, max_size=g.n))
    for j in range(g.n):
        c1, c0 = contraction_coefficients(g, np.delete(x, j), j)
        assert abs(expected_utility(g, x, j) - ((c1 - c0) * x[j] + c0)) < 1e-10


@settings(max_examples=100, deadline=None)
@given(game_params, st.data(), st.floats(1.01, 3.0))
def test_monotone_in_A(params, data, factor):
    A, gamma, beta = params
    g = GameSpec(A, gamma, beta)
    x = data.draw(st.lists(st.floats(0.0, 1.0), min_size=g.n, max_size=g.n))
    if max(x) < 1e-3:
        return
    bigger = GameSpec(A * factor, gamma, beta)
    for j in range(g.n):
        assert expected_utility(bigger, x, j) > expected_utility(g, x, j)


@settings(max_examples=100, deadline=None)
@given(game_params, st.data())
def test_permutation_equivariance(params, data):
    A, gamma, beta = params
    g = GameSpec(A, gamma, beta)
    x = np.array(data.draw(st.lists(st.floats(0.0, 1.0), min_size=g.n, max_size=g.n)))
    perm = np.array(data.draw(st.permutations(range(g.n))))
    gp = GameSpec(A, gamma, g.beta_array[perm])
    for i in range(g.n):
        assert expected_utility(gp, x[perm], i) == pytest.approx(expected_utility(g, x, perm[i]), abs=1e-10)


def test_monte_carlo_agreement_random_instances():
    rng = np.random.default_rng(99)
    passed = 0
    for _ in range(10):
        n = int(rng.integers(1, 11))
        g = GameSpec(rng.uniform(0.1, 10), rng.uniform(0.2, 1.5), rng.uniform(0, 10, n))
        x = rng.uniform(0, 1, n)
        j = int(rng.integers(n))
        mean, se = monte_carlo_utility(g.A, g.gamma, g.beta, x, j, 10**6, rng)
        passed += abs(expected_utility(g, x, j) - mean) < 4 * se
    assert passed >= 9


def test_marginal_jacobian_matches_finite_difference(rng):
    from disclosure_games.game import marginal_jacobian

    for _ in range(20):
        n = int(rng.integers(2, 7))
        g = GameSpec(rng.uniform(0.5, 5), rng.uniform(0.3, 1.4), rng.uniform(0, 5, n))
        x = rng.uniform(0.05, 0.95, n)
        J = marginal_jacobian(g, x, range(n))
        h = 1e-6
        for k in range(n):
            up, dn = x.copy(), x.copy()
            up[k] += h
            dn[k] -= h
            col = (marginal_utilities(g, up) - marginal_utilities(g, dn)) / (2 * h)
            col[k] = 0.0
            np.testing.assert_allclose(J[:, k], col, atol=1e-6)
