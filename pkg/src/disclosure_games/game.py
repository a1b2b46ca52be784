"""The n-player disclosure game: parameters, profiles and payoffs.

Every user in a thread receives the common reward ``A * S**gamma`` where
``S`` is the number of users who disclose, and a discloser additionally
pays the private cost ``beta_j``.  Mixed strategies are disclosure
probabilities ``x_j``; payoffs are multilinear in ``x``.

Expectations over the ``2**n`` outcomes are evaluated by grouping the
outcomes by their disclosure count ``S``.  The grouped sum has the same
terms as the explicit enumeration, but costs ``O(n**2)`` instead of
``O(2**n)``; the enumeration cap is still enforced so that callers relying
on the exponential contract fail loudly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .config import DEFAULTS


class EnumerationCapError(ValueError):
    """Raised when a game is too large for outcome enumeration."""


@dataclass(frozen=True)
class GameSpec:
    """Parameters ``(A, gamma, beta_1..beta_n)`` of the disclosure game."""

    A: float
    gamma: float
    beta: tuple[float, ...]

    def __post_init__(self):
        beta = tuple(float(b) for b in np.atleast_1d(np.asarray(self.beta, dtype=float)))
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "A", float(self.A))
        object.__setattr__(self, "gamma", float(self.gamma))
        if len(beta) < 1:
            raise ValueError("a game needs at least one player")
        if not (np.isfinite(self.A) and self.A > 0):
            raise ValueError(f"A must be positive, got {self.A}")
        if not (np.isfinite(self.gamma) and self.gamma > 0):
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if any(not np.isfinite(b) or b < 0 for b in beta):
            raise ValueError("disclosure costs must be finite and non-negative")

    @property
    def n(self) -> int:
        return len(self.beta)

    @property
    def beta_array(self) -> np.ndarray:
        return np.asarray(self.beta, dtype=float)

    def sorted(self) -> tuple["GameSpec", np.ndarray]:
        """Return the game with costs in ascending order and the permutation.

        ``perm[i]`` is the original index of the player at sorted position ``i``.
        """
        perm = np.argsort(self.beta_array, kind="stable")
        return GameSpec(self.A, self.gamma, self.beta_array[perm]), perm

    def scaled(self, factor: float) -> "GameSpec":
        return GameSpec(self.A * factor, self.gamma, self.beta_array * factor)

    def to_dict(self) -> dict:
        return {"A": self.A, "gamma": self.gamma, "beta": list(self.beta)}

    @classmethod
    def from_dict(cls, doc: dict) -> "GameSpec":
        missing = {"A", "gamma", "beta"} - set(doc)
        if missing:
            raise ValueError(f"game document is missing keys: {sorted(missing)}")
        return cls(doc["A"], doc["gamma"], doc["beta"])

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "GameSpec":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class StrategyProfile:
    """Disclosure probabilities, one per player, each in ``[0, 1]``."""

    x: np.ndarray

    def __post_init__(self):
        x = np.array(self.x, dtype=float).reshape(-1)
        if x.size == 0:
            raise ValueError("empty strategy profile")
        if np.any(~np.isfinite(x)) or np.any(x < 0.0) or np.any(x > 1.0):
            raise ValueError(f"strategy entries must lie in [0, 1], got {x}")
        x.setflags(write=False)
        object.__setattr__(self, "x", x)

    def __len__(self) -> int:
        return self.x.size

    def is_pure(self) -> bool:
        return bool(np.all((self.x == 0.0) | (self.x == 1.0)))

    def to_outcome(self) -> "DisclosureOutcome":
        if not self.is_pure():
            raise ValueError("only pure profiles map to an outcome")
        return DisclosureOutcome(self.x.astype(int))


@dataclass(frozen=True)
class DisclosureOutcome:
    """Realized disclosure indicators ``delta_k`` in ``{0, 1}``."""

    delta: tuple[int, ...]

    def __post_init__(self):
        arr = np.asarray(self.delta).reshape(-1)
        if arr.size == 0:
            raise ValueError("empty outcome")
        if not np.all((arr == 0) | (arr == 1)):
            raise ValueError(f"outcome entries must be 0 or 1, got {arr}")
        object.__setattr__(self, "delta", tuple(int(d) for d in arr))

    def __len__(self) -> int:
        return len(self.delta)

    def as_profile(self) -> StrategyProfile:
        return StrategyProfile(np.asarray(self.delta, dtype=float))


def _as_array(x) -> np.ndarray:
    if isinstance(x, StrategyProfile):
        return x.x
    if isinstance(x, DisclosureOutcome):
        return np.asarray(x.delta, dtype=float)
    return np.asarray(x, dtype=float).reshape(-1)


def _check_player(g: GameSpec, j: int) -> int:
    if not 0 <= j < g.n:
        raise IndexError(f"player index {j} out of range for {g.n} players")
    return int(j)


def _check_cap(n: int, cap: int | None) -> None:
    cap = DEFAULTS.enum_cap if cap is None else cap
    if n > cap:
        raise EnumerationCapError(f"{n} players exceeds the enumeration cap of {cap}")


def outcomes(n: int) -> Iterator[tuple[int, ...]]:
    """All ``2**n`` outcomes in binary counting order, player 0 least significant."""
    for code in range(1 << n):
        yield tuple((code >> k) & 1 for k in range(n))


def power_reward(A: float, gamma: float, s) -> np.ndarray:
    """Common reward ``A * s**gamma`` with ``0**gamma == 0``."""
    s = np.asarray(s, dtype=float)
    return A * np.power(s, gamma)


def reward_increments(gamma: float, size: int) -> np.ndarray:
    """``(s + 1)**gamma - s**gamma`` for ``s = 0 .. size - 1``."""
    s = np.arange(size, dtype=float)
    return np.power(s + 1.0, gamma) - np.power(s, gamma)


def count_distribution(p) -> np.ndarray:
    """Distribution of the number of successes among independent Bernoullis.

    Entry ``s`` of the result is the total probability of the outcomes with
    exactly ``s`` successes.  A zero probability removes that trial exactly,
    so pure coordinates never produce ``0**0`` terms.
    """
    return count_distribution_batch(np.atleast_2d(np.asarray(p, dtype=float)))[0]


def count_distribution_batch(P: np.ndarray) -> np.ndarray:
    """Row-wise :func:`count_distribution` for a ``(m, n)`` probability matrix."""
    P = np.asarray(P, dtype=float)
    m, n = P.shape
    pmf = np.zeros((m, n + 1))
    pmf[:, 0] = 1.0
    for k in range(n):
        p = P[:, k : k + 1]
        shifted = np.zeros_like(pmf)
        shifted[:, 1:] = pmf[:, :-1]
        pmf = pmf * (1.0 - p) + shifted * p
    return pmf


def pure_payoff(g: GameSpec, outcome, j: int) -> float:
    """Payoff ``A * (sum delta)**gamma - beta_j * delta_j`` of a realized outcome."""
    j = _check_player(g, j)
    delta = outcome if isinstance(outcome, DisclosureOutcome) else DisclosureOutcome(outcome)
    if len(delta) != g.n:
        raise ValueError(f"outcome has {len(delta)} entries, game has {g.n} players")
    total = sum(delta.delta)
    return float(power_reward(g.A, g.gamma, total) - g.beta[j] * delta.delta[j])


def expected_utility(g: GameSpec, x, j: int, cap: int | None = None) -> float:
    """Expected payoff of player ``j`` under the mixed profile ``x``."""
    j = _check_player(g, j)
    x = _as_array(x)
    if x.size != g.n:
        raise ValueError(f"profile has {x.size} entries, game has {g.n} players")
    _check_cap(g.n, cap)
    pmf = count_distribution(x)
    reward = power_reward(g.A, g.gamma, np.arange(g.n + 1))
    return float(pmf @ reward - g.beta[j] * x[j])


def contraction_coefficients(
    g: GameSpec, x_minus_j, j: int, cap: int | None = None
) -> tuple[float, float]:
    """Expected payoffs ``(C1, C0)`` of player ``j`` for disclosing / withholding.

    ``x_minus_j`` holds the ``n - 1`` opponent probabilities in player order.
    ``u_j = (C1 - C0) * x_j + C0``.
    """
    j = _check_player(g, j)
    others = _as_array(x_minus_j)
    if others.size != g.n - 1:
        raise ValueError(f"expected {g.n - 1} opponent probabilities, got {others.size}")
    if np.any(others < 0.0) or np.any(others > 1.0):
        raise ValueError("opponent probabilities must lie in [0, 1]")
    _check_cap(g.n, cap)
    pmf = count_distribution(others)
    s = np.arange(g.n, dtype=float)
    c1 = float(pmf @ power_reward(g.A, g.gamma, s + 1.0) - g.beta[j])
    c0 = float(pmf @ power_reward(g.A, g.gamma, s))
    return c1, c0


def marginal_utility(g: GameSpec, x, j: int, cap: int | None = None) -> float:
    """``du_j / dx_j = C1 - C0``; does not depend on ``x_j`` itself."""
    x = _as_array(x)
    if x.size != g.n:
        raise ValueError(f"profile has {x.size} entries, game has {g.n} players")
    j = _check_player(g, j)
    c1, c0 = contraction_coefficients(g, np.delete(x, j), j, cap=cap)
    return c1 - c0


def marginal_utilities(g: GameSpec, x) -> np.ndarray:
    """Vector of ``C1 - C0`` for every player.

    Dropping player ``j`` from the count is the same as setting its
    probability to zero, which lets all ``n`` distributions share one batch.
    ``x`` may lie outside ``[0, 1]``; the multilinear extension is used.
    """
    x = _as_array(x)
    n = x.size
    P = np.tile(x, (n, 1))
    np.fill_diagonal(P, 0.0)
    pmf = count_distribution_batch(P)[:, :n]
    h = reward_increments(g.gamma, n)
    return g.A * (pmf @ h) - g.beta_array


def marginal_jacobian(g: GameSpec, x, players: Sequence[int]) -> np.ndarray:
    """Jacobian of the marginals of ``players`` w.r.t. their own probabilities.

    Entry ``(a, b)`` is ``d(C1 - C0)_j / dx_k`` for ``j = players[a]`` and
    ``k = players[b]``; it is zero on the diagonal.
    """
    x = _as_array(x)
    n = x.size
    players = list(players)
    k = len(players)
    if k == 0:
        return np.zeros((0, 0))
    rows = []
    for j in players:
        for kk in players:
            row = x.copy()
            row[j] = 0.0
            row[kk] = 0.0
            rows.append(row)
    pmf = count_distribution_batch(np.array(rows))[:, : n - 1] if n > 1 else np.zeros((k * k, 0))
    h = reward_increments(g.gamma, n + 1)
    dh = h[1:n] - h[: n - 1]
    J = g.A * (pmf @ dh) if n > 1 else np.zeros(k * k)
    J = J.reshape(k, k)
    np.fill_diagonal(J, 0.0)
    return J
