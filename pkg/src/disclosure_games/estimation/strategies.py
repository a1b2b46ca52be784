"""Per-user strategy estimates and the disclosure costs they imply.

A user's strategy is estimated by the fraction of their comments that
disclose.  When a user plays a strictly mixed strategy both multipliers
vanish, so stationarity pins their cost to the expected reward increment
``A E[(1 + S)**gamma - S**gamma]`` over the disclosures ``S`` of the other
users in the same article.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from ..game import count_distribution, reward_increments


@dataclass(frozen=True)
class StrategyEstimate:
    user_id: str
    x_hat: float
    n_posts: int
    n_disclosing: int
    n_articles: int


@dataclass(frozen=True)
class BetaEstimate:
    user_id: str
    beta_hat: float
    n_articles_used: int
    values: tuple[float, ...]


@dataclass
class ArticleBeta:
    """Cost contributions of one article, keyed by user."""

    contributions: dict[str, float]
    excluded: dict[str, str]
    n_substituted: int
    n_substituted_used: int


@dataclass
class BetaEstimation:
    estimates: list[BetaEstimate]
    x_bar: float
    n_articles_used: int
    excluded: dict[str, str] = field(default_factory=dict)


def estimate_strategies(records, min_posts: int = 15) -> list[StrategyEstimate]:
    """Disclosure fraction per user, for users active in ``min_posts`` articles.

    The threshold counts distinct articles; ``x_hat`` is taken over comments.
    """
    posts: dict[str, int] = defaultdict(int)
    disclosing: dict[str, int] = defaultdict(int)
    articles: dict[str, set] = defaultdict(set)
    for rec in records:
        posts[rec.user_id] += 1
        disclosing[rec.user_id] += int(rec.disclosed)
        articles[rec.user_id].add(rec.article_id)
    out = []
    for user in sorted(posts):
        if len(articles[user]) < min_posts:
            continue
        out.append(
            StrategyEstimate(user, disclosing[user] / posts[user], posts[user], disclosing[user], len(articles[user]))
        )
    return out


def beta_contribution(A: float, gamma: float, co_x) -> float:
    """Expected reward increment from disclosing, given co-user strategies."""
    co_x = np.asarray(co_x, dtype=float).reshape(-1)
    pmf = count_distribution(co_x)
    return float(A * (pmf @ reward_increments(gamma, co_x.size + 1)))


def estimate_beta(article_users, A: float, gamma: float, x_bar: float, cap: int = 8) -> ArticleBeta:
    """Cost contributions for every interior-strategy user in one article.

    ``article_users`` is a sequence of ``(user_id, x_hat)`` with ``x_hat``
    ``None`` for users without an estimate; those are assigned ``x_bar``.
    Each target's enumeration keeps all users with a proper estimate and
    fills the remaining places, up to ``cap`` users including the target,
    with ``x_bar`` users.  Users with a pure estimate are excluded because
    their multipliers are not identified.
    """
    article_users = list(article_users)
    if not article_users:
        raise ValueError("article has no users")
    contributions: dict[str, float] = {}
    excluded: dict[str, str] = {}
    n_sub = sum(1 for _, xh in article_users if xh is None)
    n_sub_used = 0
    for idx, (user, xh) in enumerate(article_users):
        if xh is None:
            continue
        if not 0.0 < xh < 1.0:
            excluded[user] = f"pure strategy estimate (x_hat={xh:g})"
            continue
        proper = [v for i, (_, v) in enumerate(article_users) if i != idx and v is not None]
        slots = max(0, cap - 1 - len(proper))
        used = min(n_sub, slots)
        n_sub_used = max(n_sub_used, used)
        co_x = proper + [x_bar] * used
        contributions[user] = beta_contribution(A, gamma, co_x)
    return ArticleBeta(contributions, excluded, n_sub, n_sub_used)


def estimate_betas(
    records,
    strategies,
    A: float,
    gamma: float,
    *,
    min_proper: int = 3,
    cap: int = 8,
) -> BetaEstimation:
    """Average per-article cost contributions for each estimated user.

    Only articles with at least ``min_proper`` users holding an estimate are
    used.  ``x_bar`` is the mean of all estimates in ``strategies``.
    """
    xhat = {s.user_id: s.x_hat for s in strategies}
    if not xhat:
        return BetaEstimation([], float("nan"), 0)
    x_bar = float(np.mean(list(xhat.values())))
    members: dict[str, set] = defaultdict(set)
    for rec in records:
        members[rec.article_id].add(rec.user_id)
    values: dict[str, list[float]] = defaultdict(list)
    excluded: dict[str, str] = {}
    used_articles = 0
    for aid in sorted(members):
        users = sorted(members[aid])
        if sum(1 for u in users if u in xhat) < min_proper:
            continue
        used_articles += 1
        res = estimate_beta([(u, xhat.get(u)) for u in users], A, gamma, x_bar, cap=cap)
        for user, val in res.contributions.items():
            values[user].append(val)
        excluded.update(res.excluded)
    estimates = [
        BetaEstimate(u, float(np.mean(v)), len(v), tuple(v)) for u, v in sorted(values.items())
    ]
    return BetaEstimation(estimates, x_bar, used_articles, excluded)
