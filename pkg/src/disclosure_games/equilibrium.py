"""Nash equilibria of the disclosure game.

Each player's problem is a linear program in its own probability, so an
equilibrium is exactly a KKT point: primal feasibility ``0 <= x_j <= 1``,
stationarity ``m_j + lambda_j - mu_j = 0`` with ``m_j = C1 - C0``,
non-negative multipliers, and complementary slackness.  The solvers here
build candidates and hand every one of them to :func:`verify_kkt`.
"""

from __future__ import annotations

import enum
import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULTS, Tolerances, worker_count
from .game import (
    DisclosureOutcome,
    count_distribution_batch,
    GameSpec,
    StrategyProfile,
    _as_array,
    marginal_jacobian,
    marginal_utilities,
    outcomes,
    power_reward,
    reward_increments,
)

logger = logging.getLogger(__name__)


class Method(str, enum.Enum):
    SUPPORT_ENUMERATION = "support-enumeration"
    BEST_RESPONSE = "best-response"
    NLP_PENALTY = "nlp-penalty"
    BRUTE_FORCE_PURE = "brute-force-pure"


@dataclass(frozen=True)
class KktCertificate:
    """A profile together with the multipliers of its box constraints.

    ``lam`` belongs to ``x_j >= 0`` and ``mu`` to ``x_j <= 1``.
    """

    x: np.ndarray
    lam: np.ndarray
    mu: np.ndarray

    def __post_init__(self):
        for name in ("x", "lam", "mu"):
            arr = np.array(getattr(self, name), dtype=float).reshape(-1)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if not (self.x.size == self.lam.size == self.mu.size):
            raise ValueError("x, lambda and mu must have the same length")

    @property
    def profile(self) -> StrategyProfile:
        return StrategyProfile(np.clip(self.x, 0.0, 1.0))

    def is_pure(self) -> bool:
        return bool(np.all((self.x == 0.0) | (self.x == 1.0)))

    def to_dict(self) -> dict:
        return {"x": self.x.tolist(), "lambda": self.lam.tolist(), "mu": self.mu.tolist()}


@dataclass(frozen=True)
class KktVerdict:
    valid: bool
    condition: str | None = None
    player: int | None = None
    magnitude: float = 0.0

    def __bool__(self) -> bool:
        return self.valid


@dataclass
class EquilibriumReport:
    certificates: list[KktCertificate]
    method: Method
    residuals: dict[str, float]
    degenerate: bool
    trace: list[str] = field(default_factory=list)

    @property
    def profiles(self) -> list[np.ndarray]:
        return [c.x for c in self.certificates]

    def pure_outcomes(self) -> list[tuple[int, ...]]:
        return [tuple(int(v) for v in c.x) for c in self.certificates if c.is_pure()]

    def to_dict(self) -> dict:
        return {
            "method": self.method.value,
            "degenerate": self.degenerate,
            "count": len(self.certificates),
            "residuals": dict(self.residuals),
            "certificates": [c.to_dict() for c in self.certificates],
            "trace": list(self.trace),
        }


def _check_dims(g: GameSpec, cert: KktCertificate) -> None:
    if cert.x.size != g.n:
        raise ValueError(f"certificate has {cert.x.size} players, game has {g.n}")


def kkt_residuals(g: GameSpec, cert: KktCertificate) -> dict[str, np.ndarray]:
    """Per-player violation of each KKT condition (all zero at an equilibrium)."""
    _check_dims(g, cert)
    x, lam, mu = cert.x, cert.lam, cert.mu
    marg = marginal_utilities(g, x)
    return {
        "primal_lower": np.maximum(0.0, -x),
        "primal_upper": np.maximum(0.0, x - 1.0),
        "dual_lambda": np.maximum(0.0, -lam),
        "dual_mu": np.maximum(0.0, -mu),
        "stationarity": np.abs(marg + lam - mu),
        "slack_lower": np.abs(lam * x),
        "slack_upper": np.abs(mu * (x - 1.0)),
    }


def verify_kkt(g: GameSpec, cert: KktCertificate, tol: float = DEFAULTS.kkt) -> KktVerdict:
    """Check the KKT system at ``cert``; report the first failing condition."""
    res = kkt_residuals(g, cert)
    for name, values in res.items():
        bad = np.flatnonzero(values > tol)
        if bad.size:
            j = int(bad[0])
            return KktVerdict(False, name, j, float(values[j]))
    return KktVerdict(True)


def certificate_from_profile(g: GameSpec, x) -> KktCertificate:
    """Recover the multipliers for ``x``.

    At a boundary coordinate the only choice satisfying dual feasibility and
    slackness is ``lambda = max(0, -m)`` at 0 and ``mu = max(0, m)`` at 1;
    interior coordinates get zero multipliers.
    """
    x = _as_array(x)
    marg = marginal_utilities(g, x)
    lam = np.where(x == 0.0, np.maximum(0.0, -marg), 0.0)
    mu = np.where(x == 1.0, np.maximum(0.0, marg), 0.0)
    return KktCertificate(x, lam, mu)


def nlp_objective(g: GameSpec, cert: KktCertificate) -> float:
    """Complementarity gap ``sum lambda_j x_j + mu_j (1 - x_j)``.

    Zero exactly at equilibrium certificates, positive on every other point
    of the feasible set.
    """
    _check_dims(g, cert)
    return float(np.sum(cert.lam * cert.x + cert.mu * (1.0 - cert.x)))


def nlp_objective_reduced(g: GameSpec, cert: KktCertificate) -> float:
    """The same gap written as ``sum mu_j - x_j (C1 - C0)``.

    Agrees with :func:`nlp_objective` whenever stationarity holds.
    """
    _check_dims(g, cert)
    marg = marginal_utilities(g, cert.x)
    return float(np.sum(cert.mu - cert.x * marg))


def construct_threshold_equilibrium(g: GameSpec) -> StrategyProfile | None:
    """Pure profile where the ``m`` cheapest players disclose.

    Picks the largest ``m`` with ``beta_(m) <= A (m**g - (m-1)**g)`` and
    ``beta_(m+1) >= A ((m+1)**g - m**g)`` on the sorted costs.
    """
    sg, perm = g.sorted()
    beta = sg.beta_array
    n = g.n
    inc = g.A * reward_increments(g.gamma, n + 1)
    chosen = None
    for m in range(n + 1):
        joins = m == 0 or beta[m - 1] <= inc[m - 1]
        stays_out = m == n or beta[m] >= inc[m]
        if joins and stays_out:
            chosen = m
    if chosen is None:
        return None
    x = np.zeros(n)
    x[perm[:chosen]] = 1.0
    return StrategyProfile(x)


def check_all_withhold(g: GameSpec) -> bool:
    """``x = 0`` is an equilibrium iff ``A <= min beta``."""
    return g.A <= min(g.beta)


def check_all_disclose(g: GameSpec) -> bool:
    """Literal predicate ``A >= max beta`` for ``x = 1`` being an equilibrium.

    For ``gamma != 1`` and ``n > 1`` the deviation calculus gives
    ``A (n**gamma - (n-1)**gamma) >= max beta`` instead; see
    :func:`all_disclose_by_deviation`.
    """
    return g.A >= max(g.beta)


def all_disclose_by_deviation(g: GameSpec) -> bool:
    """Exact test: no player gains by withdrawing from ``x = 1``."""
    n = g.n
    gain = g.A * (n**g.gamma - (n - 1) ** g.gamma)
    return gain >= max(g.beta)


def brute_force_pure_equilibria(g: GameSpec, tol: float = DEFAULTS.deviation) -> list[DisclosureOutcome]:
    """Enumerate all pure profiles and keep those immune to single flips."""
    n = g.n
    if n > 20:
        raise ValueError(f"brute force is limited to 20 players, got {n}")
    beta = g.beta_array
    reward = power_reward(g.A, g.gamma, np.arange(n + 1))
    found = []
    for delta in outcomes(n):
        d = np.asarray(delta)
        s = int(d.sum())
        stable = True
        for j in range(n):
            current = reward[s] - beta[j] * d[j]
            if d[j]:
                flipped = reward[s - 1]
            else:
                flipped = reward[s + 1] - beta[j]
            if flipped - current > tol:
                stable = False
                break
        if stable:
            found.append(DisclosureOutcome(delta))
    return found


def best_response_dynamics(
    g: GameSpec, x0, max_iters: int = 1000, tol: float = 1e-10
) -> tuple[StrategyProfile, bool]:
    """Round-robin pure best responses starting from ``x0``.

    A player switches to 1 when its marginal exceeds ``tol``, to 0 when it
    is below ``-tol``, and otherwise keeps its current probability.
    """
    x = _as_array(x0).copy()
    if x.size != g.n:
        raise ValueError(f"profile has {x.size} entries, game has {g.n} players")
    StrategyProfile(x)
    for _ in range(max_iters):
        changed = False
        for j in range(g.n):
            m = marginal_utilities(g, x)[j]
            if m > tol:
                new = 1.0
            elif m < -tol:
                new = 0.0
            else:
                new = x[j]
            if new != x[j]:
                x[j] = new
                changed = True
        if not changed:
            return StrategyProfile(x), True
    return StrategyProfile(x), False


# --- support enumeration -------------------------------------------------

_ZERO, _ONE, _INTERIOR = 0, 1, 2


def _pattern_admissible(pattern, beta, A, h, tol) -> bool:
    """Cheap necessary conditions on a support pattern.

    The count of opponents who disclose lies in a known integer range, and
    ``h`` is monotone, so the expected increment is bounded by its values at
    the ends of that range.
    """
    ones = sum(1 for p in pattern if p == _ONE)
    k = sum(1 for p in pattern if p == _INTERIOR)
    for j, p in enumerate(pattern):
        if p == _INTERIOR:
            lo, hi = ones, ones + k - 1
            seg = h[lo : hi + 1]
            if beta[j] < A * seg.min() - tol or beta[j] > A * seg.max() + tol:
                return False
        elif p == _ZERO:
            seg = h[ones : ones + k + 1]
            if A * seg.min() > beta[j] + tol:
                return False
        else:
            seg = h[ones - 1 : ones + k]
            if A * seg.max() < beta[j] - tol:
                return False
    return True


def _affine_bounds(a, b, target, lower, lo, hi, eps):
    """Shrink ``[lo, hi]`` to the ``t`` with ``a + b t >= target`` (or ``<=``)."""
    if lower:
        a, b, target = -a, -b, -target
    # now require a + b t <= target
    if abs(b) < 1e-300:
        return (lo, hi) if a <= target + eps else (1.0, 0.0)
    t = (target - a) / b
    slack = eps / abs(b)
    if b > 0:
        return lo, min(hi, t + slack)
    return max(lo, t - slack), hi


def _contract_box(g, pattern, h, eps, rounds: int = 30):
    """Interval propagation on the stationarity and sign conditions.

    The expected reward increment is monotone in every opponent probability
    (decreasing for ``gamma < 1``), so its range over a box is attained at
    two opposite corners, and it is affine in any single coordinate.  Each
    condition therefore tightens the box one coordinate at a time.  Returns
    ``None`` when the box empties, which proves the pattern has no solution.
    """
    A, beta = g.A, g.beta_array
    interior = [j for j, p in enumerate(pattern) if p == _INTERIOR]
    k = len(interior)
    ones = sum(1 for p in pattern if p == _ONE)
    lo, hi = np.zeros(k), np.ones(k)
    decreasing = g.gamma < 1.0
    for _ in range(rounds):
        moved = 0.0
        for j, p in enumerate(pattern):
            offset = ones - (1 if p == _ONE else 0)
            pos = [a for a in range(k) if interior[a] != j]
            if not pos:
                continue
            hseg = h[offset : offset + len(pos) + 1]
            rows = []
            for a in pos:
                for corner_hi in (False, True):
                    others = hi if corner_hi else lo
                    for t in (0.0, 1.0):
                        r = others[pos].copy()
                        r[pos.index(a)] = t
                        rows.append(r)
            vals = A * (count_distribution_batch(np.array(rows)) @ hseg)
            vals = vals.reshape(len(pos), 2, 2)
            for idx, a in enumerate(pos):
                (l0, l1), (h0, h1) = vals[idx]
                # values with the rest of the box at its low / high corner
                if decreasing:
                    big0, big1, small0, small1 = l0, l1, h0, h1
                else:
                    big0, big1, small0, small1 = h0, h1, l0, l1
                new_lo, new_hi = lo[a], hi[a]
                if p in (_INTERIOR, _ZERO):
                    # need small(t) <= beta_j
                    new_lo, new_hi = _affine_bounds(small0, small1 - small0, beta[j], False, new_lo, new_hi, eps)
                if p in (_INTERIOR, _ONE):
                    # need big(t) >= beta_j
                    new_lo, new_hi = _affine_bounds(big0, big1 - big0, beta[j], True, new_lo, new_hi, eps)
                if new_lo > new_hi:
                    return None
                moved = max(moved, new_lo - lo[a], hi[a] - new_hi)
                lo[a], hi[a] = new_lo, new_hi
        if moved < 1e-12:
            break
    return lo, hi


def _newton_interior(g, base, interior, start, opts: Tolerances):
    """Damped Newton on the interior stationarity equations.

    Returns the converged interior probabilities or ``None``.
    """
    x = base.copy()
    x[interior] = start
    resid = marginal_utilities(g, x)[interior]
    norm = np.max(np.abs(resid))
    checkpoint, since = norm, 0
    for _ in range(opts.max_iters):
        if norm <= opts.fixed_point:
            return x[interior]
        # stalled: residual has not halved over the last 25 steps
        since += 1
        if since >= 25:
            if norm > 0.5 * checkpoint:
                return None
            checkpoint, since = norm, 0
        J = marginal_jacobian(g, x, interior)
        step = np.linalg.lstsq(J, resid, rcond=None)[0]
        if not np.all(np.isfinite(step)) or np.max(np.abs(step)) == 0.0:
            return None
        alpha = 1.0
        while alpha > 1e-6:
            trial = x.copy()
            trial[interior] = x[interior] - alpha * step
            t_resid = marginal_utilities(g, trial)[interior]
            t_norm = np.max(np.abs(t_resid))
            if t_norm < norm:
                x, resid, norm = trial, t_resid, t_norm
                break
            alpha *= opts.damping
        else:
            return None
        if np.max(np.abs(x[interior] - 0.5)) > 50.0:
            return None
    return x[interior] if norm <= opts.fixed_point else None


def _solve_pattern(g, pattern, opts: Tolerances, rng_seed: int):
    """All candidate profiles for one support pattern, plus trace notes."""
    n = g.n
    base = np.array([1.0 if p == _ONE else 0.0 for p in pattern])
    interior = [j for j, p in enumerate(pattern) if p == _INTERIOR]
    notes = []
    if not interior:
        return [base], notes
    if len(interior) == 1:
        # The marginal of a lone interior player does not involve its own
        # probability: either every x_j works (degenerate) or none does.
        j = interior[0]
        if abs(marginal_utilities(g, base)[j]) <= opts.fixed_point:
            x = base.copy()
            x[j] = 0.5
            notes.append(f"pattern {pattern}: player {j} indifferent on [0,1]; midpoint reported")
            return [x], notes
        return [], notes
    box = _contract_box(g, pattern, reward_increments(g.gamma, n + 1), opts.kkt)
    if box is None:
        return [], notes
    lo, hi = box
    n_starts = 1 if len(interior) == 2 else opts.n_starts
    rng = np.random.default_rng(rng_seed)
    starts = [0.5 * (lo + hi)]
    starts += [rng.uniform(lo, hi) for _ in range(n_starts - 1)]
    found = []
    for start in starts:
        sol = _newton_interior(g, base, interior, start, opts)
        if sol is None:
            continue
        if np.any(sol <= 0.0) or np.any(sol >= 1.0):
            continue
        x = base.copy()
        x[interior] = sol
        if not any(np.max(np.abs(x - y)) < 1e-7 for y in found):
            found.append(x)
    if not found:
        notes.append(f"pattern {pattern}: no interior solution from {len(starts)} starts")
    return found, notes


def solve_equilibria(g: GameSpec, opts: Tolerances = DEFAULTS, seed: int = 0) -> EquilibriumReport:
    """Search all ``3**n`` support patterns for KKT points.

    Every player is assigned to ``x_j = 0``, ``x_j = 1`` or the interior.
    Interior players solve ``C1 - C0 = 0`` by damped Newton iteration from
    several starts; boundary multipliers follow from the marginals.  Only
    candidates passing :func:`verify_kkt` are reported.  The search is
    exhaustive for pure equilibria and best effort for mixed ones.
    """
    n = g.n
    if n > opts.support_cap:
        raise ValueError(f"{n} players exceeds the support-enumeration cap of {opts.support_cap}")
    beta = g.beta_array
    h = reward_increments(g.gamma, n + 1)
    patterns = [
        pat
        for pat in itertools.product((_ZERO, _ONE, _INTERIOR), repeat=n)
        if _pattern_admissible(pat, beta, g.A, h, opts.kkt)
    ]

    def run(item):
        idx, pat = item
        return _solve_pattern(g, pat, opts, rng_seed=seed + idx)

    workers = worker_count()
    items = list(enumerate(patterns))
    if workers > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, items))
    else:
        results = [run(item) for item in items]

    trace = [f"{len(patterns)} of {3**n} support patterns admissible"]
    certs: list[KktCertificate] = []
    for candidates, notes in results:
        trace.extend(notes)
        for x in candidates:
            cert = certificate_from_profile(g, x)
            verdict = verify_kkt(g, cert, opts.kkt)
            if not verdict:
                trace.append(
                    f"candidate {np.round(x, 6).tolist()} rejected: {verdict.condition} "
                    f"player {verdict.player} ({verdict.magnitude:.3g})"
                )
                continue
            if any(np.max(np.abs(cert.x - c.x)) < 1e-7 for c in certs):
                continue
            certs.append(cert)
    certs.sort(key=lambda c: tuple(c.x))

    degenerate = False
    for cert in certs:
        marg = marginal_utilities(g, cert.x)
        boundary = (cert.x == 0.0) | (cert.x == 1.0)
        if np.any(np.abs(marg[boundary]) < opts.degeneracy):
            degenerate = True
        if np.sum(~boundary) == 1:
            degenerate = True

    residuals = {}
    for cert in certs:
        for name, values in kkt_residuals(g, cert).items():
            residuals[name] = max(residuals.get(name, 0.0), float(values.max()))

    if not certs:
        trace.append("no equilibrium found; search is incomplete for mixed strategies")
        logger.warning("no equilibrium found for %s", g)
    elif not degenerate and len(certs) % 2 == 0:
        trace.append(f"even equilibrium count {len(certs)} in a non-degenerate game")
        logger.warning("even equilibrium count %d for %s", len(certs), g)

    return EquilibriumReport(certs, Method.SUPPORT_ENUMERATION, residuals, degenerate, trace)
