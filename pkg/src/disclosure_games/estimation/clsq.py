"""Complementarity-constrained least squares for disclosure costs.

Given observed strategies ``y``, find an equilibrium ``x`` of some cost
vector ``beta`` (inside optional bounds) that is closest to ``y``.
Stationarity fixes ``beta_j = m_j(x) + lambda_j - mu_j`` where ``m_j`` is
the expected reward increment, so once a support pattern is chosen the
costs can be eliminated and only a box-constrained least-squares problem
in the interior coordinates is left.  With cost bounds the elimination
turns into inequality constraints on ``m_j(x)``, handled by a quadratic
penalty with an increasing weight.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from ..config import DEFAULTS
from ..equilibrium import KktCertificate, KktVerdict, verify_kkt
from ..game import GameSpec, marginal_jacobian, marginal_utilities

_ZERO, _ONE, _INTERIOR = 0, 1, 2
_NAMES = {_ZERO: "zero", _ONE: "one", _INTERIOR: "interior"}


@dataclass
class ClsqResult:
    x: np.ndarray
    lam: np.ndarray
    mu: np.ndarray
    beta: np.ndarray
    objective: float
    pattern: tuple[str, ...]
    success: bool
    verdict: KktVerdict | None
    patterns_explored: int
    message: str = ""

    def to_dict(self) -> dict:
        return {
            "x": self.x.tolist(),
            "lambda": self.lam.tolist(),
            "mu": self.mu.tolist(),
            "beta": self.beta.tolist(),
            "objective": self.objective,
            "pattern": list(self.pattern),
            "success": self.success,
            "kkt_valid": bool(self.verdict) if self.verdict is not None else None,
            "patterns_explored": self.patterns_explored,
            "message": self.message,
        }


def _violation(pattern, m, lo, hi) -> np.ndarray:
    v = np.zeros_like(m)
    for j, p in enumerate(pattern):
        if p != _ONE:
            v[j] += max(0.0, m[j] - hi)
        if p != _ZERO:
            v[j] += max(0.0, lo - m[j])
    return v


def _recover(pattern, m, lo, hi):
    beta = np.clip(m, lo, hi)
    lam = np.zeros_like(m)
    mu = np.zeros_like(m)
    for j, p in enumerate(pattern):
        if p == _ZERO:
            beta[j] = max(m[j], lo)
            lam[j] = beta[j] - m[j]
        elif p == _ONE:
            beta[j] = min(m[j], hi)
            mu[j] = m[j] - beta[j]
    return beta, lam, mu


def _lower_bounds(y, codes) -> np.ndarray:
    """Least possible squared error of every pattern, ignoring cost bounds."""
    out_of_box = np.clip(y, 0.0, 1.0) - y
    cost = np.where(codes == _ZERO, y**2, np.where(codes == _ONE, (1.0 - y) ** 2, out_of_box**2))
    return cost.sum(axis=1)


def _signed_violation(pattern, m, lo, hi):
    """Violation of the cost window and its sign as a function of ``m``."""
    v = _violation(pattern, m, lo, hi)
    sign = np.zeros_like(m)
    for j, p in enumerate(pattern):
        if p != _ONE and m[j] > hi:
            sign[j] = 1.0
        elif p != _ZERO and m[j] < lo:
            sign[j] = -1.0
    return v, sign


def _window_constraints(pattern, lo, hi):
    """Rows ``(j, s, bound)`` meaning ``s * (m_j - bound) <= 0``."""
    rows = []
    for j, p in enumerate(pattern):
        if p != _ONE and np.isfinite(hi):
            rows.append((j, 1.0, hi))
        if p != _ZERO:
            rows.append((j, -1.0, lo))
    return rows


def _solve_pattern(g0, y, pattern, lo, hi, feas_tol, n_starts, rng):
    n = y.size
    interior = [j for j, p in enumerate(pattern) if p == _INTERIOR]
    base = np.array([1.0 if p == _ONE else 0.0 for p in pattern])

    def full(z):
        x = base.copy()
        x[interior] = z
        return x

    def objective(z):
        return float(np.sum((y - full(z)) ** 2))

    def feasible(x):
        return _violation(pattern, marginal_utilities(g0, x), lo, hi).max() <= feas_tol

    z0 = np.clip(y[interior], 0.0, 1.0)
    x0 = full(z0)
    if feasible(x0):
        return x0
    if not interior:
        return None

    players = range(n)
    box = [(0.0, 1.0)] * len(interior)
    rows = _window_constraints(pattern, lo, hi)

    def penalized(zz, rho):
        x = full(zz)
        m = marginal_utilities(g0, x)
        v, sign = _signed_violation(pattern, m, lo, hi)
        J = marginal_jacobian(g0, x, players)[:, interior]
        grad = -2.0 * (y[interior] - zz) + 2.0 * rho * (J.T @ (v * sign))
        return objective(zz) + rho * float(v @ v), grad

    def cons_fun(zz):
        m = marginal_utilities(g0, full(zz))
        return np.array([-s * (m[j] - b) for j, s, b in rows])

    def cons_jac(zz):
        J = marginal_jacobian(g0, full(zz), players)[:, interior]
        return np.array([-s * J[j] for j, s, _ in rows])

    best = None
    starts = [z0] + [rng.uniform(0.0, 1.0, len(interior)) for _ in range(n_starts - 1)]
    for z in starts:
        for rho in (1e1, 1e3, 1e5, 1e7):
            z = optimize.minimize(penalized, z, args=(rho,), jac=True, method="L-BFGS-B", bounds=box).x
        candidates = [z]
        if rows:
            # the penalty leaves a small violation; polish with the constraints made explicit
            polished = optimize.minimize(
                objective, z, jac=lambda zz: -2.0 * (y[interior] - zz), method="SLSQP", bounds=box,
                constraints=[{"type": "ineq", "fun": cons_fun, "jac": cons_jac}],
                options={"ftol": 1e-14, "maxiter": 200},
            ).x
            candidates.append(np.clip(polished, 0.0, 1.0))
        for zc in candidates:
            x = full(zc)
            if feasible(x) and (best is None or objective(zc) < objective(best[interior])):
                best = x
    return best


def fit_beta_constrained_lsq(
    y_hat,
    A: float,
    gamma: float,
    *,
    beta_bounds: tuple[float, float] = (0.0, np.inf),
    cap: int = 10,
    n_starts: int = 3,
    feas_tol: float = DEFAULTS.kkt,
    seed: int = 0,
) -> ClsqResult:
    """Closest equilibrium profile to ``y_hat`` over all admissible costs.

    Support patterns are visited in order of their least possible error and
    the search stops once no remaining pattern can beat the incumbent.  The
    winner is certified with :func:`verify_kkt` against the recovered costs.
    """
    y = np.asarray(y_hat, dtype=float).reshape(-1)
    n = y.size
    if n > cap:
        raise ValueError(f"{n} players exceeds the desk-scale cap of {cap}")
    lo, hi = map(float, beta_bounds)
    if lo < 0 or lo > hi:
        raise ValueError("cost bounds must satisfy 0 <= low <= high")
    g0 = GameSpec(A, gamma, np.zeros(n))
    codes = np.array(list(itertools.product((_ZERO, _ONE, _INTERIOR), repeat=n)), dtype=int)
    bounds = _lower_bounds(y, codes)
    order = np.argsort(bounds, kind="stable")
    rng = np.random.default_rng(seed)

    best_x, best_obj, best_pat = None, np.inf, None
    explored = 0
    for idx in order:
        if bounds[idx] >= best_obj - 1e-15:
            break
        pattern = tuple(int(c) for c in codes[idx])
        explored += 1
        x = _solve_pattern(g0, y, pattern, lo, hi, feas_tol, n_starts, rng)
        if x is None:
            continue
        obj = float(np.sum((y - x) ** 2))
        if obj < best_obj:
            best_x, best_obj, best_pat = x, obj, pattern

    if best_x is None:
        nan = np.full(n, np.nan)
        return ClsqResult(nan, nan, nan, nan, np.inf, (), False, None, explored, "no feasible tuple found")

    m = marginal_utilities(g0, best_x)
    beta, lam, mu = _recover(best_pat, m, lo, hi)
    verdict = verify_kkt(GameSpec(A, gamma, beta), KktCertificate(best_x, lam, mu), DEFAULTS.kkt)
    return ClsqResult(
        best_x, lam, mu, beta, best_obj, tuple(_NAMES[p] for p in best_pat), bool(verdict), verdict, explored
    )
