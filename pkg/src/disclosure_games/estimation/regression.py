"""Least-squares fits of the common-reward law and its linear null model."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import stats


@dataclass
class OlsResult:
    """Gaussian OLS inference for ``y = X @ params + noise``."""

    params: np.ndarray
    std_err: np.ndarray
    t_values: np.ndarray
    p_values: np.ndarray
    conf_int: np.ndarray
    rss: float
    r2: float
    r2_adjusted: float
    n: int
    residuals: np.ndarray
    fitted: np.ndarray


def ols(X, y, alpha: float = 0.05) -> OlsResult:
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n, k = X.shape
    if n <= k:
        raise ValueError(f"need more than {k} observations, got {n}")
    params, _, rank, _ = np.linalg.lstsq(X, y, rcond=None)
    if rank < k:
        raise ValueError("regressor has zero variance")
    fitted = X @ params
    resid = y - fitted
    rss = float(resid @ resid)
    df = n - k
    sigma2 = rss / df
    cov = sigma2 * np.linalg.inv(X.T @ X)
    se = np.sqrt(np.diag(cov))
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(se > 0, params / se, np.sign(params) * np.inf)
    p = 2.0 * stats.t.sf(np.abs(t), df)
    q = stats.t.ppf(1.0 - alpha / 2.0, df)
    ci = np.column_stack([params - q * se, params + q * se])
    tss = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - rss / tss if tss > 0 else 1.0
    r2_adj = 1.0 - (1.0 - r2) * (n - 1) / df
    return OlsResult(params, se, t, p, ci, rss, r2, r2_adj, n, resid, fitted)


def gaussian_aic(rss: float, n: int, k: int) -> float:
    """``2k + n ln(RSS/n) + n (1 + ln 2 pi)``; ``k`` counts the noise variance."""
    if rss <= 0:
        return -np.inf
    return 2.0 * k + n * np.log(rss / n) + n * (1.0 + np.log(2.0 * np.pi))


@dataclass
class PowerLawFit:
    """``log R = log A + gamma log S`` fitted on articles with ``R, S >= 1``."""

    log_A: float
    gamma: float
    std_err_log_A: float
    std_err_gamma: float
    p_log_A: float
    p_gamma: float
    t_gamma: float
    ci_log_A: tuple[float, float]
    ci_gamma: tuple[float, float]
    r2: float
    r2_adjusted: float
    aic: float
    rss: float
    n_params: int
    n_articles: int
    residuals: np.ndarray
    s: np.ndarray
    r: np.ndarray
    n_dropped_zero_r: int = 0
    n_dropped_zero_s: int = 0

    @property
    def A(self) -> float:
        return float(np.exp(self.log_A))

    def predict(self, s) -> np.ndarray:
        return self.A * np.power(np.asarray(s, dtype=float), self.gamma)

    def to_dict(self) -> dict:
        return {
            "model": "power_law",
            "scale": "log",
            "log_A": self.log_A,
            "A": self.A,
            "gamma": self.gamma,
            "std_err_log_A": self.std_err_log_A,
            "std_err_gamma": self.std_err_gamma,
            "p_log_A": self.p_log_A,
            "p_gamma": self.p_gamma,
            "t_gamma": self.t_gamma,
            "ci_log_A": list(self.ci_log_A),
            "ci_gamma": list(self.ci_gamma),
            "r2": self.r2,
            "r2_adjusted": self.r2_adjusted,
            "aic": self.aic,
            "rss": self.rss,
            "n": self.n_articles,
            "k": self.n_params,
            "n_dropped_zero_r": self.n_dropped_zero_r,
            "n_dropped_zero_s": self.n_dropped_zero_s,
        }


@dataclass
class NullLinearFit:
    """``R = beta0 + beta1 S`` in natural units."""

    beta0: float
    beta1: float
    std_err_beta0: float
    std_err_beta1: float
    p_beta0: float
    p_beta1: float
    ci_beta0: tuple[float, float]
    ci_beta1: tuple[float, float]
    r2: float
    r2_adjusted: float
    aic: float
    rss: float
    n_params: int
    n_articles: int
    residuals: np.ndarray
    s: np.ndarray
    r: np.ndarray
    n_dropped_zero_r: int = 0

    def predict(self, s) -> np.ndarray:
        return self.beta0 + self.beta1 * np.asarray(s, dtype=float)

    def to_dict(self) -> dict:
        return {
            "model": "null_linear",
            "scale": "natural",
            "beta0": self.beta0,
            "beta1": self.beta1,
            "std_err_beta0": self.std_err_beta0,
            "std_err_beta1": self.std_err_beta1,
            "p_beta0": self.p_beta0,
            "p_beta1": self.p_beta1,
            "ci_beta0": list(self.ci_beta0),
            "ci_beta1": list(self.ci_beta1),
            "r2": self.r2,
            "r2_adjusted": self.r2_adjusted,
            "aic": self.aic,
            "rss": self.rss,
            "n": self.n_articles,
            "k": self.n_params,
            "n_dropped_zero_r": self.n_dropped_zero_r,
        }


@dataclass
class LinearFit:
    intercept: float
    slope: float
    std_errs: tuple[float, float]
    t_stats: tuple[float, float]
    p_values: tuple[float, float]
    conf_int: tuple[tuple[float, float], tuple[float, float]]
    r2: float
    r2_adjusted: float
    n: int
    residuals: np.ndarray = field(repr=False)

    def to_dict(self) -> dict:
        return {
            "intercept": self.intercept,
            "slope": self.slope,
            "std_errs": list(self.std_errs),
            "t_stats": [float(t) for t in self.t_stats],
            "p_values": list(self.p_values),
            "conf_int": [list(c) for c in self.conf_int],
            "r2": self.r2,
            "r2_adjusted": self.r2_adjusted,
            "n": self.n,
        }


def _arrays(aggregates) -> tuple[np.ndarray, np.ndarray]:
    aggregates = list(aggregates)
    if not aggregates:
        raise ValueError("no articles to fit")
    r = np.array([a.R for a in aggregates], dtype=float)
    s = np.array([a.S for a in aggregates], dtype=float)
    return r, s


def power_law_ols(s, r) -> PowerLawFit:
    """Fit ``R = A S**gamma`` by OLS in log-log space.

    Articles with ``R <= 0`` carry no information and those with ``S == 0``
    have no logarithm; both are dropped and counted.
    """
    s = np.asarray(s, dtype=float)
    r = np.asarray(r, dtype=float)
    if s.shape != r.shape:
        raise ValueError("s and r must have the same length")
    keep_r = r > 0
    keep = keep_r & (s > 0)
    n = int(keep.sum())
    if n < 3:
        raise ValueError(f"need at least 3 usable articles, got {n}")
    ls, lr = np.log(s[keep]), np.log(r[keep])
    if np.ptp(ls) == 0:
        raise ValueError("regressor has zero variance")
    res = ols(np.column_stack([np.ones(n), ls]), lr)
    k = 3
    return PowerLawFit(
        log_A=float(res.params[0]),
        gamma=float(res.params[1]),
        std_err_log_A=float(res.std_err[0]),
        std_err_gamma=float(res.std_err[1]),
        p_log_A=float(res.p_values[0]),
        p_gamma=float(res.p_values[1]),
        t_gamma=float(res.t_values[1]),
        ci_log_A=tuple(float(v) for v in res.conf_int[0]),
        ci_gamma=tuple(float(v) for v in res.conf_int[1]),
        r2=res.r2,
        r2_adjusted=res.r2_adjusted,
        aic=gaussian_aic(res.rss, n, k),
        rss=res.rss,
        n_params=k,
        n_articles=n,
        residuals=res.residuals,
        s=s[keep],
        r=r[keep],
        n_dropped_zero_r=int((~keep_r).sum()),
        n_dropped_zero_s=int((keep_r & ~(s > 0)).sum()),
    )


def fit_power_law(aggregates) -> PowerLawFit:
    r, s = _arrays(aggregates)
    return power_law_ols(s, r)


def null_linear_ols(s, r) -> NullLinearFit:
    """Fit ``R = beta0 + beta1 S``; ``S == 0`` articles are kept."""
    s = np.asarray(s, dtype=float)
    r = np.asarray(r, dtype=float)
    if s.shape != r.shape:
        raise ValueError("s and r must have the same length")
    keep = r > 0
    n = int(keep.sum())
    if n < 3:
        raise ValueError(f"need at least 3 usable articles, got {n}")
    if np.ptp(s[keep]) == 0:
        raise ValueError("regressor has zero variance")
    res = ols(np.column_stack([np.ones(n), s[keep]]), r[keep])
    k = 3
    return NullLinearFit(
        beta0=float(res.params[0]),
        beta1=float(res.params[1]),
        std_err_beta0=float(res.std_err[0]),
        std_err_beta1=float(res.std_err[1]),
        p_beta0=float(res.p_values[0]),
        p_beta1=float(res.p_values[1]),
        ci_beta0=tuple(float(v) for v in res.conf_int[0]),
        ci_beta1=tuple(float(v) for v in res.conf_int[1]),
        r2=res.r2,
        r2_adjusted=res.r2_adjusted,
        aic=gaussian_aic(res.rss, n, k),
        rss=res.rss,
        n_params=k,
        n_articles=n,
        residuals=res.residuals,
        s=s[keep],
        r=r[keep],
        n_dropped_zero_r=int((~keep).sum()),
    )


def fit_null_linear(aggregates) -> NullLinearFit:
    r, s = _arrays(aggregates)
    return null_linear_ols(s, r)


def correlate_x_beta(pairs) -> LinearFit:
    """Regress estimated strategies on estimated costs, ``x = a0 + a1 beta``.

    ``pairs`` is a sequence of ``(x_hat, beta_hat)``.
    """
    arr = np.asarray(list(pairs), dtype=float).reshape(-1, 2)
    if arr.shape[0] < 3:
        raise ValueError(f"need at least 3 (x_hat, beta_hat) pairs, got {arr.shape[0]}")
    x, b = arr[:, 0], arr[:, 1]
    if np.ptp(b) == 0:
        raise ValueError("regressor has zero variance")
    res = ols(np.column_stack([np.ones_like(b), b]), x)
    return LinearFit(
        intercept=float(res.params[0]),
        slope=float(res.params[1]),
        std_errs=(float(res.std_err[0]), float(res.std_err[1])),
        t_stats=(float(res.t_values[0]), float(res.t_values[1])),
        p_values=(float(res.p_values[0]), float(res.p_values[1])),
        conf_int=(tuple(res.conf_int[0]), tuple(res.conf_int[1])),
        r2=res.r2,
        r2_adjusted=res.r2_adjusted,
        n=res.n,
        residuals=res.residuals,
    )


__all__ = [
    "LinearFit",
    "NullLinearFit",
    "OlsResult",
    "PowerLawFit",
    "correlate_x_beta",
    "fit_null_linear",
    "fit_power_law",
    "gaussian_aic",
    "null_linear_ols",
    "ols",
    "power_law_ols",
]
