"""Residual diagnostics: moments, Jarque-Bera, Q-Q pairs, histogram bins."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats


@dataclass
class ResidualDiagnostics:
    n: int
    mean: float
    std: float
    skewness: float
    excess_kurtosis: float
    jarque_bera_stat: float
    jarque_bera_p: float
    qq_points: np.ndarray

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "mean": self.mean,
            "std": self.std,
            "skewness": self.skewness,
            "excess_kurtosis": self.excess_kurtosis,
            "jarque_bera_stat": self.jarque_bera_stat,
            "jarque_bera_p": self.jarque_bera_p,
        }


def _residuals(fit_or_residuals) -> np.ndarray:
    resid = getattr(fit_or_residuals, "residuals", fit_or_residuals)
    return np.asarray(resid, dtype=float).reshape(-1)


def jarque_bera(resid) -> tuple[float, float, float, float]:
    """Classical Jarque-Bera test from the biased sample moments.

    Returns ``(statistic, p_value, skewness, kurtosis)`` with the plain
    (non-excess) kurtosis; the p-value comes from chi-squared with 2 dof.
    """
    resid = _residuals(resid)
    n = resid.size
    d = resid - resid.mean()
    m2 = np.mean(d**2)
    if m2 <= 0:
        raise ValueError("residuals have zero variance")
    skew = np.mean(d**3) / m2**1.5
    kurt = np.mean(d**4) / m2**2
    jb = n * (skew**2 / 6.0 + (kurt - 3.0) ** 2 / 24.0)
    return float(jb), float(stats.chi2.sf(jb, 2)), float(skew), float(kurt)


def qq_points(resid) -> np.ndarray:
    """Pairs of (standard normal quantile at (i - 0.5)/n, sorted residual)."""
    resid = np.sort(_residuals(resid))
    n = resid.size
    theo = stats.norm.ppf((np.arange(1, n + 1) - 0.5) / n)
    return np.column_stack([theo, resid])


def residual_diagnostics(fit_or_residuals) -> ResidualDiagnostics:
    resid = _residuals(fit_or_residuals)
    if resid.size < 8:
        raise ValueError(f"need at least 8 residuals, got {resid.size}")
    jb, p, skew, kurt = jarque_bera(resid)
    return ResidualDiagnostics(
        n=int(resid.size),
        mean=float(resid.mean()),
        std=float(resid.std(ddof=1)),
        skewness=skew,
        excess_kurtosis=kurt - 3.0,
        jarque_bera_stat=jb,
        jarque_bera_p=p,
        qq_points=qq_points(resid),
    )


def residual_histogram(fit_or_residuals, bins="auto") -> tuple[np.ndarray, np.ndarray]:
    """Histogram edges and counts of the residuals."""
    counts, edges = np.histogram(_residuals(fit_or_residuals), bins=bins)
    return edges, counts
