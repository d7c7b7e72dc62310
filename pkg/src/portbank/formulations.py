"""Objective functions and constraint residuals as pure functions of weights.

Every function accepts either a plain array of weights or a ``WeightVector``.
Covariances are taken from ``MarketEstimates`` (already PSD-conditioned).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, ZeroVariancePortfolio
from .marketdata import MarketEstimates

Array = np.ndarray

BUDGET_TOL = 1e-8   # |sum(x) - 1| tolerance for budget feasibility
INEQ_TOL = 1e-9     # slack tolerance for inequality constraints


@dataclass(frozen=True)
class WeightVector:
    """Candidate portfolio weights with optional provenance."""

    x: Array
    agent_id: str | None = None

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        object.__setattr__(self, "x", x)
        if x.ndim != 1:
            raise DimensionMismatch(f"weights must be a vector, got shape {x.shape}")
        if not np.all(np.isfinite(x)):
            raise ValueError("weights must be finite")

    def is_long_only(self, tol: float = INEQ_TOL) -> bool:
        return bool(np.all(self.x >= -tol) and np.all(self.x <= 1.0 + tol))

    def is_budget_feasible(self, tol: float = BUDGET_TOL) -> bool:
        return abs(float(self.x.sum()) - 1.0) <= tol


@dataclass(frozen=True)
class PenaltyParams:
    """Multipliers for the soft return/budget constraints of the global objective."""

    alpha: float
    beta: float
    rp: float

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0:
            raise ValueError("penalty multipliers must be >= 0")


def default_penalty_params(est: MarketEstimates) -> PenaltyParams:
    """alpha = beta = 1000 with the mean asset return as target."""
    return PenaltyParams(alpha=1000.0, beta=1000.0, rp=float(np.mean(est.r)))


@dataclass(frozen=True)
class RobustParams:
    """Budget-of-uncertainty point (gamma, p, q) for the robust formulation."""

    gamma: float
    p: float
    q: Array = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        object.__setattr__(self, "q", np.asarray(self.q, dtype=float))


def as_weights(x) -> Array:
    """Unwrap WeightVector | array-like to a 1-d float array."""
    if isinstance(x, WeightVector):
        return x.x
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1:
        raise DimensionMismatch(f"weights must be a vector, got shape {arr.shape}")
    return arr


def _check_dim(x: Array, n: int) -> None:
    if x.shape[0] != n:
        raise DimensionMismatch(f"weight vector has {x.shape[0]} entries, expected {n}")


def portfolio_variance(x, est: MarketEstimates) -> float:
    """x' Sigma x with the conditioned covariance; always >= 0 up to rounding."""
    w = as_weights(x)
    _check_dim(w, est.n)
    return float(w @ est.cov @ w)


def penalty_objective(
    x, est: MarketEstimates, pp: PenaltyParams, mode: str = "per_asset"
) -> float:
    """Variance plus squared-hinge penalties on return shortfall and budget.

    per_asset penalizes each asset's contribution against the full target:
    sum_i max(0, rp - r_i x_i)^2. portfolio penalizes the aggregate shortfall
    max(0, rp - sum_i r_i x_i)^2 instead.
    """
    w = as_weights(x)
    _check_dim(w, est.n)
    var = portfolio_variance(w, est)
    if mode == "per_asset":
        shortfall = np.maximum(0.0, pp.rp - est.r * w)
        ret_term = float(np.sum(shortfall**2))
    elif mode == "portfolio":
        ret_term = float(max(0.0, pp.rp - float(est.r @ w)) ** 2)
    else:
        raise ValueError(f"unknown penalty mode {mode!r}")
    budget_term = (float(w.sum()) - 1.0) ** 2
    return var + pp.alpha * ret_term + pp.beta * budget_term


def penalty_gradient(
    x, est: MarketEstimates, pp: PenaltyParams, mode: str = "per_asset"
) -> Array:
    """Gradient of penalty_objective (subgradient 0 at the hinge kinks)."""
    w = as_weights(x)
    _check_dim(w, est.n)
    grad = 2.0 * (est.cov @ w)
    if mode == "per_asset":
        shortfall = np.maximum(0.0, pp.rp - est.r * w)
        grad = grad - 2.0 * pp.alpha * shortfall * est.r
    elif mode == "portfolio":
        shortfall = max(0.0, pp.rp - float(est.r @ w))
        grad = grad - 2.0 * pp.alpha * shortfall * est.r
    else:
        raise ValueError(f"unknown penalty mode {mode!r}")
    return grad + 2.0 * pp.beta * (float(w.sum()) - 1.0)


def robust_objective(x, rparams: RobustParams, est: MarketEstimates) -> float:
    """sum_i r_i x_i - gamma * p - sum_i q_i."""
    w = as_weights(x)
    _check_dim(w, est.n)
    q = rparams.q
    if q.shape[0] not in (0, est.n):
        raise DimensionMismatch(f"q has {q.shape[0]} entries, expected {est.n}")
    return float(est.r @ w) - rparams.gamma * rparams.p - float(q.sum())


def robust_feasible(x, rparams: RobustParams, est: MarketEstimates) -> bool:
    """Check p + q_i >= s_i x_i, non-negativity, long-only and budget feasibility."""
    w = as_weights(x)
    _check_dim(w, est.n)
    q = rparams.q if rparams.q.shape[0] else np.zeros(est.n)
    if q.shape[0] != est.n:
        raise DimensionMismatch(f"q has {q.shape[0]} entries, expected {est.n}")
    wv = WeightVector(w)
    return (
        rparams.p >= -INEQ_TOL
        and bool(np.all(q >= -INEQ_TOL))
        and bool(np.all(rparams.p + q >= est.s * w - INEQ_TOL))
        and wv.is_long_only()
        and wv.is_budget_feasible()
    )


def diversification_ratio(x, est: MarketEstimates) -> float:
    """Weighted average volatility over portfolio volatility; >= 1 when long-only."""
    w = as_weights(x)
    _check_dim(w, est.n)
    var = portfolio_variance(w, est)
    if var <= 0.0:
        raise ZeroVariancePortfolio("diversification ratio needs x'Sigma x > 0")
    return float(est.s @ w) / float(np.sqrt(var))


def risk_contributions(x, est: MarketEstimates) -> Array:
    """Per-asset contribution c_i = x_i * (Sigma x)_i; sums to x'Sigma x."""
    w = as_weights(x)
    _check_dim(w, est.n)
    return w * (est.cov @ w)


def erc_objective(x, est: MarketEstimates) -> float:
    """Spread of risk contributions: sum_ij (c_i - c_j)^2, zero iff all equal."""
    c = risk_contributions(x, est)
    n = c.shape[0]
    # sum_ij (c_i - c_j)^2 == 2n * sum((c_i - mean)^2), stable near the optimum
    return float(2.0 * n * np.sum((c - c.mean()) ** 2))


def erc_gradient(x, est: MarketEstimates) -> Array:
    """Gradient of erc_objective via c = x * (Sigma x)."""
    w = as_weights(x)
    _check_dim(w, est.n)
    u = est.cov @ w
    c = w * u
    n = w.shape[0]
    wt = 4.0 * n * c - 4.0 * np.sum(c)
    return wt * u + est.cov @ (wt * w)


def sharpe(x, est: MarketEstimates, rf: float = 0.0) -> float:
    """Excess portfolio return over portfolio volatility."""
    w = as_weights(x)
    _check_dim(w, est.n)
    var = portfolio_variance(w, est)
    if var <= 0.0:
        raise ZeroVariancePortfolio("sharpe ratio needs x'Sigma x > 0")
    return (float(est.r @ w) - rf) / float(np.sqrt(var))
