import numpy as np
import pytest

from portbank.marketdata import MarketEstimates, _condition_covariance


def make_estimates(cov, r=None) -> MarketEstimates:
    """Build MarketEstimates directly from a covariance matrix (test helper)."""
    cov = _condition_covariance(np.asarray(cov, dtype=float))
    n = cov.shape[0]
    s = np.sqrt(np.diag(cov))
    denom = np.outer(s, s)
    with np.errstate(divide="ignore", invalid="ignore"):
        corr = np.where(denom > 0.0, cov / np.where(denom > 0.0, denom, 1.0), 0.0)
    corr = np.clip(corr, -1.0, 1.0)
    np.fill_diagonal(corr, 1.0)
    if r is None:
        r = np.zeros(n)
    return MarketEstimates(r=np.asarray(r, dtype=float), s=s, cov=cov, corr=corr, n=n)


def random_estimates(n, seed, daily_scale=False) -> MarketEstimates:
    """Well-conditioned random instance; daily_scale mimics daily return units."""
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((n, n))
    cov = A @ A.T / n + 0.2 * np.eye(n)
    r = rng.uniform(0.01, 0.10, n)
    if daily_scale:
        cov *= 1e-4
        r = rng.uniform(-0.002, 0.004, n)
    return make_estimates(cov, r)


def simplex_grid(n, step):
    """All weight vectors on the n-simplex with coordinates in multiples of step."""
    m = int(round(1.0 / step))

    def rec(prefix, remaining, slots):
        if slots == 1:
            yield prefix + [remaining]
            return
        for k in range(remaining + 1):
            yield from rec(prefix + [k], remaining - k, slots - 1)

    return np.array([p for p in rec([], m, n)], dtype=float) * step


@pytest.fixture(scope="session")
def bearish_estimates():
    from portbank.marketdata import estimate_from_prices, synth_scenario

    return estimate_from_prices(synth_scenario("bearish", 29, 250, 7))


@pytest.fixture(scope="session")
def bullish_estimates():
    from portbank.marketdata import estimate_from_prices, synth_scenario

    return estimate_from_prices(synth_scenario("bullish", 29, 250, 7))
