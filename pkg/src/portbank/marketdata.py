"""Price ingestion, return/risk estimation and synthetic scenario generation.

Input format is a close-price CSV with header ``date,ASSET1,ASSET2,...``
(ISO-8601 dates, decimal prices) plus an optional sector map CSV with header
``asset,sector``. All estimates are per-period (daily); nothing is annualized.
"""

from __future__ import annotations

import csv
import datetime as dt
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BadDimension,
    DateMisalignment,
    InsufficientHistory,
    MalformedCsv,
    NonMonotonicDates,
    NonPositivePrice,
)

Array = np.ndarray

# Diagonal loading margin used when the sample covariance is indefinite.
PSD_MARGIN = 1e-10

SECTOR_PALETTE = (
    "FMCG",
    "HEALTHCARE",
    "FINANCE",
    "IT",
    "ENERGY",
    "METALS",
    "TRANSPORT",
    "CAPITAL_GOODS",
)


@dataclass(frozen=True)
class PriceSeries:
    """Close prices for one asset over an ordered calendar."""

    asset_id: str
    sector: str
    dates: tuple[dt.date, ...]
    closes: Array

    def __post_init__(self):
        closes = np.asarray(self.closes, dtype=float)
        object.__setattr__(self, "closes", closes)
        if len(self.dates) != closes.shape[0]:
            raise MalformedCsv(
                f"{self.asset_id}: {len(self.dates)} dates vs {closes.shape[0]} closes"
            )
        if np.any(closes <= 0) or not np.all(np.isfinite(closes)):
            raise NonPositivePrice(f"{self.asset_id}: close prices must be positive")
        for a, b in zip(self.dates, self.dates[1:]):
            if b <= a:
                raise NonMonotonicDates(f"{self.asset_id}: {b} does not follow {a}")


@dataclass(frozen=True)
class ReturnMatrix:
    """Per-period returns, one row per asset, T-1 columns."""

    assets: tuple[str, ...]
    periods: Array
    kind: str  # "arithmetic" | "log"

    def __post_init__(self):
        periods = np.atleast_2d(np.asarray(self.periods, dtype=float))
        object.__setattr__(self, "periods", periods)
        if self.kind not in ("arithmetic", "log"):
            raise ValueError(f"unknown return kind {self.kind!r}")
        if periods.shape[0] != len(self.assets):
            raise BadDimension(
                f"{len(self.assets)} assets but {periods.shape[0]} return rows"
            )
        if self.kind == "arithmetic" and np.any(periods <= -1):
            raise ValueError("arithmetic returns must exceed -1")


@dataclass(frozen=True)
class MarketEstimates:
    """Mean returns r, risks s, covariance and correlation for n assets.

    ``cov`` is the sample covariance conditioned to be positive semidefinite;
    ``s`` and ``corr`` are derived from the conditioned matrix so that
    ``s[i] == sqrt(cov[i, i])`` holds exactly.
    """

    r: Array
    s: Array
    cov: Array
    corr: Array
    n: int
    assets: tuple[str, ...] = field(default=())
    sectors: tuple[str, ...] = field(default=())


def _condition_covariance(cov: Array) -> Array:
    """Symmetrize and, if indefinite, add (|lambda_min| + margin) * I."""
    cov = np.asarray(cov, dtype=float)
    cov = 0.5 * (cov + cov.T)
    lam_min = float(np.linalg.eigvalsh(cov)[0])
    if lam_min < 0.0:
        cov = cov + (abs(lam_min) + PSD_MARGIN) * np.eye(cov.shape[0])
    return cov


def load_prices(path, sector_map=None) -> list[PriceSeries]:
    """Read a close-price CSV (and optional ``asset,sector`` map).

    Every data row must carry one price per asset column; assets without a
    sector entry get sector "UNKNOWN".
    """
    sectors: dict[str, str] = {}
    if sector_map is not None:
        with open(sector_map, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or [c.strip().lower() for c in header[:2]] != ["asset", "sector"]:
                raise MalformedCsv(f"{sector_map}: expected header 'asset,sector'")
            for row in reader:
                if len(row) < 2:
                    raise MalformedCsv(f"{sector_map}: short row {row!r}")
                sectors[row[0].strip()] = row[1].strip()

    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or len(header) < 2 or header[0].strip().lower() != "date":
            raise MalformedCsv(f"{path}: expected header 'date,ASSET1,...'")
        assets = [c.strip() for c in header[1:]]
        if any(not a for a in assets):
            raise MalformedCsv(f"{path}: empty asset column name")
        dates: list[dt.date] = []
        rows: list[list[float]] = []
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue  # tolerate trailing blank line
            if len(row) != len(header):
                raise MalformedCsv(f"{path}:{lineno}: expected {len(header)} cells, got {len(row)}")
            try:
                dates.append(dt.date.fromisoformat(row[0].strip()))
            except ValueError as exc:
                raise MalformedCsv(f"{path}:{lineno}: bad date {row[0]!r}") from exc
            try:
                rows.append([float(c) for c in row[1:]])
            except ValueError as exc:
                raise MalformedCsv(f"{path}:{lineno}: bad price cell") from exc

    if not rows:
        raise MalformedCsv(f"{path}: no data rows")
    closes = np.asarray(rows, dtype=float)
    return [
        PriceSeries(
            asset_id=a,
            sector=sectors.get(a, "UNKNOWN"),
            dates=tuple(dates),
            closes=closes[:, j],
        )
        for j, a in enumerate(assets)
    ]


def compute_returns(prices: list[PriceSeries], kind: str = "arithmetic") -> ReturnMatrix:
    """Per-period returns from aligned close-price series.

    arithmetic: (p[t+1] - p[t]) / p[t]; log: ln(p[t+1] / p[t]).
    """
    if not prices:
        raise BadDimension("no price series")
    ref = prices[0].dates
    for ps in prices[1:]:
        if ps.dates != ref:
            raise DateMisalignment(f"{ps.asset_id} dates differ from {prices[0].asset_id}")
    if len(ref) < 2:
        raise InsufficientHistory("need at least 2 price observations")
    closes = np.vstack([ps.closes for ps in prices])
    if kind == "arithmetic":
        periods = closes[:, 1:] / closes[:, :-1] - 1.0
    elif kind == "log":
        periods = np.log(closes[:, 1:] / closes[:, :-1])
    else:
        raise ValueError(f"unknown return kind {kind!r}")
    return ReturnMatrix(
        assets=tuple(ps.asset_id for ps in prices), periods=periods, kind=kind
    )


def estimate(returns: ReturnMatrix, sectors: tuple[str, ...] = ()) -> MarketEstimates:
    """Sample moments of a return matrix.

    Covariance is the unbiased sample estimate (divisor = observations - 1)
    and is conditioned to be positive semidefinite before risks and
    correlations are derived from it. Zero-risk pairs get correlation 0
    off-diagonal.
    """
    periods = returns.periods
    n, t = periods.shape
    if t < 2:
        raise InsufficientHistory("need at least 2 return observations per asset")
    r = periods.mean(axis=1)
    cov = _condition_covariance(np.atleast_2d(np.cov(periods, ddof=1)))
    s = np.sqrt(np.diag(cov))
    denom = np.outer(s, s)
    with np.errstate(divide="ignore", invalid="ignore"):
        corr = np.where(denom > 0.0, cov / np.where(denom > 0.0, denom, 1.0), 0.0)
    corr = np.clip(corr, -1.0, 1.0)
    np.fill_diagonal(corr, 1.0)
    return MarketEstimates(
        r=r, s=s, cov=cov, corr=corr, n=n, assets=returns.assets, sectors=sectors
    )


def estimate_from_prices(
    prices: list[PriceSeries], kind: str = "arithmetic"
) -> MarketEstimates:
    """Convenience path: compute_returns + estimate, keeping sector labels."""
    returns = compute_returns(prices, kind)
    return estimate(returns, sectors=tuple(ps.sector for ps in prices))


def synth_scenario(kind: str, n: int, periods: int, seed: int) -> list[PriceSeries]:
    """Generate synthetic close prices for a bearish or bullish market.

    Returns come from a one-factor model ret = mu + sigma*(l*f + sqrt(1-l^2)*e)
    with factor loadings l chosen so pairwise correlations l_i*l_j land in the
    regime band: >= 0.6 for bearish, [0.2, 0.6] for bullish. 90% of drawn
    means are negative (bearish) or positive (bullish). Deterministic in
    (kind, n, periods, seed).
    """
    if kind not in ("bearish", "bullish"):
        raise ValueError(f"unknown scenario kind {kind!r}")
    if n < 2:
        raise BadDimension("need at least 2 assets")
    if periods < 30:
        raise BadDimension("need at least 30 periods")
    rng = np.random.default_rng([int(seed), 0 if kind == "bearish" else 1])

    n_trend = int(np.ceil(0.9 * n))
    if kind == "bearish":
        mu = np.concatenate(
            [rng.uniform(-0.006, -0.0025, n_trend), rng.uniform(0.0005, 0.002, n - n_trend)]
        )
        loadings = np.sqrt(rng.uniform(0.75, 0.95, n))  # pairwise corr in [0.75, 0.95]
    else:
        mu = np.concatenate(
            [rng.uniform(0.0025, 0.006, n_trend), rng.uniform(-0.002, -0.0005, n - n_trend)]
        )
        loadings = np.sqrt(rng.uniform(0.2, 0.6, n))  # pairwise corr in [0.2, 0.6]
    rng.shuffle(mu)
    sigma = rng.uniform(0.008, 0.02, n)

    factor = rng.standard_normal(periods - 1)
    idio = rng.standard_normal((n, periods - 1))
    shocks = loadings[:, None] * factor[None, :] + np.sqrt(1.0 - loadings**2)[:, None] * idio
    rets = mu[:, None] + sigma[:, None] * shocks
    rets = np.maximum(rets, -0.95)  # keep prices positive under extreme draws

    start_prices = rng.uniform(50.0, 500.0, n)
    closes = start_prices[:, None] * np.cumprod(
        np.hstack([np.ones((n, 1)), 1.0 + rets]), axis=1
    )
    start = dt.date(2020, 1, 1)
    dates = tuple(start + dt.timedelta(days=t) for t in range(periods))
    return [
        PriceSeries(
            asset_id=f"A{j + 1:02d}",
            sector=SECTOR_PALETTE[j % len(SECTOR_PALETTE)],
            dates=dates,
            closes=closes[j],
        )
        for j in range(n)
    ]


def write_prices_csv(prices: list[PriceSeries], path, sector_path=None) -> None:
    """Write series back to the ingestion CSV format (plus optional sector map)."""
    ref = prices[0].dates
    for ps in prices[1:]:
        if ps.dates != ref:
            raise DateMisalignment("cannot write misaligned series to one CSV")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["date"] + [ps.asset_id for ps in prices])
        for t, day in enumerate(ref):
            writer.writerow([day.isoformat()] + [repr(float(ps.closes[t])) for ps in prices])
    if sector_path is not None:
        with open(sector_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["asset", "sector"])
            for ps in prices:
                writer.writerow([ps.asset_id, ps.sector])
