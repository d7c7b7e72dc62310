import datetime as dt
import math

import numpy as np
import pytest

from portbank.errors import (
    BadDimension,
    DateMisalignment,
    InsufficientHistory,
    MalformedCsv,
    NonMonotonicDates,
    NonPositivePrice,
)
from portbank.marketdata import (
    PriceSeries,
    compute_returns,
    estimate,
    estimate_from_prices,
    load_prices,
    synth_scenario,
    write_prices_csv,
)


def series(asset, closes, start="2020-01-01", sector="X"):
    d0 = dt.date.fromisoformat(start)
    dates = tuple(d0 + dt.timedelta(days=i) for i in range(len(closes)))
    return PriceSeries(asset_id=asset, sector=sector, dates=dates, closes=np.array(closes, float))


class TestLoadPrices:
    def test_basic_parse(self, tmp_path):
        p = tmp_path / "prices.csv"
        p.write_text("date,A\n2020-01-01,100\n2020-01-02,110\n")
        out = load_prices(p)
        assert len(out) == 1
        assert out[0].asset_id == "A"
        assert out[0].sector == "UNKNOWN"
        np.testing.assert_allclose(out[0].closes, [100.0, 110.0])

    def test_sector_map(self, tmp_path):
        p = tmp_path / "prices.csv"
        p.write_text("date,A,B\n2020-01-01,100,50\n2020-01-02,110,51\n")
        smap = tmp_path / "sectors.csv"
        smap.write_text("asset,sector\nA,FMCG\n")
        out = load_prices(p, smap)
        assert out[0].sector == "FMCG"
        assert out[1].sector == "UNKNOWN"

    def test_nonpositive_price(self, tmp_path):
        p = tmp_path / "prices.csv"
        p.write_text("date,A\n2020-01-01,100\n2020-01-02,0\n")
        with pytest.raises(NonPositivePrice):
            load_prices(p)

    def test_short_row_is_malformed(self, tmp_path):
        # one asset column missing a value on some rows, as when one series
        # has a shorter listing history than the rest
        p = tmp_path / "prices.csv"
        header = "date," + ",".join(f"A{i}" for i in range(29))
        full = ",".join(["100"] * 29)
        short = ",".join(["100"] * 28)
        p.write_text(f"{header}\n2020-01-01,{full}\n2020-01-02,{short}\n")
        with pytest.raises(MalformedCsv):
            load_prices(p)

    def test_bad_header(self, tmp_path):
        p = tmp_path / "prices.csv"
        p.write_text("time,A\n2020-01-01,100\n")
        with pytest.raises(MalformedCsv):
            load_prices(p)

    def test_bad_date_cell(self, tmp_path):
        p = tmp_path / "prices.csv"
        p.write_text("date,A\nnot-a-date,100\n")
        with pytest.raises(MalformedCsv):
            load_prices(p)

    def test_non_monotonic_dates(self, tmp_path):
        p = tmp_path / "prices.csv"
        p.write_text("date,A\n2020-01-02,100\n2020-01-01,110\n")
        with pytest.raises(NonMonotonicDates):
            load_prices(p)

    def test_roundtrip_write_load(self, tmp_path):
        prices = synth_scenario("bullish", 4, 40, 3)
        write_prices_csv(prices, tmp_path / "p.csv", tmp_path / "s.csv")
        back = load_prices(tmp_path / "p.csv", tmp_path / "s.csv")
        assert [ps.asset_id for ps in back] == [ps.asset_id for ps in prices]
        assert [ps.sector for ps in back] == [ps.sector for ps in prices]
        for a, b in zip(prices, back):
            np.testing.assert_allclose(a.closes, b.closes, rtol=0, atol=0)


class TestComputeReturns:
    def test_arithmetic_definitional(self):
        rm = compute_returns([series("A", [100, 110])], "arithmetic")
        np.testing.assert_allclose(rm.periods, [[0.10]], atol=1e-15)

    def test_log_return(self):
        rm = compute_returns([series("A", [100, 110])], "log")
        assert rm.periods[0, 0] == pytest.approx(math.log(1.1), abs=1e-12)
        assert rm.periods[0, 0] == pytest.approx(0.0953102, abs=1e-6)

    def test_constant_series_zero(self):
        for kind in ("arithmetic", "log"):
            rm = compute_returns([series("A", [50, 50, 50])], kind)
            np.testing.assert_allclose(rm.periods, [[0.0, 0.0]], atol=1e-15)

    def test_misaligned_dates(self):
        a = series("A", [1, 2, 3])
        b = series("B", [1, 2, 3], start="2020-02-01")
        with pytest.raises(DateMisalignment):
            compute_returns([a, b])

    def test_insufficient_history(self):
        with pytest.raises(InsufficientHistory):
            compute_returns([series("A", [100])])

    def test_log_below_arithmetic(self):
        rng = np.random.default_rng(5)
        closes = 100 * np.cumprod(1 + rng.uniform(-0.05, 0.05, 50))
        arith = compute_returns([series("A", closes)], "arithmetic").periods
        logr = compute_returns([series("A", closes)], "log").periods
        assert np.all(logr <= arith + 1e-15)


class TestEstimate:
    def test_hand_computed_moments(self):
        from portbank.marketdata import ReturnMatrix

        rm = ReturnMatrix(
            assets=("A", "B"),
            periods=np.array([[0.01, 0.03], [0.02, 0.02]]),
            kind="arithmetic",
        )
        est = estimate(rm)
        np.testing.assert_allclose(est.r, [0.02, 0.02], atol=1e-12)
        assert est.s[0] == pytest.approx(0.0141421, abs=1e-6)
        assert est.s[1] == pytest.approx(0.0, abs=1e-12)
        # zero-variance pair: 0/0 correlation defined as 0 off-diagonal
        assert est.corr[0, 1] == 0.0
        assert est.corr[0, 0] == 1.0

    def test_perfect_correlation(self):
        periods = np.array([[0.01, -0.02, 0.03], [0.01, -0.02, 0.03]])
        from portbank.marketdata import ReturnMatrix

        est = estimate(ReturnMatrix(assets=("A", "B"), periods=periods, kind="arithmetic"))
        assert est.corr[0, 1] == pytest.approx(1.0, abs=1e-12)

    def test_anti_correlation(self):
        periods = np.array([[0.01, -0.02, 0.03], [-0.01, 0.02, -0.03]])
        from portbank.marketdata import ReturnMatrix

        est = estimate(ReturnMatrix(assets=("A", "B"), periods=periods, kind="arithmetic"))
        assert est.corr[0, 1] == pytest.approx(-1.0, abs=1e-12)

    def test_unbiased_divisor(self):
        # 3 observations -> divisor 2
        periods = np.array([[0.0, 0.01, 0.02]])
        from portbank.marketdata import ReturnMatrix

        est = estimate(ReturnMatrix(assets=("A",), periods=periods, kind="arithmetic"))
        expected = ((0.01) ** 2 + 0.0 + (0.01) ** 2) / 2
        assert est.cov[0, 0] == pytest.approx(expected, rel=1e-12)

    def test_insufficient_observations(self):
        from portbank.marketdata import ReturnMatrix

        rm = ReturnMatrix(assets=("A",), periods=np.array([[0.01]]), kind="arithmetic")
        with pytest.raises(InsufficientHistory):
            estimate(rm)

    def test_invariants_on_synthetic(self, bearish_estimates):
        est = bearish_estimates
        assert np.max(np.abs(est.cov - est.cov.T)) <= 1e-12
        np.testing.assert_allclose(est.s, np.sqrt(np.diag(est.cov)), atol=1e-10)
        assert np.all(np.diag(est.corr) == 1.0)
        assert np.all(est.corr >= -1.0) and np.all(est.corr <= 1.0)
        rng = np.random.default_rng(0)
        X = rng.standard_normal((1000, est.n))
        quad = np.einsum("pi,ij,pj->p", X, est.cov, X)
        assert np.all(quad >= -1e-12)

    def test_permutation_invariance(self):
        rng = np.random.default_rng(3)
        closes = 100 * np.cumprod(1 + rng.uniform(-0.03, 0.03, (4, 30)), axis=1)
        prices = [series(f"A{i}", closes[i]) for i in range(4)]
        est = estimate_from_prices(prices)
        perm = [2, 0, 3, 1]
        est_p = estimate_from_prices([prices[i] for i in perm])
        np.testing.assert_allclose(est_p.r, est.r[perm], atol=1e-15)
        np.testing.assert_allclose(est_p.s, est.s[perm], atol=1e-15)
        np.testing.assert_allclose(est_p.cov, est.cov[np.ix_(perm, perm)], atol=1e-15)


class TestSynthScenario:
    def test_bearish_statistics(self):
        est = estimate_from_prices(synth_scenario("bearish", 29, 250, 7))
        assert int(np.sum(est.r < 0)) >= 23

    def test_bullish_statistics(self):
        est = estimate_from_prices(synth_scenario("bullish", 29, 250, 7))
        assert int(np.sum(est.r > 0)) >= 23

    def test_deterministic(self):
        a = synth_scenario("bearish", 5, 40, 11)
        b = synth_scenario("bearish", 5, 40, 11)
        for x, y in zip(a, b):
            np.testing.assert_array_equal(x.closes, y.closes)

    def test_kinds_differ_for_same_seed(self):
        a = synth_scenario("bearish", 5, 40, 11)
        b = synth_scenario("bullish", 5, 40, 11)
        assert not np.array_equal(a[0].closes, b[0].closes)

    def test_bad_dimension(self):
        with pytest.raises(BadDimension):
            synth_scenario("bearish", 1, 250, 0)
        with pytest.raises(BadDimension):
            synth_scenario("bullish", 5, 10, 0)

    def test_sector_labels_assigned(self):
        prices = synth_scenario("bullish", 10, 40, 0)
        assert all(ps.sector for ps in prices)
        assert len({ps.sector for ps in prices}) > 1
