import numpy as np
import pytest

from conftest import make_estimates, random_estimates
from portbank.errors import DimensionMismatch, ZeroVariancePortfolio
from portbank.formulations import (
    PenaltyParams,
    RobustParams,
    WeightVector,
    default_penalty_params,
    diversification_ratio,
    erc_gradient,
    erc_objective,
    penalty_gradient,
    penalty_objective,
    portfolio_variance,
    risk_contributions,
    robust_feasible,
    robust_objective,
    sharpe,
)


def central_diff(f, x, h=1e-6):
    g = np.zeros_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (f(x + e) - f(x - e)) / (2 * h)
    return g


class TestPortfolioVariance:
    def test_basis_vector(self):
        est = make_estimates([[0.04, 0.01], [0.01, 0.09]])
        assert portfolio_variance([1.0, 0.0], est) == pytest.approx(0.04, abs=1e-15)

    def test_zero_vector(self):
        est = make_estimates(np.eye(3))
        assert portfolio_variance(np.zeros(3), est) == 0.0

    def test_hand_expansion(self):
        est = make_estimates([[0.04, 0.0], [0.0, 0.01]])
        assert portfolio_variance([0.5, 0.5], est) == pytest.approx(0.0125, abs=1e-15)

    def test_dimension_mismatch(self):
        est = make_estimates(np.eye(3))
        with pytest.raises(DimensionMismatch):
            portfolio_variance([0.5, 0.5], est)

    def test_double_sum_equivalence(self):
        # scalar form sum_ij x_i x_j s_i s_j rho_ij vs the quadratic form
        rng = np.random.default_rng(0)
        est = random_estimates(6, seed=1, daily_scale=True)
        outer = np.outer(est.s, est.s) * est.corr
        for _ in range(100):
            x = rng.uniform(0, 1, 6)
            double_sum = float(x @ outer @ x)
            assert portfolio_variance(x, est) == pytest.approx(double_sum, abs=1e-9)


class TestPenaltyObjective:
    def test_budget_penalty_zero_when_feasible(self):
        est = make_estimates(np.zeros((2, 2)), r=[0.0, 0.0])
        pp = PenaltyParams(alpha=0.0, beta=7.0, rp=0.0)
        assert penalty_objective([0.4, 0.6], est, pp) == pytest.approx(0.0, abs=1e-15)

    def test_return_penalty_zero_when_slack(self):
        est = make_estimates(np.zeros((2, 2)), r=[0.5, 0.5])
        pp = PenaltyParams(alpha=3.0, beta=0.0, rp=0.1)
        # every r_i x_i = 0.25 >= rp: per-asset penalty is zero
        assert penalty_objective([0.5, 0.5], est, pp, "per_asset") == pytest.approx(0.0, abs=1e-15)

    def test_hand_value_per_asset(self):
        est = make_estimates(np.zeros((2, 2)), r=[0.1, 0.2])
        pp = PenaltyParams(alpha=1.0, beta=1.0, rp=0.1)
        val = penalty_objective([0.5, 0.5], est, pp, "per_asset")
        assert val == pytest.approx(0.0025, abs=1e-12)

    def test_portfolio_mode_differs(self):
        est = make_estimates(np.zeros((2, 2)), r=[0.1, 0.2])
        pp = PenaltyParams(alpha=1.0, beta=1.0, rp=0.1)
        # aggregate return 0.15 >= 0.1: no penalty in portfolio mode
        assert penalty_objective([0.5, 0.5], est, pp, "portfolio") == pytest.approx(0.0, abs=1e-15)

    def test_zero_multipliers_equal_variance_exactly(self):
        rng = np.random.default_rng(2)
        est = random_estimates(5, seed=3)
        pp = PenaltyParams(alpha=0.0, beta=0.0, rp=0.5)
        for _ in range(20):
            x = rng.uniform(0, 1, 5)
            assert penalty_objective(x, est, pp) == portfolio_variance(x, est)

    def test_default_params(self):
        est = random_estimates(4, seed=9)
        pp = default_penalty_params(est)
        assert pp.alpha == 1000.0 and pp.beta == 1000.0
        assert pp.rp == pytest.approx(float(np.mean(est.r)))

    @pytest.mark.parametrize("mode", ["portfolio", "per_asset"])
    def test_gradient_matches_central_differences(self, mode):
        est = random_estimates(5, seed=4, daily_scale=True)
        pp = default_penalty_params(est)
        rng = np.random.default_rng(7)
        checked = 0
        while checked < 50:
            x = rng.uniform(0, 1, 5)
            # stay away from the hinge kink where the derivative jumps
            if mode == "portfolio" and abs(pp.rp - float(est.r @ x)) < 1e-4:
                continue
            if mode == "per_asset" and np.any(np.abs(pp.rp - est.r * x) < 1e-4):
                continue
            f = lambda z: penalty_objective(z, est, pp, mode)
            num = central_diff(f, x)
            ana = penalty_gradient(x, est, pp, mode)
            assert np.max(np.abs(num - ana)) <= 1e-4 * max(1.0, np.max(np.abs(num)))
            checked += 1


class TestRobust:
    def test_nominal_reduction(self):
        est = make_estimates(np.eye(2) * 0.01, r=[0.1, 0.2])
        rp = RobustParams(gamma=0.0, p=5.0, q=np.zeros(2))
        assert robust_objective([0.5, 0.5], rp, est) == pytest.approx(0.15, abs=1e-15)

    def test_substitution_reduction(self):
        est = make_estimates(np.diag([0.05**2, 0.3**2]), r=[0.1, 0.2])
        x = np.array([0.5, 0.5])
        rp = RobustParams(gamma=2.0, p=0.0, q=est.s * x)
        expected = float((est.r - est.s) @ x)
        assert robust_objective(x, rp, est) == pytest.approx(expected, abs=1e-15)

    def test_hand_value(self):
        est = make_estimates(np.diag([0.05**2, 0.3**2]), r=[0.1, 0.2])
        rp = RobustParams(gamma=1.0, p=0.05, q=np.zeros(2))
        assert robust_objective([1.0, 0.0], rp, est) == pytest.approx(0.05, abs=1e-12)

    def test_feasible_dominating_p(self):
        est = make_estimates(np.diag([0.1**2, 0.2**2]), r=[0.1, 0.2])
        x = np.array([0.5, 0.5])
        rp = RobustParams(gamma=1.0, p=float(np.max(est.s * x)), q=np.zeros(2))
        assert robust_feasible(x, rp, est)

    def test_infeasible_when_uncovered(self):
        est = make_estimates(np.diag([0.1**2, 0.2**2]), r=[0.1, 0.2])
        rp = RobustParams(gamma=1.0, p=0.0, q=np.zeros(2))
        assert not robust_feasible([0.5, 0.5], rp, est)

    def test_boundary_feasibility(self):
        est = make_estimates(np.diag([0.1**2, 0.2**2]), r=[0.0, 0.0])
        rp = RobustParams(gamma=1.0, p=0.05, q=np.array([0.0, 0.05]))
        assert robust_feasible([0.5, 0.5], rp, est)


class TestDiversificationRatio:
    def test_single_asset(self):
        est = make_estimates(np.diag([0.04, 0.09]))
        assert diversification_ratio([1.0, 0.0], est) == pytest.approx(1.0, abs=1e-12)

    def test_perfect_correlation_collapses(self):
        s = np.array([0.1, 0.3])
        cov = np.outer(s, s)  # rho == 1
        est = make_estimates(cov)
        rng = np.random.default_rng(0)
        for _ in range(20):
            w = rng.dirichlet(np.ones(2))
            assert diversification_ratio(w, est) == pytest.approx(1.0, abs=1e-9)

    def test_equal_vol_uncorrelated(self):
        est = make_estimates(np.diag([0.01, 0.01]))
        assert diversification_ratio([0.5, 0.5], est) == pytest.approx(np.sqrt(2.0), abs=1e-5)

    def test_zero_variance_raises(self):
        est = make_estimates(np.zeros((2, 2)))
        with pytest.raises(ZeroVariancePortfolio):
            diversification_ratio([0.5, 0.5], est)

    def test_at_least_one_for_long_only(self):
        rng = np.random.default_rng(4)
        for seed in range(10):
            est = random_estimates(5, seed=seed)
            w = rng.dirichlet(np.ones(5))
            assert diversification_ratio(w, est) >= 1.0 - 1e-9


class TestRiskContributions:
    def test_identity_covariance(self):
        est = make_estimates(np.eye(2))
        np.testing.assert_allclose(risk_contributions([0.5, 0.5], est), [0.25, 0.25], atol=1e-15)

    def test_basis_vector(self):
        est = make_estimates([[0.04, 0.01], [0.01, 0.09]])
        np.testing.assert_allclose(risk_contributions([1.0, 0.0], est), [0.04, 0.0], atol=1e-15)

    def test_hand_product(self):
        est = make_estimates([[0.04, 0.01], [0.01, 0.09]])
        c = risk_contributions([0.6, 0.4], est)
        np.testing.assert_allclose(c, [0.0168, 0.0168], atol=1e-12)

    def test_sums_to_variance(self):
        rng = np.random.default_rng(8)
        est = random_estimates(6, seed=2)
        for _ in range(25):
            x = rng.uniform(0, 1, 6)
            assert float(np.sum(risk_contributions(x, est))) == pytest.approx(
                portfolio_variance(x, est), abs=1e-10
            )


class TestErcObjective:
    def test_equal_weights_identity(self):
        est = make_estimates(np.eye(4))
        assert erc_objective(np.full(4, 0.25), est) == pytest.approx(0.0, abs=1e-15)

    def test_corner_hand_value(self):
        est = make_estimates(np.eye(2))
        assert erc_objective([1.0, 0.0], est) == pytest.approx(2.0, abs=1e-12)

    def test_zero_when_contributions_equal(self):
        # x_i proportional to 1/s_i equalizes contributions for diagonal cov
        s = np.array([0.1, 0.2, 0.4])
        est = make_estimates(np.diag(s**2))
        x = (1 / s) / np.sum(1 / s)
        assert erc_objective(x, est) == pytest.approx(0.0, abs=1e-18)

    def test_gradient_matches_central_differences(self):
        est = random_estimates(4, seed=5)
        rng = np.random.default_rng(6)
        for _ in range(10):
            x = rng.uniform(0.1, 1.0, 4)
            num = central_diff(lambda z: erc_objective(z, est), x)
            ana = erc_gradient(x, est)
            assert np.max(np.abs(num - ana)) <= 1e-5 * max(1.0, np.max(np.abs(num)))


class TestSharpe:
    def test_zero_excess(self):
        est = make_estimates(np.diag([0.0025]), r=[0.07])
        assert sharpe([1.0], est, rf=0.07) == pytest.approx(0.0, abs=1e-15)

    def test_direct_ratio(self):
        est = make_estimates(np.diag([0.05**2, 0.1**2]), r=[0.1, 0.0])
        assert sharpe([1.0, 0.0], est, rf=0.0) == pytest.approx(2.0, abs=1e-12)

    def test_linearity_in_excess_return(self):
        est = random_estimates(3, seed=7)
        x = np.array([0.3, 0.3, 0.4])
        base = sharpe(x, est, rf=0.0)
        doubled = make_estimates(est.cov, r=2 * est.r)
        assert sharpe(x, doubled, rf=0.0) == pytest.approx(2 * base, rel=1e-12)

    def test_zero_variance_raises(self):
        est = make_estimates(np.zeros((2, 2)), r=[0.1, 0.1])
        with pytest.raises(ZeroVariancePortfolio):
            sharpe([0.5, 0.5], est)


class TestWeightVector:
    def test_long_only_checks(self):
        assert WeightVector(np.array([0.5, 0.5])).is_long_only()
        assert not WeightVector(np.array([-0.1, 1.1])).is_long_only()
        assert WeightVector(np.array([0.5, 0.5])).is_budget_feasible()
        assert not WeightVector(np.array([0.5, 0.6])).is_budget_feasible()

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            WeightVector(np.array([np.nan, 1.0]))
