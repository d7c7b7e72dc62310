"""Portfolio optimization with a bank of solver-agent solutions and a
bank-guided simulated-annealing super-agent."""

from . import acor, benchfns, detsolvers, errors, formulations, marketdata, pipeline, solutionbank, superagent
from .acor import AcoConfig, aco_minimize
from .detsolvers import (
    LpProblem,
    QpProblem,
    SolveReport,
    markowitz_sweep,
    project_simplex_box,
    robust_sweep,
    solve_erc,
    solve_ew,
    solve_gmv,
    solve_lp,
    solve_markowitz,
    solve_mdp_dr,
    solve_mdp_rw,
    solve_qp,
    solve_robust,
)
from .formulations import (
    PenaltyParams,
    RobustParams,
    WeightVector,
    default_penalty_params,
    diversification_ratio,
    erc_objective,
    penalty_objective,
    portfolio_variance,
    risk_contributions,
    robust_feasible,
    robust_objective,
    sharpe,
)
from .marketdata import (
    MarketEstimates,
    PriceSeries,
    ReturnMatrix,
    compute_returns,
    estimate,
    estimate_from_prices,
    load_prices,
    synth_scenario,
)
from .pipeline import AgentSpec, RunReport, default_roster, run_agents, run_pipeline
from .solutionbank import BankEntry, SolutionBank
from .superagent import AnnealingConfig, AnnealingTrace, anneal, metropolis_accept, temperature_schedule

__version__ = "0.1.0"
