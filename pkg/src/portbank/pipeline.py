"""End-to-end orchestration: run the agent roster, build the bank, anneal,
and emit reports plus plot-ready CSV files.

The default roster is one Markowitz sweep per start mode (15 targets each),
a budget-of-uncertainty sweep at increment 0.5, the five risk-based
strategies, and a 10-solution ant-colony run on the penalty objective. Agent
parameter names from the solver tables (MMPT_NUM_POINTS,
ROBUST_GAMMA_INCREMENT, NUM_SOLUTIONS_ACO) are accepted as aliases.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import acor, benchfns, detsolvers, marketdata, superagent
from .errors import BadConfig, EmptyBank, IoFailure, PortbankError, StageError
from .formulations import (
    PenaltyParams,
    default_penalty_params,
    penalty_objective,
    portfolio_variance,
    sharpe,
)
from .marketdata import MarketEstimates
from .solutionbank import BankEntry, SolutionBank

log = logging.getLogger(__name__)

Array = np.ndarray

AGENT_KINDS = (
    "markowitz_single",
    "markowitz_multi",
    "robust",
    "ew",
    "gmv",
    "mdp_dr",
    "mdp_rw",
    "erc",
    "aco",
)

_CLASS_BY_KIND = {
    "markowitz_single": "deterministic",
    "markowitz_multi": "deterministic",
    "robust": "domain",
    "ew": "domain",
    "gmv": "domain",
    "mdp_dr": "domain",
    "mdp_rw": "domain",
    "erc": "domain",
    "aco": "stochastic",
}

_PARAM_ALIASES = {
    "MMPT_NUM_POINTS": "num_points",
    "ROBUST_GAMMA_INCREMENT": "increment",
    "NUM_SOLUTIONS_ACO": "num_solutions",
}


@dataclass(frozen=True)
class AgentSpec:
    """Declarative description of one solver agent."""

    id: str
    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in AGENT_KINDS:
            raise BadConfig(f"unknown agent kind {self.kind!r}")
        params = {_PARAM_ALIASES.get(k, k): v for k, v in self.params.items()}
        object.__setattr__(self, "params", params)
        if self.kind in ("markowitz_single", "markowitz_multi"):
            if params.get("num_points", 15) < 2:
                raise BadConfig(f"{self.id}: num_points must be >= 2")
        if self.kind == "robust" and params.get("increment", 0.5) <= 0:
            raise BadConfig(f"{self.id}: increment must be > 0")
        if self.kind == "aco":
            if params.get("num_solutions", 10) < 1:
                raise BadConfig(f"{self.id}: num_solutions must be >= 1")
            if params.get("iterations", 2000) < 1:
                raise BadConfig(f"{self.id}: iterations must be >= 1")


def default_roster() -> list[AgentSpec]:
    return [
        AgentSpec("A1", "markowitz_single", {"num_points": 15}),
        AgentSpec("A2", "markowitz_multi", {"num_points": 15, "starts": 16}),
        AgentSpec("A3", "robust", {"increment": 0.5}),
        AgentSpec("A4", "ew"),
        AgentSpec("A5", "gmv"),
        AgentSpec("A6", "mdp_dr"),
        AgentSpec("A7", "mdp_rw"),
        AgentSpec("A8", "erc"),
        AgentSpec("A9", "aco", {"num_solutions": 10}),
    ]


def _run_one_agent(
    spec: AgentSpec, est: MarketEstimates, penalty: PenaltyParams, penalty_mode: str
) -> list[tuple[Array, dict, float]]:
    """Returns (weights, per-solution params, source objective) triples."""
    kind, params = spec.kind, spec.params
    if kind in ("markowitz_single", "markowitz_multi"):
        starts = int(params.get("starts", 16 if kind == "markowitz_multi" else 1))
        reports = detsolvers.markowitz_sweep(
            est, int(params.get("num_points", 15)), starts=starts, seed=int(params.get("seed", 0))
        )
        targets = np.linspace(float(np.min(est.r)), float(np.max(est.r)), len(reports))
        return [
            (rep.x.x, {"rp_index": i, "rp": float(t)}, rep.objective)
            for i, (rep, t) in enumerate(zip(reports, targets))
        ]
    if kind == "robust":
        increment = float(params.get("increment", 0.5))
        reports = detsolvers.robust_sweep(est, increment)
        return [
            (rep.x.x, {"gamma": k * increment}, rep.objective)
            for k, rep in enumerate(reports)
        ]
    if kind == "ew":
        x = detsolvers.solve_ew(est.n).x
        return [(x, {}, portfolio_variance(x, est))]
    if kind == "gmv":
        rep = detsolvers.solve_gmv(est)
        return [(rep.x.x, {}, rep.objective)]
    if kind == "mdp_dr":
        rep = detsolvers.solve_mdp_dr(est, seed=int(params.get("seed", 0)))
        return [(rep.x.x, {}, rep.objective)]
    if kind == "mdp_rw":
        rep = detsolvers.solve_mdp_rw(est)
        return [(rep.x.x, {}, rep.objective)]
    if kind == "erc":
        rep = detsolvers.solve_erc(est, seed=int(params.get("seed", 0)))
        return [(rep.x.x, {}, rep.objective)]
    if kind == "aco":
        cfg = acor.AcoConfig(
            archive_size=int(params.get("archive_size", 50)),
            locality=float(params.get("locality", 1e-4)),
            evaporation=float(params.get("evaporation", 0.85)),
            ants_per_iter=int(params.get("ants_per_iter", 2)),
            max_iters=int(params.get("iterations", 2000)),
            seed=int(params.get("seed", 0)),
            num_bank_solutions=int(params.get("num_solutions", 10)),
            warm_start_ew=bool(params.get("warm_start_ew", False)),
        )
        bounds = np.tile([0.0, 1.0], (est.n, 1))

        def objective(x):
            return penalty_objective(x, est, penalty, mode=penalty_mode)

        best = acor.aco_minimize(objective, bounds, cfg)
        return [(x, {"rank": j}, value) for j, (x, value) in enumerate(best)]
    raise BadConfig(f"unknown agent kind {kind!r}")


def run_agents(
    est: MarketEstimates,
    roster: list[AgentSpec] | None = None,
    penalty: PenaltyParams | None = None,
    penalty_mode: str = "per_asset",
) -> tuple[SolutionBank, list[dict]]:
    """Execute every agent in order and collect solutions into a fresh bank.

    Per-agent failures are recorded in the summaries and the run continues;
    an entirely empty bank raises EmptyBank.
    """
    if roster is None:
        roster = default_roster()
    if not roster:
        raise BadConfig("agent roster is empty")
    if penalty is None:
        penalty = default_penalty_params(est)
    bank = SolutionBank(est.n)
    summaries = []
    for spec in roster:
        summary = {"id": spec.id, "kind": spec.kind, "solutions": 0, "duplicates": 0}
        try:
            solutions = _run_one_agent(spec, est, penalty, penalty_mode)
        except PortbankError as exc:
            log.warning("agent %s failed: %s", spec.id, exc)
            summary["error"] = str(exc)
            summaries.append(summary)
            continue
        for x, sol_params, objective in solutions:
            entry = BankEntry(
                x=np.clip(x, 0.0, 1.0),
                agent_id=spec.id,
                agent_class=_CLASS_BY_KIND[spec.kind],
                params=sol_params,
                source_objective=float(objective),
            )
            if bank.add(entry):
                summary["solutions"] += 1
            else:
                summary["duplicates"] += 1
        summaries.append(summary)
    if len(bank) == 0:
        raise EmptyBank("no agent produced a solution")
    return bank, summaries


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

def load_config(path) -> dict:
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise BadConfig(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise BadConfig(f"config {path} is not valid JSON: {exc}") from exc
    if "data" not in cfg:
        raise BadConfig("config needs a 'data' section")
    data = cfg["data"]
    if "synth" not in data and "prices" not in data:
        raise BadConfig("data section needs either 'prices' or 'synth'")
    for spec_dict in cfg.get("agents", []):
        AgentSpec(
            id=spec_dict.get("id", spec_dict.get("kind", "?")),
            kind=spec_dict.get("kind", ""),
            params=spec_dict.get("params", {}),
        )
    return cfg


def roster_from_config(cfg: dict) -> list[AgentSpec] | None:
    if "agents" not in cfg:
        return None
    return [
        AgentSpec(
            id=d.get("id", d.get("kind", f"agent{i}")),
            kind=d.get("kind", ""),
            params=d.get("params", {}),
        )
        for i, d in enumerate(cfg["agents"])
    ]


# ---------------------------------------------------------------------------
# the full pipeline
# ---------------------------------------------------------------------------

@dataclass
class RunReport:
    """Everything a run produces, ready for JSON serialization."""

    weights_raw: list
    weights_projected: list
    assets: list
    sector_weights: dict
    portfolio: dict
    best_objective: float
    bank_size: int
    duplicates_dropped: int
    sa_trials: int
    inclinations: list
    agent_summaries: list
    trace_file: str
    bank_file: str
    seed: int

    def to_json(self) -> str:
        return json.dumps(self.__dict__, indent=2, sort_keys=True)


def _stage(name, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except PortbankError as exc:
        raise StageError(name, exc) from exc


def run_pipeline(config_path, seed: int | None = None, out: str | None = None) -> RunReport:
    """ingest -> estimate -> agents -> anneal -> report, writing all artifacts.

    `seed` overrides the scenario, ACO and annealing seeds in one go; `out`
    overrides the configured output directory.
    """
    cfg = _stage("config", load_config, config_path)
    out_dir = Path(out if out is not None else cfg.get("output_dir", "portbank_out"))
    out_dir.mkdir(parents=True, exist_ok=True)

    def ingest():
        data = cfg["data"]
        if "synth" in data:
            synth = data["synth"]
            return marketdata.synth_scenario(
                synth.get("kind", "bearish"),
                int(synth.get("n", 29)),
                int(synth.get("T", 250)),
                int(seed if seed is not None else synth.get("seed", 0)),
            )
        return marketdata.load_prices(data["prices"], data.get("sectors"))

    prices = _stage("ingest", ingest)
    est = _stage("estimate", marketdata.estimate_from_prices, prices)

    penalty_cfg = cfg.get("penalty", {})
    rp = penalty_cfg.get("rp", "mean")
    penalty = PenaltyParams(
        alpha=float(penalty_cfg.get("alpha", 1000.0)),
        beta=float(penalty_cfg.get("beta", 1000.0)),
        rp=float(np.mean(est.r)) if rp == "mean" else float(rp),
    )
    penalty_mode = penalty_cfg.get("mode", "per_asset")

    roster = roster_from_config(cfg)
    if seed is not None and roster is None:
        roster = default_roster()
    if seed is not None:
        roster = [
            AgentSpec(s.id, s.kind, {**s.params, "seed": seed}) if s.kind == "aco" else s
            for s in roster
        ]
    bank, summaries = _stage("agents", run_agents, est, roster, penalty, penalty_mode)
    bank.reset_hits()
    bank_file = out_dir / "bank.json"
    _stage("agents", bank.save, bank_file)

    sa_cfg = dict(cfg.get("sa", {}))
    if seed is not None:
        sa_cfg["seed"] = seed
    try:
        annealing = superagent.AnnealingConfig(**sa_cfg)
    except TypeError as exc:
        raise StageError("anneal", BadConfig(f"bad sa section: {exc}")) from exc

    def objective(x):
        return penalty_objective(x, est, penalty, mode=penalty_mode)

    best, trace = _stage("anneal", superagent.anneal, objective, bank, annealing)
    trace_file = out_dir / "trace.csv"
    _stage("anneal", trace.write_csv, trace_file)

    projected = detsolvers.project_simplex_box(best.x)
    sectors = est.sectors if est.sectors else ("UNKNOWN",) * est.n
    sector_weights: dict[str, float] = {}
    for sec, w in zip(sectors, projected):
        sector_weights[sec] = sector_weights.get(sec, 0.0) + float(w)

    variance = portfolio_variance(projected, est)
    report = RunReport(
        weights_raw=[float(v) for v in best.x],
        weights_projected=[float(v) for v in projected],
        assets=list(est.assets),
        sector_weights={k: sector_weights[k] for k in sorted(sector_weights)},
        portfolio={
            "return": float(est.r @ projected),
            "variance": variance,
            "volatility": float(np.sqrt(variance)),
            "sharpe": sharpe(projected, est, rf=0.0),
        },
        best_objective=trace.best_objective,
        bank_size=len(bank),
        duplicates_dropped=bank.duplicates_dropped,
        sa_trials=len(trace),
        inclinations=[
            {"agent_id": aid, "params": key, "hits": hits}
            for (aid, key), hits in sorted(bank.inclinations().items())
        ],
        agent_summaries=summaries,
        trace_file=trace_file.name,
        bank_file=bank_file.name,
        seed=int(seed if seed is not None else sa_cfg.get("seed", 0)),
    )

    def write_report():
        try:
            (out_dir / "report.json").write_text(report.to_json())
        except OSError as exc:
            raise IoFailure(str(exc)) from exc
        emit_plots(report, est, out_dir)

    _stage("report", write_report)
    return report


def write_market_csvs(est: MarketEstimates, out_dir, assets=None) -> None:
    """Write risk_return.csv and correlation.csv for an estimate set."""
    out_dir = Path(out_dir)
    if assets is None:
        assets = list(est.assets) if est.assets else [f"A{i + 1:02d}" for i in range(est.n)]
    try:
        with open(out_dir / "risk_return.csv", "w") as fh:
            fh.write("asset,return,risk\n")
            for name, r, s in zip(assets, est.r, est.s):
                fh.write(f"{name},{float(r)!r},{float(s)!r}\n")
        with open(out_dir / "correlation.csv", "w") as fh:
            fh.write("asset," + ",".join(assets) + "\n")
            for name, row in zip(assets, est.corr):
                fh.write(name + "," + ",".join(repr(float(v)) for v in row) + "\n")
    except OSError as exc:
        raise IoFailure(f"cannot write market CSVs under {out_dir}: {exc}") from exc


def emit_plots(report: RunReport, est: MarketEstimates, out_dir) -> None:
    """Write the plot-ready CSVs: risk/return, correlation, inclinations,
    sector weights."""
    out_dir = Path(out_dir)
    assets = report.assets if report.assets else None
    write_market_csvs(est, out_dir, assets)
    try:
        with open(out_dir / "inclinations.csv", "w") as fh:
            fh.write("agent_id,params,hits\n")
            for item in report.inclinations:
                fh.write(f"{item['agent_id']},{item['params']},{item['hits']}\n")
        with open(out_dir / "weights_by_sector.csv", "w") as fh:
            fh.write("sector,weight\n")
            for sector, weight in report.sector_weights.items():
                fh.write(f"{sector},{weight!r}\n")
    except OSError as exc:
        raise IoFailure(f"cannot write plot files under {out_dir}: {exc}") from exc


# ---------------------------------------------------------------------------
# benchmark harness
# ---------------------------------------------------------------------------

def run_bench(seed: int = 0, dims=(2, 5)) -> list[dict]:
    """Exercise ACO and the annealer on the benchmark suite.

    The annealer searches the unit cube mapped affinely onto each function's
    domain, seeded with a small random bank.
    """
    rows = []
    for f in benchfns.suite(dims=dims):
        lo, hi = f.bounds[:, 0], f.bounds[:, 1]

        aco_cfg = acor.AcoConfig(max_iters=2000, seed=seed, num_bank_solutions=1)
        aco_best = acor.aco_minimize(lambda x: benchfns.evaluate(f, x), f.bounds, aco_cfg)[0]
        rows.append(
            {"function": f.name, "dim": f.dim, "optimizer": "aco", "best": aco_best[1]}
        )

        def unit_objective(u):
            return benchfns.evaluate(f, lo + u * (hi - lo))

        rng = np.random.default_rng(seed)
        bank = SolutionBank(f.dim)
        for j in range(8):
            bank.add(
                BankEntry(
                    x=rng.random(f.dim),
                    agent_id=f"seed{j}",
                    agent_class="stochastic",
                )
            )
        sa_cfg = superagent.AnnealingConfig(seed=seed, noise_scale=0.5)
        best, _ = superagent.anneal(unit_objective, bank, sa_cfg)
        rows.append(
            {
                "function": f.name,
                "dim": f.dim,
                "optimizer": "sa",
                "best": unit_objective(best.x),
            }
        )
    return rows
