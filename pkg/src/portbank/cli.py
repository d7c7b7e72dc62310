"""Command-line entry points.

Subcommands: synth, estimate, agents, anneal, run, bench, plots.
Exit codes: 0 success, 1 configuration error, 2 stage failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import marketdata, pipeline, superagent
from .errors import BadConfig, PortbankError, StageError
from .formulations import PenaltyParams, penalty_objective
from .solutionbank import SolutionBank


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="portbank", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="write a synthetic bearish/bullish price CSV")
    p.add_argument("--kind", choices=["bearish", "bullish"], default="bearish")
    p.add_argument("--n", type=int, default=29, help="number of assets")
    p.add_argument("--periods", type=int, default=250, help="number of close prices")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=".", help="output directory")

    p = sub.add_parser("estimate", help="estimate return/risk/correlation from prices")
    p.add_argument("--prices", required=True)
    p.add_argument("--sectors")
    p.add_argument("--out", default=".", help="output directory")

    for name, help_text in [
        ("agents", "run the solver agents and write bank.json"),
        ("run", "full pipeline: ingest, estimate, agents, anneal, report"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True)
        p.add_argument("--seed", type=int, help="override scenario/ACO/SA seeds")
        p.add_argument("--out", help="override the configured output directory")

    p = sub.add_parser("anneal", help="anneal against a bank (existing or freshly built)")
    p.add_argument("--config", required=True)
    p.add_argument("--bank", help="reuse a saved bank.json instead of running agents")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="override the configured output directory")

    p = sub.add_parser("bench", help="exercise the optimizers on the benchmark suite")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("plots", help="regenerate plot CSVs from a finished run")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True, help="directory containing report.json")
    return parser


def _cmd_synth(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    prices = marketdata.synth_scenario(args.kind, args.n, args.periods, args.seed)
    marketdata.write_prices_csv(prices, out / "prices.csv", out / "sectors.csv")
    print(f"wrote {out / 'prices.csv'} and {out / 'sectors.csv'} ({args.n} assets)")
    return 0


def _cmd_estimate(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    prices = marketdata.load_prices(args.prices, args.sectors)
    est = marketdata.estimate_from_prices(prices)
    pipeline.write_market_csvs(est, out)
    print(f"estimated {est.n} assets; wrote risk_return.csv and correlation.csv in {out}")
    return 0


def _estimates_from_config(cfg: dict, seed):
    data = cfg["data"]
    if "synth" in data:
        synth = data["synth"]
        prices = marketdata.synth_scenario(
            synth.get("kind", "bearish"),
            int(synth.get("n", 29)),
            int(synth.get("T", 250)),
            int(seed if seed is not None else synth.get("seed", 0)),
        )
    else:
        prices = marketdata.load_prices(data["prices"], data.get("sectors"))
    return marketdata.estimate_from_prices(prices)


def _penalty_from_config(cfg: dict, est) -> tuple[PenaltyParams, str]:
    penalty_cfg = cfg.get("penalty", {})
    rp = penalty_cfg.get("rp", "mean")
    params = PenaltyParams(
        alpha=float(penalty_cfg.get("alpha", 1000.0)),
        beta=float(penalty_cfg.get("beta", 1000.0)),
        rp=float(np.mean(est.r)) if rp == "mean" else float(rp),
    )
    return params, penalty_cfg.get("mode", "per_asset")


def _cmd_agents(args) -> int:
    cfg = pipeline.load_config(args.config)
    out = Path(args.out if args.out else cfg.get("output_dir", "portbank_out"))
    out.mkdir(parents=True, exist_ok=True)
    est = _estimates_from_config(cfg, args.seed)
    penalty, mode = _penalty_from_config(cfg, est)
    roster = pipeline.roster_from_config(cfg)
    bank, summaries = pipeline.run_agents(est, roster, penalty, mode)
    bank.save(out / "bank.json")
    for s in summaries:
        note = f" error={s['error']}" if "error" in s else ""
        print(f"{s['id']:>4} {s['kind']:<18} solutions={s['solutions']} duplicates={s['duplicates']}{note}")
    print(f"bank: {len(bank)} entries -> {out / 'bank.json'}")
    return 0


def _cmd_anneal(args) -> int:
    cfg = pipeline.load_config(args.config)
    out = Path(args.out if args.out else cfg.get("output_dir", "portbank_out"))
    out.mkdir(parents=True, exist_ok=True)
    est = _estimates_from_config(cfg, args.seed)
    penalty, mode = _penalty_from_config(cfg, est)
    if args.bank:
        bank = SolutionBank.load(args.bank)
    else:
        roster = pipeline.roster_from_config(cfg)
        bank, _ = pipeline.run_agents(est, roster, penalty, mode)
    bank.reset_hits()
    sa_cfg = dict(cfg.get("sa", {}))
    if args.seed is not None:
        sa_cfg["seed"] = args.seed
    annealing = superagent.AnnealingConfig(**sa_cfg)
    best, trace = superagent.anneal(
        lambda x: penalty_objective(x, est, penalty, mode=mode), bank, annealing
    )
    trace.write_csv(out / "trace.csv")
    print(f"bank entries: {len(bank)}; trials: {len(trace)}")
    print(f"best objective: {trace.best_objective!r}")
    print(f"trace -> {out / 'trace.csv'}")
    return 0


def _cmd_run(args) -> int:
    report = pipeline.run_pipeline(args.config, seed=args.seed, out=args.out)
    print(json.dumps(report.portfolio, indent=2, sort_keys=True))
    print(f"bank entries: {report.bank_size} (+{report.duplicates_dropped} duplicates dropped)")
    print(f"SA trials: {report.sa_trials}; best objective: {report.best_objective!r}")
    top = max(report.inclinations, key=lambda item: item["hits"], default=None)
    if top:
        print(f"most-inclined agent: {top['agent_id']} [{top['params']}] with {top['hits']} hits")
    return 0


def _cmd_bench(args) -> int:
    rows = pipeline.run_bench(seed=args.seed)
    print(f"{'function':<12} {'dim':>3} {'optimizer':<9} {'best':>12}")
    for row in rows:
        print(f"{row['function']:<12} {row['dim']:>3} {row['optimizer']:<9} {row['best']:>12.3e}")
    return 0


def _cmd_plots(args) -> int:
    cfg = pipeline.load_config(args.config)
    out = Path(args.out)
    report_path = out / "report.json"
    if not report_path.exists():
        raise BadConfig(f"{report_path} not found; run the pipeline first")
    doc = json.loads(report_path.read_text())
    est = _estimates_from_config(cfg, doc.get("seed"))
    report = pipeline.RunReport(**doc)
    pipeline.emit_plots(report, est, out)
    print(f"plot CSVs regenerated in {out}")
    return 0


_COMMANDS = {
    "synth": _cmd_synth,
    "estimate": _cmd_estimate,
    "agents": _cmd_agents,
    "anneal": _cmd_anneal,
    "run": _cmd_run,
    "bench": _cmd_bench,
    "plots": _cmd_plots,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO)
    try:
        return _COMMANDS[args.command](args)
    except StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1 if exc.stage == "config" else 2
    except BadConfig as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except PortbankError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
