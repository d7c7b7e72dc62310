"""Simulated-annealing super-agent with bank-guided neighbourhood generation.

Each trial moves the current state toward its nearest solution-bank entry by
a random fraction (plus temperature-scaled uniform noise), gated by a 0/1
decision vector, and accepts via the Metropolis rule under a geometric
cooling schedule. The chain starts from the bank entry that scores best
under the global objective, so the best-so-far value can only improve on the
bank's optimum.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import BadConfig, EmptyBank, IoFailure
from .formulations import WeightVector
from .solutionbank import SolutionBank

Array = np.ndarray

STRATEGIES = ("I", "II", "III")


@dataclass(frozen=True)
class AnnealingConfig:
    """Schedule and perturbation parameters for one annealing run.

    Strategy I draws one decision vector per temperature epoch and reuses it
    for every trial in the epoch; II redraws each trial; III perturbs all
    coordinates. eta scales the pull toward the nearest bank entry (eta > 1
    allows overshooting it); noise_scale sets the uniform noise half-width at
    t_max, which shrinks proportionally with temperature.
    """

    t_max: float = 1.0
    t_frozen: float = 1e-4
    cooling_factor: float = 0.95
    trials_per_temp: int = 200
    strategy: str = "III"
    tau: float = 0.5
    eta: float = 1.0
    noise_scale: float = 0.05
    seed: int = 0

    def __post_init__(self):
        if self.t_max <= 0 or self.t_frozen <= 0:
            raise BadConfig("temperatures must be > 0")
        if self.t_frozen > self.t_max:
            raise BadConfig("t_frozen must not exceed t_max")
        if not 0.0 < self.cooling_factor < 1.0:
            raise BadConfig("cooling_factor must be in (0, 1)")
        if self.trials_per_temp < 1:
            raise BadConfig("trials_per_temp must be >= 1")
        if self.strategy not in STRATEGIES:
            raise BadConfig(f"strategy must be one of {STRATEGIES}")
        if not 0.0 <= self.tau <= 1.0:
            raise BadConfig("tau must be in [0, 1]")
        if self.eta <= 0 or self.noise_scale < 0:
            raise BadConfig("eta must be > 0 and noise_scale >= 0")


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    temperature: float
    nearest_index: int
    x: Array
    accepted: bool
    objective: float
    best_objective: float


@dataclass
class AnnealingTrace:
    """Per-trial history of one run plus the incumbent best."""

    records: list[TrialRecord] = field(default_factory=list)
    best_x: Array | None = None
    best_objective: float = float("inf")

    def __len__(self) -> int:
        return len(self.records)

    def write_csv(self, path) -> None:
        try:
            with open(path, "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(
                    ["trial", "temperature", "nearest_entry", "accepted", "objective", "best_objective"]
                )
                for rec in self.records:
                    writer.writerow(
                        [
                            rec.trial,
                            repr(rec.temperature),
                            rec.nearest_index,
                            int(rec.accepted),
                            repr(rec.objective),
                            repr(rec.best_objective),
                        ]
                    )
        except OSError as exc:
            raise IoFailure(f"cannot write trace to {path}: {exc}") from exc


def temperature_schedule(cfg: AnnealingConfig) -> list[float]:
    """Geometric sequence t_max * c^k truncated before dropping below t_frozen."""
    temps = []
    t = cfg.t_max
    while t >= cfg.t_frozen:
        temps.append(t)
        t *= cfg.cooling_factor
    return temps


def decision_vector(
    n: int,
    strategy: str,
    tau: float,
    rng: np.random.Generator,
    epoch_cache: dict | None = None,
    epoch: int = 0,
) -> Array:
    """0/1 gate over coordinates; never all-zero.

    Strategy I reuses one draw per epoch via epoch_cache; II draws fresh every
    call; III returns all ones.
    """
    if strategy == "III":
        return np.ones(n)
    if strategy == "I" and epoch_cache is not None and epoch in epoch_cache:
        return epoch_cache[epoch]
    d = (rng.random(n) < tau).astype(float)
    tries = 0
    while not d.any():
        if tries >= 100:  # tau == 0 or pathological: force one coordinate
            d[int(rng.integers(n))] = 1.0
            break
        d = (rng.random(n) < tau).astype(float)
        tries += 1
    if strategy == "I" and epoch_cache is not None:
        epoch_cache.clear()  # only the current epoch's vector is needed
        epoch_cache[epoch] = d
    return d


def propose_neighbor(
    x: Array,
    bank: SolutionBank,
    cfg: AnnealingConfig,
    temperature: float,
    rng: np.random.Generator,
    decision: Array | None = None,
) -> tuple[Array, int]:
    """One bank-guided perturbation of x, clamped to [0, 1]^n.

    x' = clip(x + d*u*eta*(b - x) + d*z) where b is the nearest bank entry,
    u ~ U(0,1) per coordinate and z ~ U(-w, w) with w = noise_scale * T/t_max.
    """
    n = x.shape[0]
    idx, _ = bank.nearest(x)
    b = bank.entries[idx].x.x
    if decision is None:
        decision = decision_vector(n, cfg.strategy, cfg.tau, rng)
    u = rng.random(n)
    width = cfg.noise_scale * temperature / cfg.t_max
    z = rng.uniform(-width, width, n)
    x_new = np.clip(x + decision * (u * cfg.eta * (b - x) + z), 0.0, 1.0)
    return x_new, idx


def metropolis_accept(delta: float, temperature: float, rng: np.random.Generator) -> bool:
    """Accept improvements always, deteriorations with probability exp(-delta/T)."""
    if temperature <= 0:
        raise BadConfig("temperature must be > 0")
    if delta <= 0:
        return True
    return bool(rng.random() < np.exp(-delta / temperature))


def anneal(objective, bank: SolutionBank, cfg: AnnealingConfig) -> tuple[WeightVector, AnnealingTrace]:
    """Run the super-agent against a frozen solution bank.

    The initial state is the bank entry with the best value under `objective`,
    evaluated without touching the bank's hit counters; every trial afterwards
    queries nearest() exactly once, so the inclination total equals the trace
    length. Deterministic for a fixed config.
    """
    if len(bank) == 0:
        raise EmptyBank("anneal() needs a non-empty bank")
    rng = np.random.default_rng(cfg.seed)

    seed_values = [float(objective(e.x.x)) for e in bank.entries]
    start_idx = int(np.argmin(seed_values))
    x = bank.entries[start_idx].x.x.copy()
    fx = seed_values[start_idx]

    trace = AnnealingTrace(best_x=x.copy(), best_objective=fx)
    trial = 0
    for temperature in temperature_schedule(cfg):
        epoch_decision = None
        if cfg.strategy == "I":
            epoch_decision = decision_vector(x.shape[0], "I", cfg.tau, rng)
        for _ in range(cfg.trials_per_temp):
            decision = epoch_decision
            if cfg.strategy == "II":
                decision = decision_vector(x.shape[0], "II", cfg.tau, rng)
            elif cfg.strategy == "III":
                decision = np.ones(x.shape[0])
            x_new, nearest_idx = propose_neighbor(x, bank, cfg, temperature, rng, decision)
            f_new = float(objective(x_new))
            accepted = metropolis_accept(f_new - fx, temperature, rng)
            if accepted:
                x, fx = x_new, f_new
            if f_new < trace.best_objective:
                trace.best_x = x_new.copy()
                trace.best_objective = f_new
            trial += 1
            trace.records.append(
                TrialRecord(
                    trial=trial,
                    temperature=temperature,
                    nearest_index=nearest_idx,
                    x=x_new,
                    accepted=accepted,
                    objective=f_new,
                    best_objective=trace.best_objective,
                )
            )
    return WeightVector(trace.best_x, agent_id="sa_super_agent"), trace
