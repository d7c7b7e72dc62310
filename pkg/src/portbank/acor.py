"""Ant colony optimization adapted to continuous domains (solution-archive form).

An archive of k solutions is kept sorted by objective. Each iteration, every
ant picks an archive entry l with probability proportional to a Gaussian
kernel weight over ranks, then samples each coordinate from a normal centred
on that entry with spread proportional to the archive's per-dimension mean
absolute deviation from entry l. New samples displace the worst entries.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadConfig

Array = np.ndarray


@dataclass(frozen=True)
class AcoConfig:
    """Archive-based continuous ACO parameters.

    q steers selection pressure toward the best-ranked entries (small q is
    greedy); xi scales the sampling spread (smaller converges faster).
    """

    archive_size: int = 50
    locality: float = 1e-4
    evaporation: float = 0.85
    ants_per_iter: int = 2
    max_iters: int = 2000
    seed: int = 0
    num_bank_solutions: int = 10
    warm_start_ew: bool = False

    def __post_init__(self):
        if self.archive_size < 2:
            raise BadConfig("archive_size must be >= 2")
        if self.ants_per_iter < 1:
            raise BadConfig("ants_per_iter must be >= 1")
        if self.locality <= 0 or self.evaporation <= 0:
            raise BadConfig("locality and evaporation must be > 0")
        if not 0 < self.num_bank_solutions <= self.archive_size:
            raise BadConfig("num_bank_solutions must be in [1, archive_size]")


@dataclass
class Archive:
    """Solution archive: points (k, n) and objectives (k,), sorted ascending."""

    points: Array
    objectives: Array

    @property
    def size(self) -> int:
        return self.objectives.shape[0]

    def best(self) -> tuple[Array, float]:
        return self.points[0], float(self.objectives[0])

    def insert(self, new_points: Array, new_objectives: Array) -> None:
        """Merge candidates, keep the best k, stay sorted."""
        k = self.size
        pts = np.vstack([self.points, new_points])
        objs = np.concatenate([self.objectives, new_objectives])
        order = np.argsort(objs, kind="stable")[:k]
        self.points = pts[order]
        self.objectives = objs[order]


def _kernel_weights(k: int, q: float) -> Array:
    ranks = np.arange(k, dtype=float)  # l - 1 for l = 1..k
    w = np.exp(-(ranks**2) / (2.0 * q**2 * k**2)) / (q * k * np.sqrt(2.0 * np.pi))
    return w / w.sum()


def sample_ant(archive: Archive, cfg: AcoConfig, rng: np.random.Generator,
               lo: Array, hi: Array) -> Array:
    """Draw one candidate from the archive's Gaussian kernel mixture."""
    k = archive.size
    weights = _kernel_weights(k, cfg.locality)
    l = int(rng.choice(k, p=weights))
    centre = archive.points[l]
    spread = cfg.evaporation * np.sum(np.abs(archive.points - centre), axis=0) / (k - 1)
    return np.clip(rng.normal(centre, spread), lo, hi)


def aco_minimize(objective, bounds, cfg: AcoConfig) -> list[tuple[Array, float]]:
    """Minimize over a box; returns the num_bank_solutions best distinct points.

    bounds is an (n, 2) array of [lo, hi] per dimension. Deterministic for a
    fixed config (seed included); duplicate archive entries within 1e-9
    inf-norm are dropped before the bank export.
    """
    bounds = np.asarray(bounds, dtype=float)
    if bounds.ndim != 2 or bounds.shape[1] != 2:
        raise BadConfig("bounds must be an (n, 2) array")
    if np.any(bounds[:, 0] > bounds[:, 1]):
        raise BadConfig("lower bound exceeds upper bound")
    lo, hi = bounds[:, 0], bounds[:, 1]
    n = bounds.shape[0]
    rng = np.random.default_rng(cfg.seed)

    pts = rng.uniform(lo, hi, size=(cfg.archive_size, n))
    if cfg.warm_start_ew:
        pts[0] = np.clip(np.full(n, 1.0 / n), lo, hi)
    objs = np.array([float(objective(p)) for p in pts])
    order = np.argsort(objs, kind="stable")
    archive = Archive(points=pts[order], objectives=objs[order])

    for _ in range(cfg.max_iters):
        ants = np.vstack([sample_ant(archive, cfg, rng, lo, hi) for _ in range(cfg.ants_per_iter)])
        values = np.array([float(objective(p)) for p in ants])
        archive.insert(ants, values)

    # dedup near-identical entries, then export the best ones
    result: list[tuple[Array, float]] = []
    for point, value in zip(archive.points, archive.objectives):
        if any(float(np.max(np.abs(point - px))) <= 1e-9 for px, _ in result):
            continue
        result.append((point.copy(), float(value)))
        if len(result) == cfg.num_bank_solutions:
            break
    return result
