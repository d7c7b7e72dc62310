"""Bank of optimal weight vectors with provenance and inclination statistics.

The bank is the shared contact point between solver agents (writers) and the
annealing super-agent (reader): agents append solutions, the super-agent asks
for the nearest entry to its current state, and every such query is counted
against the winning entry ("inclinations"). Writers and readers must not
interleave; the pipeline freezes the bank before annealing starts.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, EmptyBank, IoFailure, SchemaMismatch
from .formulations import WeightVector

log = logging.getLogger(__name__)

Array = np.ndarray

DUPLICATE_TOL = 1e-9  # inf-norm distance below which two entries are one

AGENT_CLASSES = ("deterministic", "domain", "stochastic")


@dataclass(frozen=True)
class BankEntry:
    """One optimal solution with its provenance."""

    x: WeightVector
    agent_id: str
    agent_class: str
    params: dict = field(default_factory=dict)
    source_objective: float = float("nan")

    def __post_init__(self):
        if isinstance(self.x, np.ndarray):
            object.__setattr__(self, "x", WeightVector(self.x))
        if self.agent_class not in AGENT_CLASSES:
            raise ValueError(f"agent_class must be one of {AGENT_CLASSES}")
        if not self.x.is_long_only():
            raise ValueError(f"{self.agent_id}: bank entries must be long-only weights")

    def params_key(self) -> str:
        return ",".join(f"{k}={self.params[k]}" for k in sorted(self.params))


class SolutionBank:
    """Ordered, deduplicated collection of BankEntry with hit counters."""

    def __init__(self, n: int):
        if n < 1:
            raise DimensionMismatch("bank dimension must be >= 1")
        self.n = int(n)
        self.entries: list[BankEntry] = []
        self.hit_counts: list[int] = []
        self.duplicates_dropped = 0
        self._matrix = np.zeros((0, n))

    def __len__(self) -> int:
        return len(self.entries)

    def add(self, entry: BankEntry) -> bool:
        """Append unless a near-identical entry exists; returns True if added."""
        x = entry.x.x
        if x.shape[0] != self.n:
            raise DimensionMismatch(f"entry has {x.shape[0]} weights, bank expects {self.n}")
        if self.entries:
            dists = np.max(np.abs(self._matrix - x[None, :]), axis=1)
            if float(np.min(dists)) <= DUPLICATE_TOL:
                self.duplicates_dropped += 1
                log.debug("dropped duplicate from %s (%d so far)", entry.agent_id, self.duplicates_dropped)
                return False
        self.entries.append(entry)
        self.hit_counts.append(0)
        self._matrix = np.vstack([self._matrix, x[None, :]])
        return True

    def nearest(self, x) -> tuple[int, float]:
        """Index and Euclidean distance of the closest entry; counts the hit.

        Ties go to the lowest entry index.
        """
        if not self.entries:
            raise EmptyBank("nearest() on an empty bank")
        x = np.asarray(x, dtype=float)
        if x.shape[0] != self.n:
            raise DimensionMismatch(f"query has {x.shape[0]} weights, bank expects {self.n}")
        dists = np.linalg.norm(self._matrix - x[None, :], axis=1)
        idx = int(np.argmin(dists))  # argmin returns the first (lowest) index on ties
        self.hit_counts[idx] += 1
        return idx, float(dists[idx])

    def peek_nearest(self, x) -> tuple[int, float]:
        """nearest() without touching the hit counters."""
        if not self.entries:
            raise EmptyBank("peek_nearest() on an empty bank")
        x = np.asarray(x, dtype=float)
        dists = np.linalg.norm(self._matrix - x[None, :], axis=1)
        idx = int(np.argmin(dists))
        return idx, float(dists[idx])

    def reset_hits(self) -> None:
        self.hit_counts = [0] * len(self.entries)

    def inclinations(self) -> dict[tuple[str, str], int]:
        """Hit counts aggregated by (agent_id, params); sums to total queries."""
        hist: dict[tuple[str, str], int] = {}
        for entry, hits in zip(self.entries, self.hit_counts):
            key = (entry.agent_id, entry.params_key())
            hist[key] = hist.get(key, 0) + hits
        return hist

    def save(self, path) -> None:
        doc = {
            "n": self.n,
            "entries": [
                {
                    "x": [float(v) for v in e.x.x],
                    "agent_id": e.agent_id,
                    "agent_class": e.agent_class,
                    "params": e.params,
                    "source_objective": e.source_objective,
                }
                for e in self.entries
            ],
            "hit_counts": list(self.hit_counts),
        }
        try:
            with open(path, "w") as fh:
                json.dump(doc, fh, indent=2, sort_keys=True)
        except OSError as exc:
            raise IoFailure(f"cannot write bank to {path}: {exc}") from exc

    @classmethod
    def load(cls, path) -> "SolutionBank":
        try:
            with open(path) as fh:
                doc = json.load(fh)
        except OSError as exc:
            raise IoFailure(f"cannot read bank from {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise IoFailure(f"{path} is not valid JSON: {exc}") from exc
        try:
            n = int(doc["n"])
            entries = doc["entries"]
            hit_counts = doc["hit_counts"]
        except (KeyError, TypeError) as exc:
            raise SchemaMismatch(f"{path}: missing bank fields: {exc}") from exc
        if len(hit_counts) != len(entries):
            raise SchemaMismatch(f"{path}: {len(hit_counts)} hit counts for {len(entries)} entries")
        bank = cls(n)
        for rec in entries:
            try:
                x = np.asarray(rec["x"], dtype=float)
                entry = BankEntry(
                    x=WeightVector(x),
                    agent_id=str(rec["agent_id"]),
                    agent_class=str(rec["agent_class"]),
                    params=dict(rec.get("params", {})),
                    source_objective=float(rec.get("source_objective", float("nan"))),
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise SchemaMismatch(f"{path}: bad entry: {exc}") from exc
            if x.shape[0] != n:
                raise SchemaMismatch(f"{path}: entry dimension {x.shape[0]} != bank n {n}")
            bank.add(entry)
        if len(bank.entries) != len(entries):
            raise SchemaMismatch(f"{path}: file contains duplicate entries")
        bank.hit_counts = [int(h) for h in hit_counts]
        return bank
