"""Benchmark objectives for validating the stochastic optimizers off-market.

Four standard landscapes (unimodal bowl, curved valley, and two multimodal
surfaces) in dimensions 2, 5 and 10, each with its known global minimum.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, OutOfBounds

Array = np.ndarray


def sphere(x: Array) -> float:
    return float(np.sum(x**2))


def rosenbrock(x: Array) -> float:
    return float(np.sum(100.0 * (x[1:] - x[:-1] ** 2) ** 2 + (1.0 - x[:-1]) ** 2))


def rastrigin(x: Array) -> float:
    return float(10.0 * x.size + np.sum(x**2 - 10.0 * np.cos(2.0 * np.pi * x)))


def ackley(x: Array) -> float:
    d = x.size
    return float(
        -20.0 * np.exp(-0.2 * np.sqrt(np.sum(x**2) / d))
        - np.exp(np.sum(np.cos(2.0 * np.pi * x)) / d)
        + 20.0
        + np.e
    )


@dataclass(frozen=True)
class BenchFunction:
    name: str
    dim: int
    bounds: Array  # (dim, 2) [lo, hi]
    minimum_location: Array
    minimum_value: float
    func: callable

    def __post_init__(self):
        object.__setattr__(self, "bounds", np.asarray(self.bounds, dtype=float))
        object.__setattr__(self, "minimum_location", np.asarray(self.minimum_location, dtype=float))


_DOMAINS = {
    "sphere": (sphere, (-5.0, 5.0), 0.0),
    "rosenbrock": (rosenbrock, (-5.0, 10.0), 1.0),
    "rastrigin": (rastrigin, (-5.12, 5.12), 0.0),
    "ackley": (ackley, (-32.768, 32.768), 0.0),
}


def make(name: str, dim: int) -> BenchFunction:
    if name not in _DOMAINS:
        raise KeyError(f"unknown benchmark function {name!r}")
    if dim < 2:
        raise DimensionMismatch("benchmark functions need dim >= 2")
    func, (lo, hi), opt_coord = _DOMAINS[name]
    return BenchFunction(
        name=name,
        dim=dim,
        bounds=np.tile([lo, hi], (dim, 1)),
        minimum_location=np.full(dim, opt_coord),
        minimum_value=0.0,
        func=func,
    )


def suite(dims=(2, 5, 10)) -> list[BenchFunction]:
    """All four functions in each requested dimension."""
    return [make(name, d) for name in _DOMAINS for d in dims]


def evaluate(f: BenchFunction, x) -> float:
    """Evaluate with domain checks."""
    x = np.asarray(x, dtype=float)
    if x.shape != (f.dim,):
        raise DimensionMismatch(f"{f.name} expects shape ({f.dim},), got {x.shape}")
    if np.any(x < f.bounds[:, 0]) or np.any(x > f.bounds[:, 1]):
        raise OutOfBounds(f"point outside {f.name} domain")
    return float(f.func(x))
