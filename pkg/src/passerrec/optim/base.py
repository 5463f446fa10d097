"""Shared optimizer types: configuration, agents, results, trace export."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .._validation import check_bounds, check_fraction, check_positive_int

EPS = 1e-12


class InitializationError(RuntimeError):
    """Objective was non-finite at an initial point."""

    def __init__(self, point):
        self.point = np.asarray(point)
        super().__init__(f"objective is not finite at initial point {self.point.tolist()}")


@dataclass
class PLConfig:
    """Population and run settings shared by all optimizers.

    ``bounds`` is either a ``(d, 2)`` array or a single ``(lo, hi)`` pair,
    in which case ``dim`` is required.
    """

    bounds: np.ndarray
    dim: Optional[int] = None
    pop_size: int = 30
    max_iter: int = 100
    producer_fraction: float = 0.2
    investigator_fraction: float = 0.1
    awareness_probability: float = 0.8
    flight_length: float = 1.0
    seed: int = 0

    def __post_init__(self):
        self.bounds = check_bounds(self.bounds, self.dim)
        self.dim = self.bounds.shape[0]
        check_positive_int(self.pop_size, "pop_size", minimum=4)
        check_positive_int(self.max_iter, "max_iter")
        check_fraction(self.producer_fraction, "producer_fraction")
        check_fraction(self.investigator_fraction, "investigator_fraction")
        check_fraction(self.awareness_probability, "awareness_probability")
        if not self.flight_length > 0:
            raise ValueError("flight_length must be positive")
        if self.producer_fraction * self.pop_size < 1 or self.investigator_fraction * self.pop_size < 1:
            raise ValueError("producer and investigator fractions must each cover at least one agent")

    @property
    def lower(self):
        return self.bounds[:, 0]

    @property
    def upper(self):
        return self.bounds[:, 1]

    @property
    def n_producers(self):
        return math.ceil(self.producer_fraction * self.pop_size)

    @property
    def n_investigators(self):
        return math.ceil(self.investigator_fraction * self.pop_size)

    def clip(self, x):
        return np.clip(x, self.lower, self.upper)


@dataclass
class Agent:
    position: np.ndarray
    velocity: np.ndarray
    fitness: float
    previous_position: np.ndarray
    previous_fitness: float


@dataclass
class Population:
    agents: list
    elite: np.ndarray
    elite_fitness: float
    previous_elite: np.ndarray
    rejected: int = 0

    def sort(self):
        self.agents.sort(key=lambda a: a.fitness)


@dataclass
class OptimizationResult:
    best_position: np.ndarray
    best_fitness: float
    trace: np.ndarray
    rejected: int = 0
    extra: dict = field(default_factory=dict)

    def iterations_to_reach(self, target):
        """1-based iteration where the trace first hits ``target``, else ``inf``."""
        hit = np.flatnonzero(self.trace <= target)
        return int(hit[0]) + 1 if hit.size else math.inf

    def write_trace(self, fh):
        write_trace(self.trace, fh)


def write_trace(trace, fh):
    fh.write("iter,best_fitness\n")
    for i, f in enumerate(trace, start=1):
        fh.write(f"{i},{f:.9g}\n")


def evaluate_all(objective: Callable, positions, n_jobs=1):
    """Evaluate positions in order; ``n_jobs > 1`` fans out over threads."""
    if n_jobs > 1 and len(positions) > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            return [float(v) for v in pool.map(objective, positions)]
    return [float(objective(p)) for p in positions]
