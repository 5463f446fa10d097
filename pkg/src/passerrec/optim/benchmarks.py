"""Standard test functions with known minima."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = ["ObjectiveFunction", "sphere", "rosenbrock", "rastrigin", "ackley", "benchmark_suite"]


@dataclass(frozen=True)
class ObjectiveFunction:
    name: str
    dim: int
    func: Callable
    bounds: tuple
    optimum_value: float
    optimum_location: np.ndarray

    def __call__(self, x):
        return float(self.func(np.asarray(x, dtype=float)))


def sphere(x):
    return np.sum(x ** 2)


def rosenbrock(x):
    return np.sum(100.0 * (x[1:] - x[:-1] ** 2) ** 2 + (1.0 - x[:-1]) ** 2)


def rastrigin(x):
    return 10.0 * x.size + np.sum(x ** 2 - 10.0 * np.cos(2.0 * np.pi * x))


def ackley(x):
    d = x.size
    return (-20.0 * np.exp(-0.2 * np.sqrt(np.sum(x ** 2) / d))
            - np.exp(np.sum(np.cos(2.0 * np.pi * x)) / d) + 20.0 + np.e)


_DOMAINS = {
    "sphere": (sphere, (-5.12, 5.12), 0.0),
    "rosenbrock": (rosenbrock, (-5.0, 10.0), 1.0),
    "rastrigin": (rastrigin, (-5.12, 5.12), 0.0),
    "ackley": (ackley, (-32.768, 32.768), 0.0),
}


def benchmark_suite(dims=(2, 5, 10)) -> list[ObjectiveFunction]:
    suite = []
    for name, (func, bounds, at) in _DOMAINS.items():
        for d in dims:
            suite.append(ObjectiveFunction(f"{name}{d}", d, func, bounds, 0.0, np.full(d, at)))
    return suite
