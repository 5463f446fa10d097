from .base import (
    Agent,
    InitializationError,
    OptimizationResult,
    PLConfig,
    Population,
    write_trace,
)
from .baselines import pso_optimize, random_search
from .benchmarks import ObjectiveFunction, benchmark_suite
from .passer import (
    initialize_population,
    investigator_update,
    optimize,
    producer_update,
    scrounger_update,
    step,
)

OPTIMIZERS = {
    "passer": optimize,
    "pso": pso_optimize,
    "random": random_search,
}

__all__ = [
    "Agent",
    "InitializationError",
    "OptimizationResult",
    "PLConfig",
    "Population",
    "write_trace",
    "pso_optimize",
    "random_search",
    "ObjectiveFunction",
    "benchmark_suite",
    "initialize_population",
    "investigator_update",
    "optimize",
    "producer_update",
    "scrounger_update",
    "step",
    "OPTIMIZERS",
]
