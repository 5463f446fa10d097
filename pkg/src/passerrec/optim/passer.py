"""Passer Learning: a sparrow-search / teaching-learning hybrid minimizer.

Agents are ranked by fitness each iteration. The best ``ceil(PD * n)``
act as producers, the rest as scroungers, and ``ceil(SD * n)`` randomly
drawn agents are then overridden by the investigator (teacher-learner)
move. The best position ever evaluated is archived as the elite, and it
is the attractor every update rule refers to.
"""

from __future__ import annotations

import math

import numpy as np

from .base import (
    EPS,
    Agent,
    InitializationError,
    OptimizationResult,
    PLConfig,
    Population,
    evaluate_all,
)

__all__ = [
    "initialize_population",
    "producer_update",
    "scrounger_update",
    "investigator_update",
    "step",
    "optimize",
]


def initialize_population(config: PLConfig, objective, rng=None, n_jobs=1) -> Population:
    """Uniform positions in the box, zero velocities, sorted by fitness."""
    if rng is None:
        rng = np.random.default_rng(config.seed)
    lo, hi = config.lower, config.upper
    positions = [lo + rng.random(config.dim) * (hi - lo) for _ in range(config.pop_size)]
    fitness = evaluate_all(objective, positions, n_jobs)
    agents = []
    for x, f in zip(positions, fitness):
        if not math.isfinite(f):
            raise InitializationError(x)
        agents.append(Agent(x, np.zeros(config.dim), f, x.copy(), f))
    pop = Population(agents, agents[0].position.copy(), agents[0].fitness, None)
    pop.sort()
    best = pop.agents[0]
    pop.elite, pop.elite_fitness = best.position.copy(), best.fitness
    pop.previous_elite = pop.elite.copy()
    return pop


def producer_update(x, elite, h, config: PLConfig, *, alpha1, r2, r):
    """Producer move.

    With no alarm (``r2 < AP``) the agent contracts by
    ``exp(-h / (alpha1 * max_iter))`` and steps by its offset to the elite;
    otherwise it flies ``(x + r * fl) * (elite - x)``.
    """
    x = np.asarray(x, dtype=float)
    elite = np.asarray(elite, dtype=float)
    if r2 < config.awareness_probability:
        new = x * math.exp(-h / (alpha1 * config.max_iter)) + (elite - x)
    else:
        new = (x + r * config.flight_length) * (elite - x)
    return config.clip(new)


def scrounger_update(agent: Agent, rank, best_producer, elite, previous_elite,
                     config: PLConfig, *, q, rand, k):
    """Scrounger move for the agent at 1-based ``rank``.

    The worse half (``rank > n/2``) jumps relative to the previous elite and
    the best producer; the better half steps along ``x - elite`` scaled by
    its last fitness change, plus a momentum term ``q * velocity``.
    """
    x = agent.position
    if rank > config.pop_size / 2:
        new = (q * np.exp((np.asarray(previous_elite) - x) / rank ** 2)
               + rand * (np.asarray(best_producer) - x) / (agent.fitness + EPS))
    else:
        df = agent.fitness - agent.previous_fitness + EPS
        new = x + k * (x - np.asarray(elite)) / df + q * agent.velocity
    return config.clip(new)


def investigator_update(x, x_prev, elite, config: PLConfig | None = None, *, alpha, signs):
    """Teacher-learner relocation of a randomly drawn agent.

    ``signs`` is the random +/-1 row vector ``A``; its pseudo-inverse
    ``A^T (A A^T)^-1`` contracts with ``|x|`` to a scalar shift that is
    broadcast across every coordinate.
    """
    x = np.asarray(x, dtype=float)
    a = np.asarray(signs, dtype=float).reshape(1, -1)
    a_pinv = a.T / (a @ a.T)
    shift = float(np.abs(x) @ a_pinv[:, 0])
    new = alpha * x - 0.5 * alpha * np.asarray(x_prev) + shift - alpha * np.asarray(elite)
    return new if config is None else config.clip(new)


def _propose(pop: Population, h, rng, config: PLConfig):
    """Draw every random number for one iteration, in a fixed order."""
    n = config.pop_size
    agents = pop.agents
    r2 = rng.random()
    candidates = [None] * n
    for i in range(config.n_producers):
        alpha1 = 1.0 - rng.random()  # (0, 1]
        candidates[i] = producer_update(agents[i].position, pop.elite, h, config,
                                        alpha1=alpha1, r2=r2, r=rng.random())
    best_producer = candidates[0]
    for i in range(config.n_producers, n):
        q, rand, k = rng.standard_normal(), rng.random(), rng.uniform(-1.0, 1.0)
        candidates[i] = scrounger_update(agents[i], i + 1, best_producer, pop.elite,
                                         pop.previous_elite, config, q=q, rand=rand, k=k)
    for i in rng.choice(n, size=config.n_investigators, replace=False):
        alpha = rng.random()
        signs = rng.choice((-1.0, 1.0), size=config.dim)
        agent = agents[i]
        candidates[i] = investigator_update(agent.position, agent.previous_position, pop.elite,
                                            config, alpha=alpha, signs=signs)
    return candidates


def step(pop: Population, objective, h, rng, config: PLConfig, n_jobs=1) -> Population:
    """Advance the population one iteration in place and return it."""
    pop.sort()
    candidates = _propose(pop, h, rng, config)
    fitness = evaluate_all(objective, candidates, n_jobs)
    for agent, x_new, f_new in zip(pop.agents, candidates, fitness):
        x_old, f_old = agent.position, agent.fitness
        if not math.isfinite(f_new):
            pop.rejected += 1
            x_new, f_new = x_old, f_old
        agent.previous_position, agent.previous_fitness = x_old, f_old
        agent.velocity = x_new - x_old
        agent.position, agent.fitness = x_new, f_new
    pop.previous_elite = pop.elite.copy()
    best = min(pop.agents, key=lambda a: a.fitness)
    if best.fitness < pop.elite_fitness:
        pop.elite, pop.elite_fitness = best.position.copy(), best.fitness
    return pop


def optimize(objective, config: PLConfig, n_jobs=1, callback=None) -> OptimizationResult:
    """Minimize ``objective`` over the box in ``config``.

    Parameters
    ----------
    objective : callable
        Maps a position (1-d array) to a float. Must be pure; with
        ``n_jobs > 1`` it is called from worker threads.
    config : PLConfig
    n_jobs : int
        Threads used for fitness evaluation. Results do not depend on it.
    callback : callable, optional
        Called as ``callback(h, population)`` after every iteration.

    Returns
    -------
    OptimizationResult
        Elite position and fitness plus the best-so-far trace, one entry per
        iteration.
    """
    rng = np.random.default_rng(config.seed)
    pop = initialize_population(config, objective, rng, n_jobs)
    trace = np.empty(config.max_iter)
    for h in range(1, config.max_iter + 1):
        step(pop, objective, h, rng, config, n_jobs)
        trace[h - 1] = pop.elite_fitness
        if callback is not None:
            callback(h, pop)
    return OptimizationResult(pop.elite.copy(), float(pop.elite_fitness), trace, pop.rejected)
