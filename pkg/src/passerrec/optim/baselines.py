"""Comparison optimizers sharing :class:`PLConfig`: canonical PSO and random search."""

from __future__ import annotations

import math

import numpy as np

from .base import InitializationError, OptimizationResult, PLConfig, evaluate_all

__all__ = ["pso_optimize", "random_search"]

INERTIA = 0.729
COGNITIVE = SOCIAL = 1.49445
VELOCITY_FRACTION = 0.2


def pso_optimize(objective, config: PLConfig, n_jobs=1) -> OptimizationResult:
    """Global-best PSO with constriction-style coefficients.

    Velocities are clamped to 20% of each dimension's range and positions to
    the box. Non-finite evaluations are rejected and the particle stays put.
    """
    rng = np.random.default_rng(config.seed)
    lo, hi = config.lower, config.upper
    vmax = VELOCITY_FRACTION * (hi - lo)
    n, d = config.pop_size, config.dim

    x = lo + rng.random((n, d)) * (hi - lo)
    v = (2.0 * rng.random((n, d)) - 1.0) * vmax
    f = np.array(evaluate_all(objective, list(x), n_jobs))
    bad = np.flatnonzero(~np.isfinite(f))
    if bad.size:
        raise InitializationError(x[bad[0]])
    pbest, pbest_f = x.copy(), f.copy()
    g = int(np.argmin(f))
    gbest, gbest_f = x[g].copy(), float(f[g])

    rejected = 0
    trace = np.empty(config.max_iter)
    for t in range(config.max_iter):
        r1, r2 = rng.random((n, d)), rng.random((n, d))
        v = INERTIA * v + COGNITIVE * r1 * (pbest - x) + SOCIAL * r2 * (gbest - x)
        v = np.clip(v, -vmax, vmax)
        proposal = config.clip(x + v)
        f_new = np.array(evaluate_all(objective, list(proposal), n_jobs))
        ok = np.isfinite(f_new)
        rejected += int((~ok).sum())
        x = np.where(ok[:, None], proposal, x)
        f = np.where(ok, f_new, f)
        improved = f < pbest_f
        pbest[improved], pbest_f[improved] = x[improved], f[improved]
        g = int(np.argmin(pbest_f))
        if pbest_f[g] < gbest_f:
            gbest, gbest_f = pbest[g].copy(), float(pbest_f[g])
        trace[t] = gbest_f
    return OptimizationResult(gbest, gbest_f, trace, rejected)


def random_search(objective, config: PLConfig, n_jobs=1) -> OptimizationResult:
    """``pop_size`` uniform samples per iteration for ``max_iter`` iterations."""
    rng = np.random.default_rng(config.seed)
    lo, hi = config.lower, config.upper
    best, best_f = None, math.inf
    rejected = 0
    trace = np.empty(config.max_iter)
    for t in range(config.max_iter):
        batch = lo + rng.random((config.pop_size, config.dim)) * (hi - lo)
        f = np.array(evaluate_all(objective, list(batch), n_jobs))
        ok = np.isfinite(f)
        rejected += int((~ok).sum())
        if ok.any():
            i = int(np.argmin(np.where(ok, f, np.inf)))
            if f[i] < best_f:
                best, best_f = batch[i].copy(), float(f[i])
        trace[t] = best_f
    if best is None:
        best = lo + 0.5 * (hi - lo)
    return OptimizationResult(best, best_f, trace, rejected)
