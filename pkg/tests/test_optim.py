import io
import math
from types import SimpleNamespace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from passerrec.optim import (
    Agent,
    InitializationError,
    PLConfig,
    benchmark_suite,
    initialize_population,
    investigator_update,
    optimize,
    producer_update,
    pso_optimize,
    random_search,
    scrounger_update,
    step,
)
from passerrec.optim.benchmarks import ackley, rastrigin, rosenbrock, sphere

WIDE = PLConfig(bounds=(-100.0, 100.0), dim=1, max_iter=10)


def _agent(x, f, f_prev, v=0.0):
    x = np.atleast_1d(np.asarray(x, dtype=float))
    return Agent(x, np.full_like(x, v), f, x.copy(), f_prev)


def test_producer_no_alarm():
    out = producer_update([1.0], [2.0], 1, WIDE, alpha1=0.5, r2=0.3, r=0.0)
    assert abs(out[0] - (math.exp(-0.2) + 1.0)) <= 1e-12
    assert out[0] == pytest.approx(1.81873, abs=1e-5)


def test_producer_alarm():
    out = producer_update([1.0], [2.0], 1, WIDE, alpha1=0.5, r2=0.9, r=0.5)
    assert abs(out[0] - 1.5) <= 1e-12


def test_producer_at_elite_contracts():
    out = producer_update([3.0], [3.0], 10, WIDE, alpha1=1.0, r2=0.1, r=0.0)
    assert abs(out[0] - 3.0 * math.exp(-1)) <= 1e-12


def test_producer_clamps():
    cfg = PLConfig(bounds=(0.0, 1.0), dim=1, max_iter=10)
    assert producer_update([0.9], [0.1], 1, cfg, alpha1=0.5, r2=0.95, r=0.9)[0] == 0.0


def test_scrounger_better_half():
    out = scrounger_update(_agent(1.0, 4.0, 2.0), 1, [0.0], [2.0], [0.0], WIDE, q=0.0, rand=0.0, k=1.0)
    assert abs(out[0] - 0.5) <= 1e-12


def test_scrounger_worse_half():
    cfg = PLConfig(bounds=(-100.0, 100.0), dim=1, pop_size=4, max_iter=10,
                   producer_fraction=0.25, investigator_fraction=0.25)
    out = scrounger_update(_agent(1.0, 4.0, 4.0), 3, [2.0], [0.0], [3.0], cfg, q=1.0, rand=0.5, k=0.0)
    # rank 3 of 4 is past n/2; 3**2 in the exponent
    assert abs(out[0] - (math.exp(2 / 9) + 0.125)) <= 1e-12


def test_scrounger_worse_half_pinned_example():
    # rank 2 lands in the worse half only when n < 4, below the config minimum
    cfg = SimpleNamespace(pop_size=3, clip=lambda v: v)
    out = scrounger_update(_agent(1.0, 4.0, 4.0), 2, [2.0], [0.0], [3.0], cfg, q=1.0, rand=0.5, k=0.0)
    assert abs(out[0] - (math.exp(0.5) + 0.125)) <= 1e-12
    assert out[0] == pytest.approx(1.77372, abs=1e-5)


def test_scrounger_null_step():
    agent = _agent([1.5, -2.0], 3.0, 1.0, v=0.7)
    cfg = PLConfig(bounds=(-100.0, 100.0), dim=2, max_iter=10)
    out = scrounger_update(agent, 1, [0, 0], [9, 9], [0, 0], cfg, q=0.0, rand=0.3, k=0.0)
    assert out.tolist() == [1.5, -2.0]


def test_investigator_example():
    out = investigator_update([1.0, -1.0], [0.0, 0.0], [2.0, 2.0], alpha=0.5, signs=[1, 1])
    assert np.max(np.abs(out - [0.5, -0.5])) <= 1e-12


@given(st.lists(st.floats(-10, 10), min_size=1, max_size=6), st.data())
def test_investigator_alpha_zero_gives_shift(x, data):
    d = len(x)
    signs = data.draw(st.lists(st.sampled_from([-1.0, 1.0]), min_size=d, max_size=d))
    out = investigator_update(x, np.zeros(d), np.ones(d), alpha=0.0, signs=signs)
    s = sum(abs(v) * a / d for v, a in zip(x, signs))
    assert np.allclose(out, s, atol=1e-12, rtol=0)


def test_investigator_zero_fixed_point():
    out = investigator_update(np.zeros(3), np.zeros(3), np.zeros(3), alpha=0.7, signs=[1, -1, 1])
    assert not out.any()


def test_config_validation():
    with pytest.raises(ValueError):
        PLConfig(bounds=(1.0, 0.0), dim=2)
    with pytest.raises(ValueError):
        PLConfig(bounds=(0.0, 1.0), dim=2, pop_size=3)
    with pytest.raises(ValueError):
        PLConfig(bounds=(0.0, 1.0), dim=2, producer_fraction=1.5)
    with pytest.raises(ValueError):
        PLConfig(bounds=(0.0, 1.0), dim=2, pop_size=5, investigator_fraction=0.1)
    cfg = PLConfig(bounds=(0.0, 1.0), dim=2)
    assert (cfg.n_producers, cfg.n_investigators) == (6, 3)


def test_initialize_population():
    cfg = PLConfig(bounds=(0.0, 1.0), dim=2, pop_size=5, producer_fraction=0.2,
                   investigator_fraction=0.2, seed=4)
    pop = initialize_population(cfg, sphere)
    xs = np.array([a.position for a in pop.agents])
    assert xs.shape == (5, 2) and np.all((xs >= 0) & (xs <= 1))
    fits = [a.fitness for a in pop.agents]
    assert fits == sorted(fits) and pop.elite_fitness == fits[0]
    assert all(not a.velocity.any() for a in pop.agents)
    again = initialize_population(cfg, sphere)
    assert np.array_equal(xs, [a.position for a in again.agents])


def test_initialization_error_names_point():
    cfg = PLConfig(bounds=(0.0, 1.0), dim=2, pop_size=5, producer_fraction=0.2,
                   investigator_fraction=0.2)
    with pytest.raises(InitializationError) as err:
        initialize_population(cfg, lambda x: math.nan)
    assert err.value.point.shape == (2,)


def test_step_invariants():
    cfg = PLConfig(bounds=(-5.0, 5.0), dim=3, pop_size=10, max_iter=20, seed=1)
    rng = np.random.default_rng(1)
    pop = initialize_population(cfg, sphere, rng)
    for h in range(1, 21):
        before = pop.elite_fitness
        step(pop, sphere, h, rng, cfg)
        assert len(pop.agents) == 10
        assert pop.elite_fitness <= before
        for a in pop.agents:
            assert np.all((a.position >= -5) & (a.position <= 5))
            assert np.array_equal(a.velocity, a.position - a.previous_position)


def test_step_rejects_nonfinite_candidates():
    cfg = PLConfig(bounds=(-5.0, 5.0), dim=2, pop_size=10, max_iter=5, seed=2)
    calls = {"n": 0}

    def flaky(x):
        calls["n"] += 1
        return math.inf if calls["n"] > 10 and calls["n"] % 3 == 0 else float(x @ x)

    res = optimize(flaky, cfg)
    assert res.rejected > 0
    assert np.all(np.isfinite(res.trace))


def test_constant_objective():
    res = optimize(lambda x: 7.0, PLConfig(bounds=(-1.0, 1.0), dim=3, max_iter=15))
    assert res.best_fitness == 7.0 and np.all(res.trace == 7.0)


@pytest.mark.parametrize("runner", [optimize, pso_optimize, random_search])
def test_every_evaluation_in_bounds(runner):
    bounds = np.array([[-1.0, 2.0], [0.5, 0.75], [-3.0, -2.0]])
    seen = []

    def wrapped(x):
        seen.append(np.array(x))
        return rastrigin(x)

    res = runner(wrapped, PLConfig(bounds=bounds, max_iter=25, seed=5))
    xs = np.array(seen)
    assert np.all(xs >= bounds[:, 0]) and np.all(xs <= bounds[:, 1])
    assert len(res.trace) == 25
    assert np.all(np.diff(res.trace) <= 0)
    assert res.best_fitness == res.trace[-1]


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from(benchmark_suite((2, 5))))
def test_trace_non_increasing(seed, fn):
    res = optimize(fn, PLConfig(bounds=fn.bounds, dim=fn.dim, pop_size=10, max_iter=20, seed=seed))
    assert np.all(np.diff(res.trace) <= 0)


@pytest.mark.parametrize("runner", [optimize, pso_optimize, random_search])
def test_determinism_and_threads(runner):
    cfg = PLConfig(bounds=(-5.0, 5.0), dim=4, max_iter=30, seed=11)
    a = runner(rastrigin, cfg)
    b = runner(rastrigin, cfg, n_jobs=3)
    assert np.array_equal(a.trace, b.trace)
    assert np.array_equal(a.best_position, b.best_position)
    c = runner(rastrigin, PLConfig(bounds=(-5.0, 5.0), dim=4, max_iter=30, seed=12))
    assert not np.array_equal(a.trace, c.trace)


def test_callback_sees_each_iteration():
    seen = []
    optimize(sphere, PLConfig(bounds=(-1.0, 1.0), dim=2, max_iter=7),
             callback=lambda h, pop: seen.append(h))
    assert seen == list(range(1, 8))


def test_baselines_constant_objective():
    cfg = PLConfig(bounds=(-1.0, 1.0), dim=2, max_iter=5)
    assert pso_optimize(lambda x: 7.0, cfg).best_fitness == 7.0
    assert random_search(lambda x: 7.0, cfg).best_fitness == 7.0


def test_pso_quadratic_1d():
    errs = [abs(pso_optimize(lambda x: (x[0] - 3.0) ** 2,
                             PLConfig(bounds=(0.0, 10.0), dim=1, pop_size=20, max_iter=200, seed=s)
                             ).best_position[0] - 3.0) for s in range(10)]
    assert np.median(errs) <= 0.01


def test_benchmark_optima():
    fns = benchmark_suite()
    assert {(f.name, f.dim) for f in fns} == {(f"{n}{d}", d) for n in ("sphere", "rosenbrock", "rastrigin", "ackley")
                                              for d in (2, 5, 10)}
    for f in fns:
        assert f(f.optimum_location) == pytest.approx(f.optimum_value, abs=1e-12)
    assert sphere(np.zeros(3)) == 0 and rastrigin(np.zeros(3)) == 0
    assert rosenbrock(np.ones(4)) == 0 and abs(ackley(np.zeros(2))) <= 1e-12


def test_trace_csv():
    res = optimize(sphere, PLConfig(bounds=(-1.0, 1.0), dim=2, max_iter=3, seed=0))
    buf = io.StringIO()
    res.write_trace(buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "iter,best_fitness" and len(lines) == 4
    assert [ln.split(",")[0] for ln in lines[1:]] == ["1", "2", "3"]
    assert float(lines[-1].split(",")[1]) == pytest.approx(res.best_fitness, rel=1e-8)


def test_iterations_to_reach():
    res = optimize(sphere, PLConfig(bounds=(-1.0, 1.0), dim=2, max_iter=3))
    assert res.iterations_to_reach(math.inf) == 1
    assert res.iterations_to_reach(-1.0) == math.inf
