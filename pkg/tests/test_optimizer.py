import math

import numpy as np
import pytest

from rss_locate import ConfigError, NonFiniteObjectiveError, OptimizerConfig, minimize
from rss_locate.optimizer import initial_simplex
from rss_locate.trilateration import range_objective

from oracles import grid_search


def bowl(x):
    return (x[0] - 3) ** 2 + (x[1] + 2) ** 2


def rosenbrock(x):
    return (1 - x[0]) ** 2 + 100 * (x[1] - x[0] ** 2) ** 2


def test_quadratic_bowl():
    res = minimize(bowl, (0.0, 0.0))
    assert res.converged
    assert math.dist(res.x_min, (3, -2)) < 1e-6
    assert res.f_min < 1e-10
    assert res.f_min == bowl(res.x_min)


def test_rosenbrock():
    res = minimize(rosenbrock, (-1.2, 1.0))
    assert res.converged
    assert math.dist(res.x_min, (1, 1)) < 1e-4


def test_zero_noise_range_problem_matches_grid():
    sensors = np.array([[40.0, 40.0], [-40.0, 40.0], [-40.0, -40.0], [40.0, -40.0]])
    target = np.array([12.3, -7.9])
    ranges = np.hypot(*(sensors - target).T)
    res = minimize(range_objective(sensors, ranges), sensors.mean(axis=0))
    best, _ = grid_search(sensors, ranges)
    assert math.dist(res.x_min, target) < 1e-3
    assert math.dist(res.x_min, best) < 1e-3


def test_initial_simplex():
    cfg = OptimizerConfig()
    assert initial_simplex((10.0, 0.0), cfg) == [[10.0, 0.0], [10.5, 0.0], [10.0, 0.5]]
    # a 5% step that would already be below x_tol falls back to the fixed step
    assert initial_simplex((1e-15, -4.0), cfg) == [[1e-15, -4.0], [0.5 + 1e-15, -4.0], [1e-15, -4.2]]


def test_descent_is_monotone():
    best = []
    minimize(rosenbrock, (-1.2, 1.0), callback=lambda it, x, f: best.append(f))
    assert best and all(b <= a for a, b in zip(best, best[1:]))


def test_max_iters_exhausted():
    res = minimize(rosenbrock, (-1.2, 1.0), OptimizerConfig(max_iters=5))
    assert not res.converged
    assert res.iterations == 5
    assert res.f_min == rosenbrock(res.x_min)


def test_deterministic():
    assert minimize(rosenbrock, (-1.2, 1.0)) == minimize(rosenbrock, (-1.2, 1.0))


def test_non_finite_objective_aborts():
    def f(x):
        return math.nan if x[0] > 0.2 else x[0] ** 2
    with pytest.raises(NonFiniteObjectiveError) as info:
        minimize(f, (0.0, 0.0))
    assert "not finite" in str(info.value)


def test_tie_breaking_is_stable():
    # on a flat objective the oldest vertex (x0) always sorts first
    res = minimize(lambda x: 1.0, (2.0, 3.0))
    assert res.x_min == (2.0, 3.0)


@pytest.mark.parametrize("kwargs", [
    dict(x_tol=0), dict(f_tol=-1), dict(max_iters=-1), dict(reflection=0),
    dict(expansion=1.0), dict(contraction=1.0), dict(shrink=0.0),
])
def test_config_validation(kwargs):
    with pytest.raises(ConfigError):
        OptimizerConfig(**kwargs)
