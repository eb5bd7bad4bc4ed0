"""Nelder-Mead simplex minimizer.

Mirrors the behaviour of the classic ``fminsearch`` routine: the initial
simplex perturbs each coordinate of ``x0`` by 5% (or by a fixed step when
5% would be smaller than ``x_tol``, e.g. for a zero coordinate), and the run stops once both the simplex size and the
spread of objective values fall below their tolerances.
"""

import math
from dataclasses import dataclass

from rss_locate.errors import ConfigError, NonFiniteObjectiveError


@dataclass(frozen=True)
class OptimizerConfig:
    x_tol: float = 1e-6
    f_tol: float = 1e-6
    max_iters: int = 2000
    reflection: float = 1.0
    expansion: float = 2.0
    contraction: float = 0.5
    shrink: float = 0.5
    rel_step: float = 0.05
    zero_step: float = 0.5

    def __post_init__(self):
        if not (self.x_tol > 0 and self.f_tol > 0):
            raise ConfigError("x_tol and f_tol must be > 0")
        if int(self.max_iters) != self.max_iters or self.max_iters < 0:
            raise ConfigError("max_iters must be a non-negative integer")
        if not self.reflection > 0:
            raise ConfigError("reflection coefficient must be > 0")
        if not self.expansion > 1:
            raise ConfigError("expansion coefficient must be > 1")
        if not 0 < self.contraction < 1:
            raise ConfigError("contraction coefficient must be in (0, 1)")
        if not 0 < self.shrink < 1:
            raise ConfigError("shrink coefficient must be in (0, 1)")
        if not (self.rel_step > 0 and self.zero_step > 0):
            raise ConfigError("initial simplex steps must be > 0")


@dataclass(frozen=True)
class OptimizerResult:
    x_min: tuple
    f_min: float
    iterations: int
    converged: bool


def initial_simplex(x0, config: OptimizerConfig):
    x0 = [float(v) for v in x0]
    vertices = [list(x0)]
    for i, xi in enumerate(x0):
        v = list(x0)
        step = config.rel_step * xi
        # a step below x_tol would report convergence before moving
        v[i] = xi + (step if abs(step) >= config.x_tol else config.zero_step)
        vertices.append(v)
    return vertices


def minimize(objective, x0, config: OptimizerConfig = OptimizerConfig(), callback=None) -> OptimizerResult:
    """Minimize ``objective`` starting from ``x0``.

    ``callback(iteration, x_best, f_best)`` is invoked after every iteration.
    Raises :class:`NonFiniteObjectiveError` if the objective ever returns a
    non-finite value. If ``max_iters`` runs out, the best vertex is returned
    with ``converged=False``.
    """

    def f(x):
        val = float(objective(x))
        if not math.isfinite(val):
            raise NonFiniteObjectiveError(x, val)
        return val

    n = len(x0)
    alpha, gamma = config.reflection, config.expansion
    beta, delta = config.contraction, config.shrink

    pts = initial_simplex(x0, config)
    # each vertex is (f, index, x); index breaks ties so ordering is stable
    simplex = [(f(x), i, x) for i, x in enumerate(pts)]
    next_index = len(simplex)
    simplex.sort(key=lambda v: (v[0], v[1]))

    iterations = 0
    converged = False
    while True:
        f_best, _, x_best = simplex[0]
        size = max(max(abs(a - b) for a, b in zip(v[2], x_best)) for v in simplex[1:])
        spread = max(abs(v[0] - f_best) for v in simplex[1:])
        if size < config.x_tol and spread < config.f_tol:
            converged = True
            break
        if iterations >= config.max_iters:
            break
        iterations += 1

        f_worst, _, x_worst = simplex[-1]
        f_second = simplex[-2][0]
        centroid = [sum(v[2][j] for v in simplex[:-1]) / n for j in range(n)]

        xr = [c + alpha * (c - w) for c, w in zip(centroid, x_worst)]
        fr = f(xr)
        replacement = None
        if fr < f_best:
            xe = [c + gamma * (r - c) for c, r in zip(centroid, xr)]
            fe = f(xe)
            replacement = (fe, xe) if fe < fr else (fr, xr)
        elif fr < f_second:
            replacement = (fr, xr)
        elif fr < f_worst:
            xc = [c + beta * (r - c) for c, r in zip(centroid, xr)]
            fc = f(xc)
            if fc <= fr:
                replacement = (fc, xc)
        else:
            xcc = [c + beta * (w - c) for c, w in zip(centroid, x_worst)]
            fcc = f(xcc)
            if fcc < f_worst:
                replacement = (fcc, xcc)

        if replacement is not None:
            simplex[-1] = (replacement[0], next_index, replacement[1])
            next_index += 1
        else:
            shrunk = [simplex[0]]
            for _, _, x in simplex[1:]:
                xs = [b + delta * (xi - b) for b, xi in zip(x_best, x)]
                shrunk.append((f(xs), next_index, xs))
                next_index += 1
            simplex = shrunk
        simplex.sort(key=lambda v: (v[0], v[1]))

        if callback is not None:
            callback(iterations, tuple(simplex[0][2]), simplex[0][0])

    f_best, _, x_best = simplex[0]
    return OptimizerResult(tuple(x_best), f_best, iterations, converged)
