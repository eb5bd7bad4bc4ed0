"""Particle filter for a stationary RSS-emitting target.

Each epoch the filter weights every particle by the Gaussian likelihood of
the current RSS vector, keeps ``round(rho * N)`` particles selected by weight,
refills the rest uniformly over the search area and reports the plain mean of
the resulting cloud. There is no motion model.

Two selection schemes are available: ``"top"`` keeps the ``round(rho * N)``
heaviest particles, ``"systematic"`` draws that many with low-variance
resampling (duplicates allowed).
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np

from rss_locate.errors import ConfigError
from rss_locate.signal_model import DEFAULT_EPSILON, PathLossParams, measurement_values

RESAMPLERS = ("systematic", "top")


@dataclass(frozen=True)
class SearchArea:
    min_corner: tuple = (-50.0, -50.0)
    max_corner: tuple = (50.0, 50.0)

    def __post_init__(self):
        lo = tuple(float(v) for v in self.min_corner)
        hi = tuple(float(v) for v in self.max_corner)
        if len(lo) != 2 or len(hi) != 2:
            raise ConfigError("area corners must be 2-D points")
        if not all(math.isfinite(v) for v in lo + hi):
            raise ConfigError("area corners must be finite")
        if not (lo[0] < hi[0] and lo[1] < hi[1]):
            raise ConfigError(f"area min_corner {lo} must be < max_corner {hi} component-wise")
        object.__setattr__(self, "min_corner", lo)
        object.__setattr__(self, "max_corner", hi)

    @property
    def center(self):
        return tuple((a + b) / 2 for a, b in zip(self.min_corner, self.max_corner))

    def contains(self, points, tol=0.0):
        pts = np.asarray(points, dtype=float).reshape(-1, 2)
        lo = np.asarray(self.min_corner) - tol
        hi = np.asarray(self.max_corner) + tol
        return np.all((pts >= lo) & (pts <= hi), axis=1)

    def sample(self, rng, n):
        return rng.uniform(self.min_corner, self.max_corner, size=(n, 2))


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


@dataclass(frozen=True)
class PfConfig:
    """Filter settings.

    ``sigma_weight_db`` overrides the noise level used in the likelihood; by
    default the simulation sigma is used, and ``zero_noise_sigma_db`` stands
    in when that sigma is 0 (the likelihood is undefined at sigma = 0).
    """

    n_particles: int = 1000
    rho: float = 0.9
    epsilon: float = DEFAULT_EPSILON
    area: SearchArea = field(default_factory=SearchArea)
    resampler: str = "top"
    jitter_std_m: float = 0.0
    sigma_weight_db: float | None = None
    zero_noise_sigma_db: float = 1.0

    def __post_init__(self):
        if int(self.n_particles) != self.n_particles or self.n_particles < 1:
            raise ConfigError(f"n_particles must be an integer ≥ 1, got {self.n_particles}")
        if not 0.0 <= self.rho <= 1.0:
            raise ConfigError(f"rho must be in [0, 1], got {self.rho}")
        if not self.epsilon > 0:
            raise ConfigError(f"epsilon must be > 0, got {self.epsilon}")
        if self.resampler not in RESAMPLERS:
            raise ConfigError(f"resampler must be one of {RESAMPLERS}, got {self.resampler!r}")
        if not self.jitter_std_m >= 0:
            raise ConfigError("jitter_std_m must be ≥ 0")
        if self.sigma_weight_db is not None and not self.sigma_weight_db > 0:
            raise ConfigError("sigma_weight_db must be > 0")
        if not self.zero_noise_sigma_db > 0:
            raise ConfigError("zero_noise_sigma_db must be > 0")

    @property
    def n_resampled(self) -> int:
        """Particles kept from the weighted set; the rest are injected uniformly."""
        return min(self.n_particles, max(0, round_half_up(self.rho * self.n_particles)))

    def weighting_sigma(self, sim_sigma_db: float) -> float:
        if self.sigma_weight_db is not None:
            return self.sigma_weight_db
        return sim_sigma_db if sim_sigma_db > 0 else self.zero_noise_sigma_db


@dataclass
class ParticleSet:
    positions: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        self.positions = np.asarray(self.positions, dtype=float).reshape(-1, 2)
        self.weights = np.asarray(self.weights, dtype=float)
        if self.weights.shape != (len(self.positions),):
            raise ConfigError("positions and weights must have the same length")

    def __len__(self):
        return len(self.positions)

    def copy(self):
        return ParticleSet(self.positions.copy(), self.weights.copy())


@dataclass
class Diagnostics:
    """Counts numerical fallbacks; pass one to :func:`compute_weights` to collect them."""

    uniform_fallbacks: int = 0


def init_particles(config: PfConfig, rng) -> ParticleSet:
    n = config.n_particles
    return ParticleSet(config.area.sample(rng, n), np.full(n, 1.0 / n))


def log_likelihoods(positions, measured, sensors, params: PathLossParams, epsilon, sigma_db=None):
    """Unnormalized log-weights -sum_m (measured_m - predicted_m)^2 / (2 sigma^2)."""
    sigma = params.sigma_db if sigma_db is None else sigma_db
    if not sigma > 0:
        raise ConfigError("weighting requires sigma > 0")
    pos = np.asarray(positions, dtype=float).reshape(-1, 2)
    sensors = np.asarray(sensors, dtype=float).reshape(-1, 2)
    diff = pos[:, None, :] - sensors[None, :, :]
    dist = np.hypot(diff[..., 0], diff[..., 1])
    predicted = params.p0_db - 10.0 * params.beta * np.log10(dist + epsilon)
    resid = np.asarray(measured, dtype=float)[None, :] - predicted
    return -np.sum(resid * resid, axis=1) / (2.0 * sigma * sigma)


def normalize_log_weights(logw, diagnostics: Diagnostics | None = None) -> np.ndarray:
    logw = np.asarray(logw, dtype=float)
    top = np.max(logw) if len(logw) else -np.inf
    if not np.isfinite(top):
        return _uniform_fallback(len(logw), diagnostics)
    w = np.exp(logw - top)
    total = w.sum()
    if not (np.isfinite(total) and total > 0):
        return _uniform_fallback(len(logw), diagnostics)
    return w / total


def _uniform_fallback(n, diagnostics):
    if diagnostics is not None:
        diagnostics.uniform_fallbacks += 1
    return np.full(n, 1.0 / n)


def compute_weights(
    pset: ParticleSet,
    measurements,
    sensors,
    params: PathLossParams,
    epsilon=DEFAULT_EPSILON,
    diagnostics: Diagnostics | None = None,
    sigma_db: float | None = None,
) -> np.ndarray:
    """Normalized likelihood weights of every particle, computed in the log domain.

    ``sigma_db`` defaults to ``params.sigma_db``.
    """
    sensors = np.asarray(sensors, dtype=float).reshape(-1, 2)
    measured = measurement_values(measurements, len(sensors))
    logw = log_likelihoods(pset.positions, measured, sensors, params, epsilon, sigma_db)
    return normalize_log_weights(logw, diagnostics)


def systematic_indices(weights, n_draws: int, rng) -> np.ndarray:
    """Low-variance resampling: one uniform offset, ``n_draws`` evenly spaced pointers."""
    if n_draws == 0:
        return np.zeros(0, dtype=np.intp)
    cumulative = np.cumsum(weights)
    cumulative[-1] = 1.0
    pointers = (rng.uniform() + np.arange(n_draws)) / n_draws
    return np.searchsorted(cumulative, pointers, side="right")


def top_indices(weights, n_keep: int) -> np.ndarray:
    """Indices of the ``n_keep`` heaviest particles; ties keep the lower index first."""
    order = np.argsort(-np.asarray(weights), kind="stable")
    return order[:n_keep]


def resample(pset: ParticleSet, config: PfConfig, rng) -> ParticleSet:
    n = len(pset)
    if n != config.n_particles:
        raise ConfigError(f"particle set has {n} particles, config expects {config.n_particles}")
    k = config.n_resampled
    if config.resampler == "systematic":
        idx = systematic_indices(pset.weights, k, rng)
    else:
        idx = top_indices(pset.weights, k)
    kept = pset.positions[idx]
    if config.jitter_std_m > 0 and k:
        kept = kept + config.jitter_std_m * rng.standard_normal(kept.shape)
        kept = np.clip(kept, config.area.min_corner, config.area.max_corner)
    fresh = config.area.sample(rng, n - k)
    return ParticleSet(np.vstack([kept, fresh]), np.full(n, 1.0 / n))


def estimate(pset: ParticleSet) -> np.ndarray:
    """Unweighted mean of the particle positions."""
    if len(pset) == 0:
        raise ConfigError("cannot estimate from an empty particle set")
    return pset.positions.mean(axis=0)


def pf_step(pset, measurements, sensors, params: PathLossParams, config: PfConfig, rng,
            diagnostics: Diagnostics | None = None):
    """One epoch: weight, resample, estimate. Returns ``(new_set, estimate)``."""
    sigma = config.weighting_sigma(params.sigma_db)
    weights = compute_weights(pset, measurements, sensors, params, config.epsilon,
                              diagnostics, sigma_db=sigma)
    new = resample(replace(pset, weights=weights), config, rng)
    return new, estimate(new)
