"""Log-distance path-loss model.

RSS values are plain dB. Positions are 2-D and may be given as tuples or
numpy arrays; array inputs broadcast over leading dimensions.
"""

import math
from dataclasses import dataclass

import numpy as np

from rss_locate.errors import ConfigError, DomainError

DEFAULT_EPSILON = 1e-6


@dataclass(frozen=True)
class PathLossParams:
    p0_db: float = -30.0
    beta: float = 2.5
    sigma_db: float = 5.0

    def __post_init__(self):
        for name in ("p0_db", "beta", "sigma_db"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"{name} must be finite")
        if self.beta <= 0:
            raise ConfigError(f"beta must be > 0, got {self.beta}")
        if self.sigma_db < 0:
            raise ConfigError(f"sigma must be ≥ 0, got {self.sigma_db}")


@dataclass(frozen=True)
class RssMeasurement:
    sensor_id: int
    value_db: float


def _distance(a, b):
    diff = np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
    return np.hypot(diff[..., 0], diff[..., 1])


def _scalar_or_array(x):
    return float(x) if np.ndim(x) == 0 else x


def predict_rss(params: PathLossParams, target, sensor):
    """Noiseless RSS at ``sensor`` from a transmitter at ``target``."""
    d = _distance(target, sensor)
    if np.any(d <= 0):
        raise DomainError("target coincides with a sensor; distance must be > 0")
    return _scalar_or_array(params.p0_db - 10.0 * params.beta * np.log10(d))


def predict_rss_guarded(params: PathLossParams, particle, sensor, epsilon=DEFAULT_EPSILON):
    """Like :func:`predict_rss` but with ``epsilon`` added to the distance, so it is
    finite everywhere, including at the sensor itself."""
    if not epsilon > 0:
        raise ConfigError(f"epsilon must be > 0, got {epsilon}")
    d = _distance(particle, sensor)
    return _scalar_or_array(params.p0_db - 10.0 * params.beta * np.log10(d + epsilon))


def sample_measurements(params: PathLossParams, target, sensors, rng) -> list:
    """Draw one noisy RSS value per sensor.

    Consumes exactly ``len(sensors)`` standard-normal draws from ``rng``, in
    sensor order, even when ``sigma_db`` is 0.
    """
    sensors = np.asarray(sensors, dtype=float).reshape(-1, 2)
    if len(sensors) == 0:
        raise ConfigError("at least one sensor is required")
    clean = np.atleast_1d(predict_rss(params, target, sensors))
    z = rng.standard_normal(len(sensors))
    values = clean + params.sigma_db * z
    return [RssMeasurement(i, float(v)) for i, v in enumerate(values)]


def invert_distance(params: PathLossParams, rss_db):
    """Distance implied by an RSS value (inverse of :func:`predict_rss`)."""
    rss = np.asarray(rss_db, dtype=float)
    return _scalar_or_array(10.0 ** ((params.p0_db - rss) / (10.0 * params.beta)))


def measurement_values(measurements, n_sensors: int) -> np.ndarray:
    """Order measurements by sensor id, checking each of the ``n_sensors`` ids appears once."""
    values = np.full(n_sensors, np.nan)
    seen = set()
    for m in measurements:
        if not 0 <= m.sensor_id < n_sensors:
            raise ConfigError(f"sensor_id {m.sensor_id} out of range for {n_sensors} sensors")
        if m.sensor_id in seen:
            raise ConfigError(f"duplicate measurement for sensor {m.sensor_id}")
        if not math.isfinite(m.value_db):
            raise ConfigError(f"measurement for sensor {m.sensor_id} is not finite")
        seen.add(m.sensor_id)
        values[m.sensor_id] = m.value_db
    if len(seen) != n_sensors:
        missing = sorted(set(range(n_sensors)) - seen)
        raise ConfigError(f"missing measurements for sensors {missing}")
    return values
