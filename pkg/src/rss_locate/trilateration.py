"""RSS trilateration baseline: invert RSS to ranges, then solve the range
least-squares problem with Nelder-Mead."""

import math
from dataclasses import dataclass, field

import numpy as np

from rss_locate.errors import ConfigError
from rss_locate.optimizer import OptimizerConfig, OptimizerResult, minimize
from rss_locate.signal_model import PathLossParams, RssMeasurement, invert_distance, measurement_values

INITIAL_GUESS_POLICIES = ("sensor_centroid", "area_center", "custom")
AVERAGING_DOMAINS = ("distance", "rss")


@dataclass(frozen=True)
class TrilaterationConfig:
    """Epoch handling for repeated measurements.

    With ``accumulate`` on, every epoch seen so far contributes: ``average="distance"``
    inverts each RSS value to a range and averages the ranges per sensor,
    ``average="rss"`` averages the dB values first and inverts the mean. With
    ``accumulate`` off only the current epoch is used.
    """

    accumulate: bool = True
    average: str = "distance"
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    initial_guess_policy: str = "sensor_centroid"
    custom_guess: tuple | None = None

    def __post_init__(self):
        if self.average not in AVERAGING_DOMAINS:
            raise ConfigError(f"average must be one of {AVERAGING_DOMAINS}, got {self.average!r}")
        if self.initial_guess_policy not in INITIAL_GUESS_POLICIES:
            raise ConfigError(
                f"initial_guess_policy must be one of {INITIAL_GUESS_POLICIES}, "
                f"got {self.initial_guess_policy!r}"
            )
        if self.initial_guess_policy == "custom" and self.custom_guess is None:
            raise ConfigError("custom initial guess policy needs custom_guess")


def range_objective(sensors, ranges):
    """Sum of squared differences between distance-to-sensor and estimated range."""
    pts = [(float(s[0]), float(s[1]), float(d)) for s, d in zip(sensors, ranges)]

    def objective(x):
        px, py = x[0], x[1]
        total = 0.0
        for sx, sy, d in pts:
            r = math.hypot(px - sx, py - sy) - d
            total += r * r
        return total

    return objective


def initial_guess(sensors, config: TrilaterationConfig, area=None):
    if config.initial_guess_policy == "sensor_centroid":
        return tuple(np.mean(np.asarray(sensors, dtype=float), axis=0))
    if config.initial_guess_policy == "area_center":
        if area is None:
            raise ConfigError("area_center initial guess needs a search area")
        return area.center
    return tuple(float(v) for v in config.custom_guess)


def trilaterate(sensors, rss, params: PathLossParams,
                config: TrilaterationConfig = TrilaterationConfig(), area=None) -> OptimizerResult:
    """Least-squares position fix from one RSS value per sensor.

    Returns the optimizer result; ``x_min`` is the position estimate and
    ``converged`` reports whether the simplex met its tolerances.
    """
    sensors = np.asarray(sensors, dtype=float).reshape(-1, 2)
    values = measurement_values(rss, len(sensors))
    return trilaterate_ranges(sensors, invert_distance(params, values), config, area)


def trilaterate_ranges(sensors, ranges, config: TrilaterationConfig = TrilaterationConfig(),
                       area=None) -> OptimizerResult:
    """Least-squares position fix from one range estimate per sensor."""
    sensors = np.asarray(sensors, dtype=float).reshape(-1, 2)
    ranges = np.atleast_1d(np.asarray(ranges, dtype=float))
    if len(sensors) < 3:
        raise ConfigError(f"trilateration needs at least 3 sensors, got {len(sensors)}")
    if ranges.shape != (len(sensors),):
        raise ConfigError(f"expected {len(sensors)} ranges, got {ranges.shape}")
    objective = range_objective(sensors, ranges)
    return minimize(objective, initial_guess(sensors, config, area), config.optimizer)


def _check_history(history):
    if len(history) == 0:
        raise ConfigError("RSS history is empty")
    for m, values in enumerate(history):
        if len(values) == 0:
            raise ConfigError(f"RSS history for sensor {m} is empty")


def accumulate_rss(history) -> list:
    """Per-sensor arithmetic mean of every RSS value (dB) observed so far.

    ``history[m]`` is the list of values recorded by sensor ``m``.
    """
    _check_history(history)
    return [RssMeasurement(m, math.fsum(values) / len(values)) for m, values in enumerate(history)]


def accumulate_distances(history, params: PathLossParams) -> np.ndarray:
    """Per-sensor mean of the ranges implied by each RSS value in ``history``."""
    _check_history(history)
    return np.array([
        math.fsum(np.atleast_1d(invert_distance(params, values))) / len(values) for values in history
    ])
