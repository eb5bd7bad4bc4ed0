"""Sensor placements and scenario files.

Scenario file format (JSON, all four keys required, no others allowed)::

    {
      "label": "bad",
      "target": [0.0, 0.0],
      "sensors": [[34.64, -20.0], [39.39, -6.95], [39.39, 6.95], [34.64, 20.0]],
      "area": [[-50.0, -50.0], [50.0, 50.0]]
    }
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from rss_locate.errors import ConfigError
from rss_locate.particle_filter import SearchArea

SCENARIO_KEYS = ("label", "target", "sensors", "area")


@dataclass(frozen=True)
class Scenario:
    target: tuple
    sensors: tuple
    area: SearchArea = field(default_factory=SearchArea)
    label: str = "custom"

    def __post_init__(self):
        target = _point(self.target, "target")
        sensors = tuple(_point(s, f"sensors[{i}]") for i, s in enumerate(self.sensors))
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "sensors", sensors)
        if len(sensors) < 3:
            raise ConfigError(f"sensors: at least 3 sensors are required, got {len(sensors)}")
        if len(set(sensors)) != len(sensors):
            raise ConfigError("sensors: positions must be pairwise distinct")
        if target in sensors:
            raise ConfigError("target: must not coincide with a sensor")
        inside = self.area.contains((target,) + sensors)
        if not inside[0]:
            raise ConfigError(f"target: {target} lies outside the search area")
        for i, ok in enumerate(inside[1:]):
            if not ok:
                raise ConfigError(f"sensors[{i}]: {sensors[i]} lies outside the search area")

    @property
    def sensor_array(self):
        return np.array(self.sensors, dtype=float)

    def to_dict(self):
        return {
            "label": self.label,
            "target": list(self.target),
            "sensors": [list(s) for s in self.sensors],
            "area": [list(self.area.min_corner), list(self.area.max_corner)],
        }


def _point(value, name):
    try:
        pt = tuple(float(v) for v in value)
    except (TypeError, ValueError):
        raise ConfigError(f"{name}: expected a pair of numbers, got {value!r}") from None
    if len(pt) != 2 or not all(math.isfinite(v) for v in pt):
        raise ConfigError(f"{name}: expected a pair of finite numbers, got {value!r}")
    return pt


def _ring(target, radius, angles_rad):
    tx, ty = target
    return tuple((tx + radius * math.cos(a), ty + radius * math.sin(a)) for a in angles_rad)


def _build(target, sensors, area, label):
    area = area or SearchArea()
    try:
        return Scenario(target, sensors, area, label)
    except ConfigError as exc:
        raise ConfigError(f"{label} geometry does not fit the search area: {exc}") from None


def good_geometry(m=4, radius=40.0, target=(0.0, 0.0), area=None) -> Scenario:
    """``m`` sensors evenly spaced on a circle around the target."""
    if m < 3:
        raise ConfigError(f"sensors: at least 3 sensors are required, got {m}")
    if not radius > 0:
        raise ConfigError("radius must be > 0")
    angles = [2.0 * math.pi * k / m for k in range(m)]
    return _build(target, _ring(target, radius, angles), area, "good")


def bad_geometry(m=4, radius=40.0, arc_degrees=60.0, target=(0.0, 0.0), area=None) -> Scenario:
    """``m`` sensors spread evenly over an arc centred on the +x axis, all on one side of the target."""
    if m < 3:
        raise ConfigError(f"sensors: at least 3 sensors are required, got {m}")
    if not radius > 0:
        raise ConfigError("radius must be > 0")
    if not 0 < arc_degrees <= 90:
        raise ConfigError(f"arc must be in (0, 90] degrees, got {arc_degrees}")
    half = arc_degrees / 2.0
    angles = [math.radians(-half + arc_degrees * k / (m - 1)) for k in range(m)]
    return _build(target, _ring(target, radius, angles), area, "bad")


def scenario_from_dict(data) -> Scenario:
    if not isinstance(data, dict):
        raise ConfigError("scenario file must contain a JSON object")
    unknown = sorted(set(data) - set(SCENARIO_KEYS))
    if unknown:
        raise ConfigError(f"unknown scenario keys: {', '.join(unknown)}")
    missing = [k for k in SCENARIO_KEYS if k not in data]
    if missing:
        raise ConfigError(f"missing scenario keys: {', '.join(missing)}")
    if not isinstance(data["label"], str):
        raise ConfigError("label: must be a string")
    if not isinstance(data["sensors"], list):
        raise ConfigError("sensors: must be a list of [x, y] pairs")
    area = data["area"]
    if not (isinstance(area, list) and len(area) == 2):
        raise ConfigError("area: expected [[xmin, ymin], [xmax, ymax]]")
    try:
        search_area = SearchArea(_point(area[0], "area[0]"), _point(area[1], "area[1]"))
    except ConfigError as exc:
        raise ConfigError(f"area: {exc}") from None
    return Scenario(data["target"], data["sensors"], search_area, data["label"])


def load_scenario(path) -> Scenario:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON: {exc}") from None
    try:
        return scenario_from_dict(data)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def save_scenario(scenario: Scenario, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(scenario.to_dict(), fh, indent=2)
        fh.write("\n")
