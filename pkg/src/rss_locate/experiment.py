"""Monte Carlo harness: error-vs-epoch runs, noise sweeps and CSV output.

Random streams are derived per (trial, epoch) from the base seed, so the
records of a trial do not depend on execution order or worker count. Within
one epoch both estimators see the same measurement vector.
"""

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace

import numpy as np

from rss_locate.errors import ConfigError
from rss_locate.particle_filter import Diagnostics, PfConfig, init_particles, pf_step
from rss_locate.rng import Rng, derive_seed
from rss_locate.scenario import Scenario, good_geometry
from rss_locate.signal_model import PathLossParams, sample_measurements
from rss_locate.trilateration import (
    TrilaterationConfig,
    accumulate_distances,
    accumulate_rss,
    trilaterate,
    trilaterate_ranges,
)

PF = "particle_filter"
TRI = "trilateration"
METHODS = (PF, TRI)
SWEEP_METRICS = ("mean", "final")
FLOAT_FORMAT = ".9g"


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: Scenario = field(default_factory=good_geometry)
    params: PathLossParams = field(default_factory=PathLossParams)
    pf: PfConfig = field(default_factory=PfConfig)
    tri: TrilaterationConfig = field(default_factory=TrilaterationConfig)
    epochs: int = 100
    trials: int = 50
    seed: int = 0
    methods: tuple = METHODS

    def __post_init__(self):
        object.__setattr__(self, "methods", tuple(self.methods))
        if int(self.epochs) != self.epochs or self.epochs < 1:
            raise ConfigError(f"epochs must be an integer ≥ 1, got {self.epochs}")
        if int(self.trials) != self.trials or self.trials < 1:
            raise ConfigError(f"trials must be an integer ≥ 1, got {self.trials}")
        if not self.methods:
            raise ConfigError("at least one method is required")
        bad = [m for m in self.methods if m not in METHODS]
        if bad:
            raise ConfigError(f"unknown methods {bad}; choose from {METHODS}")
        if len(set(self.methods)) != len(self.methods):
            raise ConfigError("methods must not repeat")
        if self.pf.area != self.scenario.area:
            object.__setattr__(self, "pf", replace(self.pf, area=self.scenario.area))
        Rng(self.seed)  # validates the seed range


@dataclass(frozen=True)
class EpochRecord:
    sigma_db: float
    trial: int
    epoch: int
    method: str
    error_m: float
    converged: bool
    seed: int


@dataclass(frozen=True)
class SweepSummary:
    sigma_db: float
    method: str
    mean_error_m: float
    std_error_m: float
    trials: int


def _sort_key(rec):
    return (rec.sigma_db, rec.trial, rec.epoch, METHODS.index(rec.method))


def run_trial(config: ExperimentConfig, trial: int) -> list:
    """One independent filter/trilateration run over ``config.epochs`` epochs."""
    scen = config.scenario
    sensors = scen.sensor_array
    target = np.asarray(scen.target)
    params = config.params
    use_pf, use_tri = PF in config.methods, TRI in config.methods

    pset = init_particles(config.pf, Rng(derive_seed(config.seed, trial, 0))) if use_pf else None
    diagnostics = Diagnostics()
    history = [[] for _ in range(len(sensors))]
    records = []
    for epoch in range(1, config.epochs + 1):
        epoch_seed = derive_seed(config.seed, trial, epoch)
        rng = Rng(epoch_seed)
        meas = sample_measurements(params, target, sensors, rng)
        if use_pf:
            pset, est = pf_step(pset, meas, sensors, params, config.pf, rng, diagnostics)
            err = float(np.hypot(*(est - target)))
            records.append(EpochRecord(params.sigma_db, trial, epoch, PF, err, True, epoch_seed))
        if use_tri:
            for m in meas:
                history[m.sensor_id].append(m.value_db)
            res = _trilaterate_epoch(sensors, meas, history, params, config.tri, scen.area)
            err = math.hypot(res.x_min[0] - target[0], res.x_min[1] - target[1])
            records.append(EpochRecord(params.sigma_db, trial, epoch, TRI, err, res.converged, epoch_seed))
    return records


def _trilaterate_epoch(sensors, meas, history, params, tri: TrilaterationConfig, area):
    if not tri.accumulate:
        return trilaterate(sensors, meas, params, tri, area)
    if tri.average == "rss":
        return trilaterate(sensors, accumulate_rss(history), params, tri, area)
    return trilaterate_ranges(sensors, accumulate_distances(history, params), tri, area)


def _run_task(task):
    config, trial = task
    return run_trial(config, trial)


def _run_tasks(tasks, workers=1):
    if workers is None or workers <= 1 or len(tasks) <= 1:
        chunks = [_run_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_run_task, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    records = [r for chunk in chunks for r in chunk]
    records.sort(key=_sort_key)
    return records


def run_epoch_experiment(config: ExperimentConfig, workers: int = 1) -> list:
    """All trials of one configuration, sorted by (sigma, trial, epoch, method)."""
    return _run_tasks([(config, t) for t in range(config.trials)], workers)


def mean_std(values):
    """Mean and sample standard deviation (0 for a single value)."""
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        raise ConfigError("cannot summarize an empty sample")
    mean = float(arr.mean())
    std = float(arr.std(ddof=1)) if arr.size > 1 else 0.0
    return mean, std


def summarize(records, metric: str = "mean") -> list:
    """Per (sigma, method): mean and std across trials of each trial's error.

    ``metric="mean"`` scores a trial by its average error over all epochs,
    ``metric="final"`` by its last-epoch error.
    """
    if metric not in SWEEP_METRICS:
        raise ConfigError(f"metric must be one of {SWEEP_METRICS}, got {metric!r}")
    per_trial = {}
    for rec in records:
        per_trial.setdefault((rec.sigma_db, rec.method), {}).setdefault(rec.trial, []).append(
            (rec.epoch, rec.error_m))
    out = []
    for (sigma, method), trials in sorted(per_trial.items(), key=lambda kv: (kv[0][0], METHODS.index(kv[0][1]))):
        scores = []
        for trial in sorted(trials):
            errs = trials[trial]
            scores.append(math.fsum(e for _, e in errs) / len(errs) if metric == "mean" else max(errs)[1])
        mean, std = mean_std(scores)
        out.append(SweepSummary(sigma, method, mean, std, len(scores)))
    return out


def run_noise_sweep(config: ExperimentConfig, sigmas, workers: int = 1, metric: str = "mean",
                    return_records: bool = False):
    """Repeat the epoch experiment at each noise level and summarize per method.

    With ``return_records`` the raw epoch records are returned as well.
    """
    sigmas = [float(s) for s in sigmas]
    if not sigmas:
        raise ConfigError("at least one sigma is required")
    if any(not (math.isfinite(s) and s >= 0) for s in sigmas):
        raise ConfigError("sigma must be ≥ 0")
    if len(set(sigmas)) != len(sigmas):
        raise ConfigError("sigmas must not repeat")
    tasks = []
    for s in sigmas:
        cfg = replace(config, params=replace(config.params, sigma_db=s))
        tasks.extend((cfg, t) for t in range(config.trials))
    records = _run_tasks(tasks, workers)
    summaries = summarize(records, metric)
    return (summaries, records) if return_records else summaries


def final_epoch_means(records) -> dict:
    """Mean error at the last epoch, per method."""
    last = max(r.epoch for r in records)
    out = {}
    for m in METHODS:
        errs = [r.error_m for r in records if r.method == m and r.epoch == last]
        if errs:
            out[m] = math.fsum(errs) / len(errs)
    return out


# --- CSV -----------------------------------------------------------------

def config_metadata(config: ExperimentConfig, **extra) -> dict:
    meta = {
        "scenario": config.scenario.to_dict(),
        "params": asdict(config.params),
        "pf": asdict(config.pf),
        "tri": asdict(config.tri),
        "epochs": config.epochs,
        "trials": config.trials,
        "seed": config.seed,
        "methods": list(config.methods),
        "rng": Rng.algorithm,
    }
    meta.update(extra)
    return meta


def _format(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, FLOAT_FORMAT)
    return str(value)


def write_csv(rows, path, row_type=None, metadata=None):
    """Write records or summaries as CSV, preceded by ``# key: value`` metadata lines.

    ``row_type`` is only needed when ``rows`` is empty.
    """
    rows = list(rows)
    row_type = row_type or (type(rows[0]) if rows else None)
    if row_type not in (EpochRecord, SweepSummary):
        raise ConfigError("row_type must be EpochRecord or SweepSummary")
    columns = [f.name for f in fields(row_type)]
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            for key, value in (metadata or {}).items():
                fh.write(f"# {key}: {json.dumps(value, sort_keys=True, ensure_ascii=False)}\r\n")
            writer = csv.writer(fh)
            writer.writerow(columns)
            for row in rows:
                writer.writerow([_format(getattr(row, c)) for c in columns])
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc.strerror or exc}") from exc


def _parse(value, typ):
    if typ is bool or typ == "bool":
        return value == "true"
    if typ is int or typ == "int":
        return int(value)
    if typ is float or typ == "float":
        return float(value)
    return value


def read_csv(path, row_type):
    """Parse a file written by :func:`write_csv`. Returns ``(rows, metadata)``."""
    metadata = {}
    body = []
    with open(path, newline="", encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition(": ")
                metadata[key] = json.loads(value)
            else:
                body.append(line)
    reader = csv.reader(body)
    header = next(reader)
    types = {f.name: f.type for f in fields(row_type)}
    if header != list(types):
        raise ConfigError(f"{path}: unexpected columns {header}")
    rows = [row_type(**{c: _parse(v, types[c]) for c, v in zip(header, line)}) for line in reader]
    return rows, metadata
