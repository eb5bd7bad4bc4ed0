"""RSS-based stationary target localization: particle filter vs. trilateration."""

from rss_locate.errors import ConfigError, DomainError, NonFiniteObjectiveError
from rss_locate.rng import Rng, derive_seed
from rss_locate.signal_model import (
    PathLossParams,
    RssMeasurement,
    invert_distance,
    predict_rss,
    predict_rss_guarded,
    sample_measurements,
)
from rss_locate.particle_filter import (
    Diagnostics,
    ParticleSet,
    PfConfig,
    SearchArea,
    compute_weights,
    estimate,
    init_particles,
    pf_step,
    resample,
)
from rss_locate.optimizer import OptimizerConfig, OptimizerResult, minimize
from rss_locate.trilateration import TrilaterationConfig, accumulate_rss, trilaterate
from rss_locate.scenario import Scenario, bad_geometry, good_geometry, load_scenario, save_scenario

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "DomainError",
    "NonFiniteObjectiveError",
    "Rng",
    "derive_seed",
    "PathLossParams",
    "RssMeasurement",
    "invert_distance",
    "predict_rss",
    "predict_rss_guarded",
    "sample_measurements",
    "Diagnostics",
    "ParticleSet",
    "PfConfig",
    "SearchArea",
    "compute_weights",
    "estimate",
    "init_particles",
    "pf_step",
    "resample",
    "OptimizerConfig",
    "OptimizerResult",
    "minimize",
    "TrilaterationConfig",
    "accumulate_rss",
    "trilaterate",
    "Scenario",
    "bad_geometry",
    "good_geometry",
    "load_scenario",
    "save_scenario",
]
