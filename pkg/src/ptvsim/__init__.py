"""Monte Carlo energy simulator for a device in an IRS-coated vehicle with WET and MEC."""
from .model import (
    ConfigError,
    ScenarioConfig,
    ScenarioKind,
    link_distances,
    time_split,
    validate_config,
)
from .engine import monte_carlo, ratio_sweep, simulate_trajectory

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "ScenarioConfig",
    "ScenarioKind",
    "link_distances",
    "monte_carlo",
    "ratio_sweep",
    "simulate_trajectory",
    "time_split",
    "validate_config",
]
