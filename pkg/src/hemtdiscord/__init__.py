"""Gaussian quantum discord of the two-mode microwave state of a cryogenic
HEMT circuit: steady state, Langevin fluctuations, covariance matrix,
first-order level mixing and frequency x gN2 sweeps."""

__version__ = "0.1.0"

from .errors import (
    ConfigError,
    DegenerateChannelError,
    DegenerateLevelError,
    DegenerateNetworkError,
    DegenerateSteadyStateError,
    DomainError,
    HemtError,
    NonPhysicalStateError,
    NumericalError,
    ResonanceSingularityError,
)
from .gaussian import CorrelationReport, TwoModeCM, covariance_matrix, gaussian_discord
from .params import DeviceParams, NonlinearInputs, default_config, load_config
from .sweep import SweepConfig, SweepResult, run_point, run_sweep

__all__ = [
    "ConfigError", "DegenerateChannelError", "DegenerateLevelError", "DegenerateNetworkError",
    "DegenerateSteadyStateError", "DomainError", "HemtError", "NonPhysicalStateError",
    "NumericalError", "ResonanceSingularityError",
    "CorrelationReport", "TwoModeCM", "covariance_matrix", "gaussian_discord",
    "DeviceParams", "NonlinearInputs", "default_config", "load_config",
    "SweepConfig", "SweepResult", "run_point", "run_sweep",
]
