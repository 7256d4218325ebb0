"""Wave energy converter simulator with a dual-control PTO controller."""

from ._core import (
    ConfigError,
    DomainError,
    NumericError,
    PtoProfile,
    WaveParams,
    WecParams,
    average_power,
    feasible_optimal_power,
    optimal_average_power,
    optimal_profile,
    run_scenario,
    simulated_average_power,
    steady_average_power,
    validate,
)

__all__ = [
    "ConfigError",
    "DomainError",
    "NumericError",
    "PtoProfile",
    "WaveParams",
    "WecParams",
    "average_power",
    "feasible_optimal_power",
    "optimal_average_power",
    "optimal_profile",
    "run_scenario",
    "simulated_average_power",
    "steady_average_power",
    "validate",
]
