"""Epidemic inference from survival dynamics: exact stochastic simulation,
mean-field limits, and marginal likelihoods for partially observed outbreaks."""

from ._core import (
    ConfigError,
    CountData,
    DomainError,
    EventRecord,
    GridSpec,
    InfectiousPeriod,
    IntegrationError,
    ModelParams,
    Trajectory,
    Variant,
    aggregate_counts,
    density_infection,
    estimate_population,
    loglik_complete,
    loglik_counts,
    loglik_infection_times,
    sellke_simulate,
    simulate_dsa_counts,
    solve,
    solve_tau,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "CountData",
    "DomainError",
    "EventRecord",
    "GridSpec",
    "InfectiousPeriod",
    "IntegrationError",
    "ModelParams",
    "Trajectory",
    "Variant",
    "aggregate_counts",
    "density_infection",
    "estimate_population",
    "loglik_complete",
    "loglik_counts",
    "loglik_infection_times",
    "sellke_simulate",
    "simulate_dsa_counts",
    "solve",
    "solve_tau",
]
