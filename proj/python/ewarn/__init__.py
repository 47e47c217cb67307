"""Bayesian early-warning trend detection for epidemic proxy signals."""

from ._ewarn import (
    ConfigError,
    DataError,
    EwarnError,
    NumericalError,
    detect_events,
    fit_idea,
    grid_oracle,
    harmonic_mean_p,
    idea_incidence,
    time_to_event,
    trend_pvalues,
    uptrend_pvalue,
)

__all__ = [
    "ConfigError",
    "DataError",
    "EwarnError",
    "NumericalError",
    "detect_events",
    "fit_idea",
    "grid_oracle",
    "harmonic_mean_p",
    "idea_incidence",
    "time_to_event",
    "trend_pvalues",
    "uptrend_pvalue",
]
