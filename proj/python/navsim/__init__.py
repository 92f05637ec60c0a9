"""Bearings-only cislunar navigation with an LPV H-infinity observer."""

from ._core import (
    EARTH_MOON_MU,
    KM_PER_DU,
    BoxMismatch,
    ConfigError,
    DegenerateDistance,
    Error,
    IoError,
    NearCollinear,
    NonPositiveRange,
    NotObservable,
    ObserverGain,
    ParseError,
    Scenario,
    SchemaError,
    StepFailure,
    SynthesisFailed,
    Unstable,
    ValidationError,
    analyze,
    hinf_norm,
    initial_gain,
    jacobi_constant,
    monte_carlo,
    propagate,
    reconstruct_ranges,
    simulate,
    simulate_to_csv,
    synthesize,
    worst_case_gamma,
)

__all__ = [name for name in dir() if not name.startswith("_")]
