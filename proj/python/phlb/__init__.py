"""Randomized load balancing with phase-type service times."""

from ._core import (
    BalanceReport,
    FitError,
    FixedPointTable,
    MeanFieldState,
    ModelParams,
    MomentTriple,
    NumericalFailure,
    Ph2Fit,
    PhaseType,
    ReplicationStats,
    SimConfig,
    SimStats,
    Trajectory,
    UnstableModel,
    balance_residuals,
    coxian2,
    derivative,
    dist_from_json,
    empty_state,
    erlang,
    expected_sojourn,
    exponential,
    fit_moments,
    fixed_point_table,
    fixed_point_vector,
    hyper_exponential,
    integrate,
    lyapunov_distance,
    ordering_holds,
    ordering_violation_count,
    parse_dist,
    run_replication,
    simulate,
    state_from_table,
    stationary_solve,
    verify_fit,
)

__all__ = [
    "BalanceReport",
    "FitError",
    "FixedPointTable",
    "MeanFieldState",
    "ModelParams",
    "MomentTriple",
    "NumericalFailure",
    "Ph2Fit",
    "PhaseType",
    "ReplicationStats",
    "SimConfig",
    "SimStats",
    "Trajectory",
    "UnstableModel",
    "balance_residuals",
    "coxian2",
    "derivative",
    "dist_from_json",
    "empty_state",
    "erlang",
    "expected_sojourn",
    "exponential",
    "fit_moments",
    "fixed_point_table",
    "fixed_point_vector",
    "hyper_exponential",
    "integrate",
    "lyapunov_distance",
    "ordering_holds",
    "ordering_violation_count",
    "parse_dist",
    "run_replication",
    "simulate",
    "state_from_table",
    "stationary_solve",
    "verify_fit",
]
