"""Eigenvalue counting estimates for random Schroedinger operators."""

from ._core import (
    Measure,
    RankOneModel,
    check_generalized,
    check_wegner,
    count_dense,
    count_in_interval,
    experiment_names,
    full_spectrum,
    hamiltonian,
    interlacing_check,
    oracle_suite,
    run_config,
)

__all__ = [
    "Measure",
    "RankOneModel",
    "check_generalized",
    "check_wegner",
    "count_dense",
    "count_in_interval",
    "experiment_names",
    "full_spectrum",
    "hamiltonian",
    "interlacing_check",
    "oracle_suite",
    "run_config",
]
