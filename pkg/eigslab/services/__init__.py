"""
Services package initialization.
"""
from .system import EIGSystem, RuleGraph, LevelGraph, load_system, build, substitute, predict_counts
from .validation import validate, validate_canonical, validate_distance_positive
from .spectral import mass_matrix, degree_matrix, distance_family, spectral_radius, rho_min
from .resistance import effective_resistance, grounded_resistance, psi, psi_eigenpair, verify_renormalisation
from .dims import dimensions, local_dimensions, table1
from .walker import srw_step, exit_times, walk_dimension_estimate, commute_time, return_probability, trace
from .percolation import (
    perc_params,
    step_population,
    estimate_alpha,
    exact_distribution,
    moment_diagnostics,
    no_deterministic_limit_demo,
    cluster_dimension_report,
)

__all__ = [
    "EIGSystem",
    "RuleGraph",
    "LevelGraph",
    "load_system",
    "build",
    "substitute",
    "predict_counts",
    "validate",
    "validate_canonical",
    "validate_distance_positive",
    "mass_matrix",
    "degree_matrix",
    "distance_family",
    "spectral_radius",
    "rho_min",
    "effective_resistance",
    "grounded_resistance",
    "psi",
    "psi_eigenpair",
    "verify_renormalisation",
    "dimensions",
    "local_dimensions",
    "table1",
    "srw_step",
    "exit_times",
    "walk_dimension_estimate",
    "commute_time",
    "return_probability",
    "trace",
    "perc_params",
    "step_population",
    "estimate_alpha",
    "exact_distribution",
    "moment_diagnostics",
    "no_deterministic_limit_demo",
    "cluster_dimension_report",
]
