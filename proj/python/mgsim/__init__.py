"""Minority Game simulator: seeded ensembles, observables and analytical maps."""

from ._mgsim import (
    BifurcationPoint,
    ConfigError,
    EnsembleResult,
    EnsembleSummary,
    GameConfig,
    SampleStats,
    __version__,
    classify_step_vector,
    critical_rho_second,
    figure_job,
    figure_job_names,
    first_transition,
    gaussian_map_sigma2,
    payoff_value,
    quadratic_basin,
    run_ensemble,
    run_sample,
    second_transition,
    solve_delta_a1,
    stability_coefficient,
    theory_sigma2,
)

__all__ = [
    "BifurcationPoint",
    "ConfigError",
    "EnsembleResult",
    "EnsembleSummary",
    "GameConfig",
    "SampleStats",
    "__version__",
    "classify_step_vector",
    "critical_rho_second",
    "figure_job",
    "figure_job_names",
    "first_transition",
    "gaussian_map_sigma2",
    "payoff_value",
    "quadratic_basin",
    "run_ensemble",
    "run_sample",
    "second_transition",
    "solve_delta_a1",
    "stability_coefficient",
    "theory_sigma2",
]
