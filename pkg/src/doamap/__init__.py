"""DOA estimation in unknown colored noise from snapshots plus noise-only samples.

The package covers the full pipeline: array manifold (`array_model`),
generative scenarios with von Mises priors (`scenario`), the concentrated
MAP estimator with alternating 1-D grid searches (`estimator`), CRB/ACRB
reference bounds (`bounds`), and a seeded Monte Carlo harness with CSV
outputs (`harness`).  The `doamap` CLI exposes `simulate`, `estimate`, and
`crb` subcommands.
"""

from .array_model import (
    ArrayGeometry,
    SteeringSet,
    steering_derivative,
    steering_grid,
    steering_matrix,
    steering_vector,
)
from .bounds import BoundConfig, BoundResult, acrb, crb, derivative_stack
from .estimator import (
    AngleWorkspace,
    MapConfig,
    MapDoaEstimator,
    MapResult,
    SampleStats,
    concentrated_cost,
    cost_trace_segments,
    map_estimate,
    monotonicity_violations,
    oblique_projector,
    per_angle_cost,
    per_angle_quantities,
    prior_penalty,
    prior_penalty_total,
    recover_noise_cov,
    recover_signal,
    sample_stats,
)
from .exceptions import (
    DegenerateAngles,
    DoaMapError,
    EmptySample,
    NotPositiveDefinite,
    NumericalBlowup,
    RankDeficientSteering,
    SingularNoiseCovariance,
)
from .harness import (
    ExperimentSpec,
    RmseTable,
    bound_config_for,
    convergence_trace,
    experiment_from_config,
    match_angles,
    rmse,
    run_experiment,
    scenario_for_value,
    trace_to_csv,
)
from .io import load_priors, load_snapshots, save_complex_matrix, save_snapshots
from .linalg import hermitian_sqrt, hermitian_sqrt_inv
from .scenario import (
    Dataset,
    PriorSpec,
    Scenario,
    generate_dataset,
    noise_covariance,
    sample_von_mises,
    scenario_from_config,
    signal_covariance,
    snr_inr,
)

__version__ = "0.1.0"

__all__ = [
    "ArrayGeometry",
    "SteeringSet",
    "steering_vector",
    "steering_derivative",
    "steering_matrix",
    "steering_grid",
    "PriorSpec",
    "Scenario",
    "Dataset",
    "signal_covariance",
    "noise_covariance",
    "sample_von_mises",
    "generate_dataset",
    "snr_inr",
    "scenario_from_config",
    "SampleStats",
    "sample_stats",
    "oblique_projector",
    "concentrated_cost",
    "prior_penalty",
    "prior_penalty_total",
    "AngleWorkspace",
    "per_angle_quantities",
    "per_angle_cost",
    "MapConfig",
    "MapResult",
    "map_estimate",
    "recover_signal",
    "recover_noise_cov",
    "cost_trace_segments",
    "monotonicity_violations",
    "MapDoaEstimator",
    "BoundConfig",
    "BoundResult",
    "acrb",
    "crb",
    "derivative_stack",
    "hermitian_sqrt",
    "hermitian_sqrt_inv",
    "ExperimentSpec",
    "RmseTable",
    "run_experiment",
    "convergence_trace",
    "trace_to_csv",
    "load_priors",
    "load_snapshots",
    "save_complex_matrix",
    "save_snapshots",
    "match_angles",
    "rmse",
    "scenario_for_value",
    "bound_config_for",
    "experiment_from_config",
    "DoaMapError",
    "DegenerateAngles",
    "NotPositiveDefinite",
    "SingularNoiseCovariance",
    "RankDeficientSteering",
    "NumericalBlowup",
    "EmptySample",
    "__version__",
]
