"""Simulation and inference laboratory for the stable AR(1) process driven
by AR(1) noise: estimators, closed-form asymptotics, deviation rate
functions, and Monte Carlo verification suites."""

__version__ = "0.1.0"

from .asymptotics import (
    AsymptoticSummary,
    bn_sequence,
    det_gamma_audit,
    gamma_cross_check,
    rate_dw,
    rate_joint,
    rate_rho,
    rate_special_theta_eq_neg_rho,
    rate_theta,
    summary,
)
from .errors import (
    DegenerateError,
    DomainError,
    DwlabError,
    InsufficientEventsError,
    SingularError,
    StabilityError,
)
from .mdp_lab import (
    DeviationEstimate,
    ExperimentConfig,
    clopper_pearson,
    run_clt_suite,
    run_convergence_suite,
    run_deviation_suite,
    run_identity_suite,
    run_inequality_suite,
    run_suite,
)
from .model import (
    ModelParams,
    NoiseSpec,
    Trajectory,
    build_trajectory,
    companion_matrix,
    read_trajectory_csv,
    sample_noise,
    simulate,
    spectral_radius,
    substream,
    validate_params,
    write_trajectory_csv,
)
from .statistics import (
    StatLedger,
    check_as_inequalities,
    check_dw_identity,
    check_j_identity,
    check_sn_decomposition,
    check_theta_decomposition,
    ledger,
    remainder_theta,
)

__all__ = [
    "AsymptoticSummary",
    "DegenerateError",
    "DeviationEstimate",
    "DomainError",
    "DwlabError",
    "ExperimentConfig",
    "InsufficientEventsError",
    "ModelParams",
    "NoiseSpec",
    "SingularError",
    "StabilityError",
    "StatLedger",
    "Trajectory",
    "bn_sequence",
    "build_trajectory",
    "check_as_inequalities",
    "check_dw_identity",
    "check_j_identity",
    "check_sn_decomposition",
    "check_theta_decomposition",
    "clopper_pearson",
    "companion_matrix",
    "det_gamma_audit",
    "gamma_cross_check",
    "ledger",
    "rate_dw",
    "rate_joint",
    "rate_rho",
    "rate_special_theta_eq_neg_rho",
    "rate_theta",
    "read_trajectory_csv",
    "remainder_theta",
    "run_clt_suite",
    "run_convergence_suite",
    "run_deviation_suite",
    "run_identity_suite",
    "run_inequality_suite",
    "run_suite",
    "sample_noise",
    "simulate",
    "spectral_radius",
    "substream",
    "summary",
    "validate_params",
    "write_trajectory_csv",
]
