"""Distributed maximum-correntropy Kalman filtering with packet drops."""

from ._core import (
    Augmented,
    ComplexityCount,
    ConvergenceReport,
    Error,
    capture_step,
    cholesky,
    config_to_json,
    convergence_report,
    correntropy_taylor,
    default_topology_edge_list,
    dmckf_flops,
    fixed_point_map,
    gaussian_kernel,
    jacobian_f,
    msd_db,
    parse_config,
    phi,
    psi,
    run_experiment,
    run_trial,
    sample_correntropy,
    sdkf_flops,
    solve_sigma_thresholds,
    verify_contraction,
    zeta_bound,
)

__all__ = [name for name in dir() if not name.startswith("_")]
