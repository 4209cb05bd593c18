"""Desk-scale numerical laboratory for the one-dimensional stochastic Allen-Cahn
equation with localized multiplicative noise and its sharp interface limit."""

from .numerics import (
    Field,
    Grid1D,
    RngStream,
    grid_for_eps,
    h1_norm,
    l2_norm,
    sample_white_noise_increment,
)
from .reaction import Reaction, constants, cubic, shifted_reaction, tabulated, validate_conditions
from .standing_wave import StandingWaveProfile, rescale_profile, solve_standing_wave
from .spde import Bump, NoiseSpec, SimConfig, Trajectory, default_bump, make_initial_data, simulate
from .fermi import FermiDecomposition, PathRecord, dist_to_manifold, interface_path, project
from .generation import (
    BarrierParams,
    OdeFlow,
    build_barrier,
    first_generation_time,
    fit_generation_scaling,
    flow_A,
    flow_Y,
    flow_Y_xi,
    ode_threshold_times,
    super_sub_solutions,
    verify_barrier,
)
from .sde import (
    LinearizedOperator,
    SdeCoefficients,
    alpha2_time_stepping_oracle,
    build_linearized_operator,
    compute_alpha1,
    compute_alpha2,
    euler_maruyama,
)
from .harness import ExperimentConfig, compare_path_laws, noise_audit, run_experiment

__all__ = [
    "Field", "Grid1D", "RngStream", "grid_for_eps", "h1_norm", "l2_norm",
    "sample_white_noise_increment",
    "Reaction", "constants", "cubic", "shifted_reaction", "tabulated", "validate_conditions",
    "StandingWaveProfile", "rescale_profile", "solve_standing_wave",
    "Bump", "NoiseSpec", "SimConfig", "Trajectory", "default_bump", "make_initial_data", "simulate",
    "FermiDecomposition", "PathRecord", "dist_to_manifold", "interface_path", "project",
    "BarrierParams", "OdeFlow", "build_barrier", "first_generation_time",
    "fit_generation_scaling", "flow_A", "flow_Y", "flow_Y_xi", "ode_threshold_times",
    "super_sub_solutions", "verify_barrier",
    "LinearizedOperator", "SdeCoefficients", "alpha2_time_stepping_oracle",
    "build_linearized_operator", "compute_alpha1", "compute_alpha2", "euler_maruyama",
    "ExperimentConfig", "compare_path_laws", "noise_audit", "run_experiment",
]
