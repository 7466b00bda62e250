"""Inexact cooperative stochastic approximation for semi-infinite programs,
with fixed (uniform) and adaptive (Gibbs / Metropolis-Hastings) cut sampling."""

from .core import (Ball, Box, IndexSetGeometry, InvalidInputError, PolicyInfeasibleError,
                   ProblemConstants, ProxState, SipProblem, bregman_distance, prox_map,
                   validate_constants)
from .cutgen import (AdaptiveSampler, AdaptiveSamplerConfig, CutResult, FixedSampler,
                     FixedSamplerConfig, GridCut, InfeasibleGridError, compute_C,
                     fixed_sample_cut, gibbs_log_density_unnorm, grid_oracle_G,
                     kappa_of_epsilon, make_default_ulb, mh_sample_cut, sample_size,
                     theoretical_Mk)
from .engine import (GENERAL_CONVEX, STRONGLY_CONVEX, EmptyBError, InvalidPolicyError,
                     IterationRecord, PolicySchedule, RunResult, check_well_defined, csa_run,
                     policy_params, rho_weights, weighted_average)
from .problems import (get_problem, robust_lp, robust_lp_optimum, robust_lp_true_G,
                       strongly_convex_synthetic)

__version__ = "0.1.0"
