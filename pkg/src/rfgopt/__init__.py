"""Randomized forward-mode gradient estimation and optimization toolkit.

Forward-mode automatic differentiation computes exact directional
derivatives in one pass; multiplying the (possibly forward-differenced)
directional derivative along a random direction by that direction gives a
gradient estimate whose statistics are governed by the direction law's
kurtosis.  This package provides the estimator, five sampling laws with
exact standardized moments, descent and heavy-ball optimizers driven by
the estimator, closed-form convergence predictions for quadratic
objectives, and a Monte-Carlo harness that verifies every closed form it
relies on.
"""

from .distributions import (
    KINDS,
    DistributionSpec,
    kurtosis,
    optimal_variance,
    sample_vector,
    sixth_standardized_moment,
    stream,
)
from .estimator import RFGConfig, directional_derivative, rfg
from .forward_ad import DomainError, DualScalar, TangentEvaluation, dual_apply, jvp
from .mlp import MlpParameters, init_mlp, mlp_forward, mlp_jvp, mlp_loss, mlp_loss_gradient
from .objectives import ObjectiveFunction
from .optimizers import GDState, LRSchedule, PHBState, RunResult, gd_step, phb_step, run
from .problems import (
    ackley,
    ackley_objective,
    fa_target,
    make_fa_problem,
    make_gd_quadratic,
    make_mlp_regression_problem,
    make_phb_quadratic,
    rosenbrock,
    rosenbrock_objective,
)
from .quadratic import (
    PhbHyperparams,
    PhbStateMatrix,
    QuadraticProblem,
    default_grid,
    exact_gradient,
    f_variance_factor,
    gd_rate_and_bound,
    gd_second_moment_map,
    grid_search,
    optimal_gd_lr,
    phb_error_curve,
    phb_error_prediction,
    phi_map,
    psi_blocks,
    psi_max_eigenvalue,
    rfg_decomposition,
    rfg_moments,
)
from .moments import (
    MomentCheckReport,
    check_moment_identities,
    check_relative_error,
    check_second_moment,
    estimate_norm_moments,
    expected_relative_squared_error,
    run_verification_suite,
)

__version__ = "0.1.0"
