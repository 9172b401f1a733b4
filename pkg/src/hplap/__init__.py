"""Degenerate p-Laplacians on H-type groups: deformed horizontal vector
fields, gauge norms, fundamental solutions, sharp Hardy inequalities, and
the numerical verification suites that confront every closed form with an
independent differentiation or quadrature oracle."""

from .algebra import (
    GroupPoint,
    HTypeAlgebra,
    OperatorParams,
    bracket,
    dilate,
    from_j_matrices,
    group_inverse,
    group_product,
    make_heisenberg,
    make_quaternionic,
    norm_d,
    norm_d_eps,
    resolve_group,
)
from .fields import (
    DiffBackend,
    HorizontalVectorField,
    RadialProfile,
    ScalarField,
    apply_X,
    horizontal_divergence,
    horizontal_gradient,
    p_laplacian,
    weighted_p_laplacian,
)
from .closedform import (
    FundamentalSolutionSpec,
    ball_moment,
    fundamental_solution,
    grad_d_eps_sq,
    lap_d4k,
    lap_d_eps,
    log_gamma,
    psi,
    radial_L,
    sigma_p,
    sigma_p_beta,
    sphere_moment,
)
from .quadrature import IntegralEstimate, grid_integral_1d, mc_ball_integral, mc_group_integral
from .verify import SuiteConfig, hardy_ratio, run_suite

__version__ = "0.1.0"
