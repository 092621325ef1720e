"""Absolutely minimizing Lipschitz extensions on 2D grids with measurable
Finsler metrics: norm families with exact convex duals, anisotropic
shortest-path distances, McShane envelopes and cones, a certified
ball-midpoint solver, and executable checks of the minimizer
characterizations."""

from .checks import (
    CheckReport,
    check_best_extension,
    check_comparison_principle,
    check_cone_comparison,
    check_gradient_slope_agreement,
    check_minimality_vs_competitors,
    check_mollification_convergence,
    sample_subdomains,
    tolerances,
)
from .errors import (
    ConfigError,
    ConstructionError,
    DegenerateInputError,
    DomainError,
    FinslerAmleError,
    InputError,
    NumericError,
)
from .extensions import BoundaryData, ConeSpec, cone_field, mcshane_lower, mcshane_upper
from .finsler import (
    EllipticityBounds,
    FinslerStructure,
    checkerboard_matrices,
    two_media_scale,
)
from .grid import GridDomain
from .kernels import BACKEND as KERNEL_BACKEND
from .metric import (
    KAPPA_STENCIL,
    BallTable,
    DistanceField,
    MetricGraph,
    build_graph,
    lip_constant,
    metric_ball,
    metric_derivative,
    pointwise_lip,
    shortest_distance,
)
from .solver import (
    SolveReport,
    SolverConfig,
    ball_inf,
    ball_sup,
    harmonious_step,
    slope_balance_margin,
    slopes,
    solve,
)

__version__ = "0.1.0"
