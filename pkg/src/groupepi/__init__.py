"""Minimum entropy of sums of independent random variables on finite
abelian groups of order 2^n, with numeric oracles and applications."""

from .appendix import eval_appendix, verify_all, verify_claim
from .applications import (
    BroadcastSpec,
    ConditionalSource,
    RateRegionBoundary,
    broadcast_region,
    broadcast_region_gaussian,
    conditional_entropy,
    degraded_noise,
    equality_condition_check,
    helper_region,
    mgl_monte_carlo,
    scalar_mgl_check,
    vector_mgl_check,
)
from .binary import LN2, binary_entropy, df2_dx, df2_dy, f2, inverse_binary_entropy, star
from .closed_form import direct_sum_lower_bound, f_2n, f_gk, f_group
from .errors import (
    BoundaryError,
    CapacityError,
    DomainError,
    GroupEPIError,
    GroupMismatchError,
    PreconditionError,
    UnsupportedGroupError,
)
from .groups import (
    FiniteAbelianGroup,
    GroupDistribution,
    canonical_chain,
    convolve,
    distribution_from_json,
    entropy,
    extremal_pair,
    gaussian_2n,
    two_level_distribution,
)
from .oracle import (
    MinimizationConfig,
    MinimizationResult,
    convexity_scan,
    match_entropy,
    min_sum_entropy,
    min_sum_entropy_k,
)
from .sturm import Polynomial, count_real_roots, sturm_sequence

__version__ = "0.1.0"
