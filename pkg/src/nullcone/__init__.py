"""Null-cone tests for tensors under products of special linear groups."""

__version__ = "0.1.0"

from .duality import (
    CapacityEstimate,
    DeficiencyCertificate,
    InstabilityVerdict,
    capacity_estimate,
    deficiency_value,
    dual_witness,
    eps_instability,
    instability_lower_bound,
    is_deficient,
    local_min_value,
)
from .errors import (
    InconclusiveError,
    NullConeError,
    ResourceError,
    SingularMarginalError,
    ZeroTensorError,
)
from .invariants import (
    AlgebraicOutcome,
    AlgebraicVerdict,
    coefficient_bound,
    derksen_bound,
    equivariance_check,
    nullcone_algebraic,
    omega,
    omega_power,
    reynolds_product,
    reynolds_sl,
    schur_weyl_eval,
)
from .numerics import EigenDecomposition, RationalMatrix, herm_eig, rational_rank, scaling_matrix
from .polynomial import ActionFactor, ActionSpec, Polynomial, det_polynomial, tensor_action
from .scaling import (
    GroupElement,
    Reason,
    ScalingOutcome,
    TraceRow,
    Verdict,
    capacity_lower_bound,
    ds,
    instability_floor,
    iteration_bound,
    scale,
)
from .slicerank import (
    SliceRankReport,
    flattening_rank,
    instability_from_slice_rank,
    nullcone_vs_slicerank_check,
    slice_rank_exact_small,
    slice_rank_upper,
)
from .tensor import (
    Support,
    Tensor,
    apply_axis,
    identity_tensor,
    marginal,
    norm_sq,
    support,
    tensor_power,
    unnormalized_marginal,
)
