"""Weighted approximation of AXB by C over complex matrices.

Solvers for the operator-order problem min (AXB-C)* W (AXB-C) and the
weighted Schatten-norm problem min ||AXB - C||_{p,W}, together with the
machinery they stand on: pseudoinverse and subspace arithmetic, shorted
operators (generalized Schur complements), weighted least squares and
W-inverses, polar decomposition and directional derivatives of Schatten
norms, plus brute-force oracles for cross-checking.
"""

from .core_linalg import (
    DEFAULT_TOL,
    DecompositionError,
    NotPsdError,
    PsdWeight,
    SubspaceBasis,
    TolerancePolicy,
    as_matrix,
    as_vector,
    complex_gaussian,
    containment_residual,
    hermitian_part,
    is_psd,
    loewner_leq,
    matrix_rank,
    null_basis,
    orthogonal_complement,
    pinv,
    psd_sqrt,
    range_basis,
    subspace_contains,
    subspace_sum,
    svd,
    w_orthogonal_complement,
)
from .shorted import (
    InfimumWitnessReport,
    ShortedPair,
    ShortedPropertyReport,
    random_null_projection,
    shorted_infimum_witness,
    shorted_kernel_range_check,
    shorted_operator,
)
from .wls import (
    ConditionReport,
    ExistenceConditionError,
    SolutionManifold,
    check_conditions,
    range_plus_w_complement,
    w_inverse,
    w_lss,
)
from .schatten import (
    PolarParts,
    directional_derivative,
    polar,
    psd_power,
    schatten_norm,
    weighted_seminorm,
)
from .axb_solver import (
    DescentReport,
    ExactSolveResult,
    OracleResult,
    OrderMinResult,
    OrderStatus,
    ProblemInstance,
    SchattenMinResult,
    SolveStatus,
    brute_force_p2_oracle,
    critical_residual,
    descent_check_fp,
    h_map,
    normal_residual_full,
    normal_residual_p2,
    operator_order_min,
    random_feasible_instance,
    random_instance,
    random_psd_weight,
    random_rank_matrix,
    schatten_min,
    shorted_to_range_of_a,
    solve_axb_exact,
)

__version__ = "0.1.0"
