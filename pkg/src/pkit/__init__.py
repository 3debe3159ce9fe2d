"""Numerical toolkit for finite-dimensional indefinite-metric operator theory.

The package realizes matrix-valued generalized Nevanlinna functions as
state-space triplets over Pontryagin spaces, computes their negative index
both exactly and by kernel sampling, inverts bounded-form functions through
a metric projection split, and decomposes functions additively by invariant
subspaces, at eigenvalues, and along Jordan chains.  The ``pkit`` CLI
exposes the same machinery on JSON problem files.
"""

from .config import DEFAULT_TOL, default_tol
from .errors import (
    DegenerateMinimalSubspace,
    DegenerateSubspace,
    DimensionMismatch,
    GramProductSingular,
    NoGenerator,
    NotEigenvalue,
    NotHermitian,
    NotInResolventSet,
    NotInvariant,
    NotMinimal,
    PkitError,
    ProblemFormatError,
    ProjectorNotJSymmetric,
    SchurSingular,
    SingularValue,
)
from .pontryagin import (
    Inertia,
    PontryaginSpace,
    Subspace,
    direct_sum,
    hermitian_inertia,
    is_selfadjoint,
    j_adjoint,
    orthogonal_projection,
    signature_basis,
    subspace_distance,
    subspace_gram,
)
from .relations import (
    LinearRelation,
    adjoint_relation,
    from_operator,
    is_selfadjoint_relation,
    multivalued_part,
    operator_matrix,
    relation_direct_sum,
    relations_equal,
    resolvent,
)
from .nevanlinna import (
    BOUNDED,
    GENERAL,
    BlockDiagFunction,
    GNFunction,
    InverseFunction,
    KappaEstimate,
    RationalFunction,
    Realization,
    RealizationFunction,
    SamplerConfig,
    SumFunction,
    as_function,
    bounded_realization,
    check_symmetry,
    evaluate,
    exact_negative_index,
    gamma_at,
    general_realization,
    is_minimal,
    kernel,
    minimal_subspace,
    negative_squares_sampled,
    realization_predicates,
    reanchor,
    to_bounded,
    to_general,
)
from .inversion import (
    InversionContext,
    build_context,
    complement_resolvent,
    inverse_gamma_adjoint,
    inverse_realization,
    inverse_value,
    resolvent_difference_residual,
    schur_value,
    verify_multivalued_part,
)
from .decomposition import (
    ComponentRecord,
    DecompositionReport,
    block_diag,
    inverse_decomposition,
    local_split,
    split_by_invariant_subspace,
    sum_decomposition_probe,
    sum_minimality_report,
    sum_realizations,
    verification_grid,
)
from .jordan import (
    AlphaBlock,
    AlphaDecomposition,
    JordanChain,
    alpha_decomposition,
    cancellation_exponent,
    chain_generator_in_range,
    maximal_nondegenerate_chain,
    pole_cancellation,
    root_manifold,
)
from .problems import Problem, load_realization, parse_problem, problem_to_dict, write_problem

__version__ = "0.1.0"
