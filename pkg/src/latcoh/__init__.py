"""Exact cohomology of integer lattice actions of finite cyclic groups.

Given a finite-order integer matrix generating an action of Z/m on Z^n, the
package computes group and Tate cohomology of all exterior powers, the
obstruction classes carried by free-group lifts of the action, and the
second differential of the spectral sequence of the semidirect product
Z^n ⋊ Z/m — all in exact arbitrary-precision arithmetic.
"""

from .errors import (
    ContractViolationError,
    InternalInvariantError,
    InvalidActionError,
    LatcohError,
    ResourceLimitError,
    UsageError,
)
from .intlinalg import (
    AbelianGroupStructure,
    IntegerMatrix,
    SmithDecomposition,
    SubquotientPresentation,
    induced_map,
    kernel_basis,
    smith_normal_form,
    solve_integral,
    subquotient,
)
from .glattice import (
    BasisIndexing,
    CyclicAction,
    cyclotomic_lattice,
    direct_sum,
    dual,
    exterior_power,
    gauss_lattice,
    hom_lattice,
    is_free_outside_origin,
    make_action,
    named_lattice,
    paper3_lattice,
    paper3_witness,
    paper6_lattice,
    permutation_lattice,
    sign_lattice,
    syzygy_lattice,
    tensor,
    trivial_lattice,
)
from .cohomology import (
    CohomologyGroup,
    NormOperators,
    bar_oracle,
    group_cohomology,
    h_hat,
    homological_euler_h,
    operators,
    tate,
)
from .alpha import (
    AlphaData,
    FreeEndomorphism,
    FreeWord,
    MagnusTruncation,
    canonical_lift,
    compute_alpha,
    endo_iterate_apply,
    invariant_witness_basis,
    lcs_class,
    magnus,
    obstruction_nonzero,
    pairing_value,
    word_invert,
    word_multiply,
    word_reduce,
)
from .lhs import (
    DifferentialReport,
    E2Page,
    E3Page,
    EulerRatioReport,
    PrimeCaseReport,
    build_e2,
    build_e3,
    collapse_at_d2,
    d2,
    d2_squared_is_zero,
    euler_ratio_check,
    prime_case_report,
)

__version__ = "0.1.0"
