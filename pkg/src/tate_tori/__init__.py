"""Tate cohomology of finite-group character lattices, exactly.

The package computes Tate cohomology in degrees -1..2 for lattices with a
finite group action (the character modules of algebraic tori), entirely in
arbitrary-precision integer arithmetic, and evaluates the classical order
identities built on top: everywhere-locally-trivial torsor classes, Brauer
quotient orders, Picard orders, Herbrand quotients, local norm indices and
Tamagawa numbers.
"""

from .abelian import (
    AbMorphism,
    FinAbGroup,
    IntMatrix,
    MorphismParts,
    SmithDecomposition,
    cokernel_group,
    column_lattice_basis,
    kernel_basis,
    morphism_analysis,
    smith_normal_form,
    solve_columns,
    subquotient_group,
)
from .arith import (
    ArithReport,
    IdentityCheck,
    PlaceProfile,
    TorsorAssumptions,
    arith_report,
    brauer_quotient,
    local_norm_index_table,
    sha_group,
    tamagawa_number,
    verify_identities,
)
from .cohomology import (
    CochainShape,
    CohomologyGroup,
    cocycle_residual,
    herbrand_quotient,
    restriction_morphism,
    tate_group,
)
from .errors import (
    BadPermutation,
    BadSpec,
    CochainSystemTooLarge,
    ContainmentError,
    InconsistentAssumptions,
    InfiniteCohomology,
    NotCyclic,
    OrderCapExceeded,
    ParseError,
    TateToriError,
    TorsionQuotient,
    UnknownLabel,
)
from .groups import (
    FiniteGroup,
    Subgroup,
    abelianization,
    cyclic_subgroups,
    group_from_permutations,
    parse_permutation,
    permutation_text,
    subgroup_closure,
)
from .lattice import (
    CosetAction,
    DirectSum,
    Dual,
    ExplicitAction,
    GLattice,
    NormOne,
    Split,
    TorusSpec,
    WeilRestriction,
    build_torus_lattice,
    restrict_lattice,
    spec_text,
    validate_lattice,
)
from .problem import Problem, ProblemInstance, instantiate_problem, parse_problem_file
from .cli import run_command

__version__ = "0.1.0"
