"""Exact computation on self-similar groups of rooted trees.

Portrait algebra for truncated tree automorphisms, wreath-recursion word
calculus, exact quotient enumeration with Haar counting, stabilizer-chain
certificates (fractality, mixing, K_G), fixed-point statistics, and the
orbifold classification of post-critically finite polynomials over number
fields.
"""

from .catalog import CatalogEntry, catalog_get, catalog_names
from .certificates import (
    CommutatorWitness,
    KgReport,
    MixingCertificate,
    PseudomixingReport,
    check_fractal,
    check_mixing_certificate,
    check_super_strongly_fractal,
    commutator_search,
    kg_depth,
    verify_pseudomixing,
)
from .chain import StabilizerChain, vertex_domain_gens
from .dynamics import (
    INF,
    CriticalData,
    DynOrbifoldReport,
    Orbifold,
    PolynomialMap,
    PostCriticalOrbit,
    classify_polynomial,
    critical_data,
    delta_set,
    detect_twisted_chebyshev,
    local_degree,
    orbifold_signature,
    post_critical_orbit,
    sigma_set,
    upsilon_set,
    validate_recursion_against_polynomial,
)
from .errors import (
    ArborError,
    BadPermutation,
    BudgetExceeded,
    DegreeMismatch,
    DepthExceeded,
    IncompleteCriticalData,
    InternalInconsistency,
    NotCritical,
    NotPCF,
    PreconditionNotChebyshevLike,
    SchemaError,
    SourceNotUniform,
    SymbolOutOfRange,
    UnknownEntry,
    UnknownGenerator,
    ValidationFailure,
)
from .fpp import (
    AutSampler,
    FixedPointTable,
    HeuristicWordSampler,
    MartingaleReport,
    MonteCarloEstimate,
    QuotientSampler,
    aut_tree_fpp,
    aut_tree_fpp_float,
    dihedral_fpp_closed_form,
    expected_fixed_points,
    fixed_point_table,
    martingale_fiber_check,
    monte_carlo_fpp,
)
from .numberfield import QQ, FieldPoly, NFElement, NumberField
from .presentation import WreathPresentation, parse_word_text, reduce_word
from .quotient import (
    DEFAULT_ELEMENT_BUDGET,
    FiniteQuotient,
    check_level_transitive,
    enumerate_quotient,
    enumerate_tower,
    exhaustive_tower,
    subtree_transitivity,
)
from .tree import Portrait, TreeShape, all_portraits, uniform_aut_sample

__version__ = "0.1.0"
