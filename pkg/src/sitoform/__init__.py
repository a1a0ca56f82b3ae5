"""sitoform: a finite-site Galois toolkit.

Covering topologies from morphism collections, Galois coverings, layered
site axioms, explicit sheafification, grid construction, the absolute
Galois monoid, and the finite equivalence between sheaves and smooth
monoid sets.
"""

from .cat import (
    CatFunctor,
    FiniteCategory,
    Mor,
    NaturalIso,
    epimorphisms,
    identity_name,
    is_e_category,
    is_lambda_connected,
    is_semi_cofiltered,
    make_category,
    poset_skeleton,
    quotient_object,
    slice_category,
    validate_category,
)
from .errors import (
    InputError,
    InvariantViolation,
    PreconditionError,
    ResourceLimitError,
    SitoformError,
)
from .galois import (
    GroupAction,
    GroupTable,
    TorsorSystem,
    aut_over,
    end_over,
    enough_galois_coverings,
    galois_category_over,
    galois_coverings,
    groups_isomorphic,
    hom_over,
    is_galois_covering,
    is_pseudo_torsor,
    torsor_limit,
)
from .grid import (
    Grid,
    Transport,
    build_grid,
    build_pregrid,
    edge_objects,
    grids_isomorphic,
    transport_under,
    validate_grid,
    validate_pregrid,
)
from .monoid import (
    CoveringLimitGroup,
    GaloisMonoid,
    MonoidElement,
    compute_monoid,
    coset_neighborhood_basis,
    covering_limit_group,
    enumerate_monoid_bruteforce,
    fixing_group,
)
from .report import Finding, ValidationReport
from .sheaves import (
    Presheaf,
    PresheafMorphism,
    constant_presheaf,
    enumerate_presheaves,
    enumerate_sheaves,
    is_sheaf,
    presheaf_coproduct,
    presheaf_equalizer,
    presheaf_hom,
    presheaf_product,
    presheaves_isomorphic,
    representable,
    sheafify,
    validate_presheaf,
)
from .smooth import (
    SmoothMSet,
    enumerate_smooth_msets,
    equivariant_maps,
    fiber_functor,
    msets_isomorphic,
    omega_on_morphism,
    point_adjoint,
    sheaf_from_smooth_set,
    smooth_check,
    verify_equivalence,
)
from .topology import (
    ATopology,
    MorphismCollection,
    Sieve,
    covering_collection,
    in_topology,
    is_semi_localizing,
    maximal_sieve,
    principal_sieve,
    pullback_sieve,
    saturate,
    sieve_generated,
    verify_topology_axioms,
)
from .validation import Site, Window, cardinality_report, validate_b_site, validate_y_site
from .examples import (
    build_cyclic_span_site,
    build_gsets_site,
    build_successor_site,
    span_hom_count,
    subgroups,
    successor_grid,
)

__version__ = "0.1.0"
