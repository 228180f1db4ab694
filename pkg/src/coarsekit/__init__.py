"""coarsekit: finite cellular ordinal balleans at desk scale.

Exact Cantor-normal-form ordinal arithmetic, finite balleans as entourage
chains and partition towers, covering spectra, ball coordinatization,
coarse multi-maps with an exhaustive equivalence oracle, and re-verifiable
coarse-equivalence certificates.
"""

from .ordinals import (
    ALEPH0,
    ALEPH1,
    OMEGA,
    ONE,
    ZERO,
    BalleanClass,
    CardinalSym,
    CofClass,
    Ordinal,
    OrdinalSyntaxError,
    cardinal_tail,
    classify_cardinal_ballean,
    cofinality_class,
    format_ordinal,
    is_additively_indecomposable,
    ord_add,
    ord_cmp,
    ord_mul,
    parse_ordinal,
    tail,
)
from .balleans import (
    CovResult,
    EntourageChain,
    FormatError,
    Spectrum,
    Tower,
    ValidationReport,
    ball,
    cellular_hull,
    cov,
    format_ballean,
    gen_interval,
    gen_product,
    is_cellular,
    is_large,
    level_dist,
    normalize,
    parse_ballean,
    product_point_index,
    product_point_tuple,
    spectrum,
    subspace,
    validate,
)
from .multimaps import (
    CoarseReport,
    EquivalenceReport,
    LargeSubsetWitness,
    MultiMap,
    SearchCapExceeded,
    ShiftFn,
    check_coarse,
    check_equivalence,
    compose,
    equivalence_to_large_subsets,
    format_multimap,
    identity_map,
    inverse,
    min_shift,
    oscillation,
    parse_multimap,
    search_equivalence,
)
from .coordinates import (
    CoordMap,
    CoordReport,
    coordinatize,
    format_coordmap,
    numbering,
    parse_coordmap,
    verify_coordinatization,
)
from .classify import (
    Certificate,
    CoveringInvariants,
    HomogeneityReport,
    VerifyResult,
    build_equivalence,
    covering_invariants,
    format_certificate,
    interleave,
    is_homogeneous,
    parse_certificate,
    point_transitive_map,
    regroup,
    uniformizing_regroup,
    verify_certificate,
)

__version__ = "0.1.0"
