"""Self-similar fractal subsets of arithmetic spaces.

Exact construction and enumeration of fractal systems on the integers,
the Gaussian integers, affine and projective rational space, and elliptic
curves; Moran dimension equations; Weil and canonical heights; growth,
approximation, and intersection experiments.
"""

__version__ = "0.1.0"

from .approximation import (
    ApproxRecord,
    Target,
    approximants,
    approximation_exponent_profile,
    chordal_distance,
)
from .corpus import CORPUS, corpus_names, corpus_path, export_corpus, load_corpus_system
from .dimension import (
    DimensionResult,
    WeightSpec,
    dimension_equation,
    evaluate_pressure,
    reciprocal_sum_audit,
    map_weight,
    solve_dimension,
    t_module_weights,
)
from .elliptic import (
    CanonicalHeight,
    Curve,
    ECPoint,
    INFINITY,
    canonical_height,
    ec_add,
    ec_mul,
    ec_neg,
    ec_point,
    is_torsion,
    neron_count,
    parallelogram_defect,
)
from .enumeration import (
    BagEntry,
    ExactnessReport,
    MembershipResult,
    PointBag,
    audit_exactness,
    curve_intersection_probe,
    enumerate_system,
    is_member,
    replay_certificate,
)
from .errors import ArithFractalError
from .growth import (
    CountTable,
    GrowthFit,
    counting_function,
    fit_growth_exponent,
    geometric_grid,
    lemma_bound_check,
)
from .heights import (
    SizeValue,
    height_growth_audit,
    projective_census,
    raw_size,
    schanuel_prediction,
    size_of,
)
from .polynomials import Polynomial, parse_polynomial
from .spaces import (
    AffPoint,
    FractalSystem,
    GaussAffineMap,
    GaussPoint,
    IntAffineMap,
    IntPoint,
    PolyTupleMap,
    ProjHomogMap,
    ProjPoint,
    apply,
    canonicalize,
    load_system,
    parse_point,
    preimage,
    save_system,
    system_from_dict,
    system_to_dict,
    validate_system,
)
