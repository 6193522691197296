"""Exceptional covers over finite fields: maps, scans, and group models.

The package has two layers that check each other.  The empirical layer
(gf, projmap, excscan) builds finite fields and the classical permutation
families, then measures bijectivity over extension towers.  The structural
layer (frobset, grouptheory, nielsen, lattes, pencil) predicts the same
behaviour from residue sets, coset fixed-point counts, branch cycle
combinatorics, elliptic reductions, and character sums.
"""

from .errors import (
    CapExceededError,
    ExcovError,
    InternalInvariantError,
    ValidationError,
)
from .gf import FieldCtx, FieldElem, make_extension, make_field
from .projmap import (
    P1Point,
    Poly,
    RationalMap,
    affine_conjugate,
    chebyshev,
    chebyshev_twist,
    compose,
    cyclic,
    dickson,
    parse_map_spec,
    redei,
)
from .frobset import FrobeniusSet, fit_from_samples, from_residues, intersect, union
from .excscan import (
    ScanReport,
    dp_range_test,
    exceptionality_scan,
    idp_multiset_test,
    period_series,
)
from .grouptheory import (
    MonodromyData,
    Perm,
    PermGroup,
    analyze_rep,
    component_count,
    coset_exceptionality,
    cyclic_cover_model,
    dickson_cover_model,
    fiber_tensor,
)
from .nielsen import (
    NielsenTuple,
    braid_orbit,
    cyclic_branch_pair,
    dickson_branch_triple,
    dickson_tower_cycles,
    modular_nielsen,
    rh_genus,
)
from .lattes import (
    EllipticCurveQ,
    lattes_map,
    median_value_check,
    ogg_curve,
    oit_predict,
    oit_scan,
    reduce_curve,
)
from .pencil import kf_cross_check, pencil_scan, stable_component_count

__version__ = "0.1.0"

__all__ = [
    "CapExceededError",
    "ExcovError",
    "InternalInvariantError",
    "ValidationError",
    "FieldCtx",
    "FieldElem",
    "make_extension",
    "make_field",
    "P1Point",
    "Poly",
    "RationalMap",
    "affine_conjugate",
    "chebyshev",
    "chebyshev_twist",
    "compose",
    "cyclic",
    "dickson",
    "parse_map_spec",
    "redei",
    "FrobeniusSet",
    "fit_from_samples",
    "from_residues",
    "intersect",
    "union",
    "ScanReport",
    "dp_range_test",
    "exceptionality_scan",
    "idp_multiset_test",
    "period_series",
    "MonodromyData",
    "Perm",
    "PermGroup",
    "analyze_rep",
    "component_count",
    "coset_exceptionality",
    "cyclic_cover_model",
    "dickson_cover_model",
    "fiber_tensor",
    "NielsenTuple",
    "braid_orbit",
    "cyclic_branch_pair",
    "dickson_branch_triple",
    "dickson_tower_cycles",
    "modular_nielsen",
    "rh_genus",
    "EllipticCurveQ",
    "lattes_map",
    "median_value_check",
    "ogg_curve",
    "oit_predict",
    "oit_scan",
    "reduce_curve",
    "kf_cross_check",
    "pencil_scan",
    "stable_component_count",
    "__version__",
]
