"""Numerical ranges, radii and index bounds for homogeneous polynomials
between finite-dimensional lp spaces."""

from .spaces import (
    SpaceDescriptor,
    SpaceError,
    DimensionMismatch,
    norm,
    normalize,
    pair,
    norming_functionals,
    sample_sphere,
)
from .poly import (
    HomPoly,
    LinOp,
    SumRecipe,
    PolyError,
    hom_poly,
    zero_poly,
    adjoint_apply,
    compose_linear,
    direct_sum,
    embed_block,
    poly_to_json,
    poly_from_json,
    load_poly,
    dump_poly,
)
from .optim import (
    OptimConfig,
    NormEstimate,
    NonFiniteObjective,
    NoAttainment,
    maximize_on_sphere,
    poly_norm,
    near_maximizer_set,
)
from .range import (
    WitnessPair,
    RadiusEstimate,
    RangeCloud,
    EmptySlice,
    InconsistentRadius,
    v_delta,
    delta_ladder_estimate,
    numerical_radius,
    radius_via_limit,
    range_cloud,
    convex_hull_2d,
)
from .index import (
    IndexEstimate,
    SpearReport,
    DegenerateComposition,
    index_upper_bound,
    spear_margin,
    op_norm,
    op_numerical_radius,
    operator_bound,
    zero_radius_witness_search,
    adjoint_radius_via_limit,
)
from .cases import CaseReport, case_catalog, case_names, run_case, run_all

__version__ = "0.1.0"

__all__ = [
    "SpaceDescriptor", "SpaceError", "DimensionMismatch", "norm", "normalize",
    "pair", "norming_functionals", "sample_sphere",
    "HomPoly", "LinOp", "SumRecipe", "PolyError", "hom_poly", "zero_poly",
    "adjoint_apply", "compose_linear", "direct_sum", "embed_block",
    "poly_to_json", "poly_from_json", "load_poly", "dump_poly",
    "OptimConfig", "NormEstimate", "NonFiniteObjective", "NoAttainment",
    "maximize_on_sphere", "poly_norm", "near_maximizer_set",
    "WitnessPair", "RadiusEstimate", "RangeCloud", "EmptySlice",
    "InconsistentRadius", "v_delta", "delta_ladder_estimate",
    "numerical_radius", "radius_via_limit", "range_cloud", "convex_hull_2d",
    "IndexEstimate", "SpearReport", "DegenerateComposition",
    "index_upper_bound", "spear_margin", "op_norm", "op_numerical_radius",
    "operator_bound", "zero_radius_witness_search", "adjoint_radius_via_limit",
    "CaseReport", "case_catalog", "case_names", "run_case", "run_all",
    "__version__",
]
