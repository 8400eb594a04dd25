"""Finite-model engine for Boolean algebras with operators."""

from ._kernels import backend
from .amalgam import AmalgamationInstance, Report, SupapCertificate, find_interpolant, superamalgamate, verify_supap
from .bao import FiniteBao, Morphism, Signature, dimension_set, dual_cyl, subst_ij
from .boolean import (
    FiniteBA,
    Filter,
    enumerate_ultrafilters,
    extend_to_ultrafilter,
    generated_filter,
    is_proper,
    mk_finite_ba,
)
from .dilation import (
    DilationPair,
    TransformationSystem,
    WitnessSystem,
    build_witness_system,
    cs_dilation,
    dilate_K,
    dilated_cylindrifier,
    embed_H,
    full_function_system,
    is_perfect_ultrafilter,
    neat_reduct,
    rename_dilation,
    supports,
    witness_filter_step,
)
from .errors import BaodeError
from .frames import (
    Frame,
    FrameMorphism,
    atom_structure,
    complex_algebra,
    dual_morphism,
    insep,
    is_bounded_morphism,
    is_zigzag_product,
    product_frame,
    str_membership,
)
from .schema import Schema, check_schema, default_positive_schema, default_schema, load_schema
from .terms import check_equation, eval_term, is_positive_equation, parse_equation, parse_term

__all__ = [
    "AmalgamationInstance",
    "BaodeError",
    "DilationPair",
    "Filter",
    "FiniteBA",
    "FiniteBao",
    "Frame",
    "FrameMorphism",
    "Morphism",
    "Report",
    "Schema",
    "Signature",
    "SupapCertificate",
    "TransformationSystem",
    "WitnessSystem",
    "atom_structure",
    "backend",
    "build_witness_system",
    "check_equation",
    "check_schema",
    "complex_algebra",
    "cs_dilation",
    "default_positive_schema",
    "default_schema",
    "dilate_K",
    "dilated_cylindrifier",
    "dimension_set",
    "dual_cyl",
    "dual_morphism",
    "embed_H",
    "enumerate_ultrafilters",
    "eval_term",
    "extend_to_ultrafilter",
    "find_interpolant",
    "full_function_system",
    "generated_filter",
    "insep",
    "is_bounded_morphism",
    "is_perfect_ultrafilter",
    "is_positive_equation",
    "is_proper",
    "is_zigzag_product",
    "load_schema",
    "mk_finite_ba",
    "neat_reduct",
    "parse_equation",
    "parse_term",
    "product_frame",
    "rename_dilation",
    "str_membership",
    "subst_ij",
    "superamalgamate",
    "supports",
    "verify_supap",
    "witness_filter_step",
]
