"""Exact arithmetic core: surds, certified reals, integer-vector geometry."""

from .certified import CertifiedReal, Ordering, certified_compare, precision_budget_bits
from .intvec import (
    IntVec,
    PlaneLattice,
    bezout3,
    completed_volume_sq,
    completed_volume_sq_k,
    cross3,
    det_int,
    ext_gcd,
    fundamental_volume_sq,
    int_rank,
    is_complete,
    is_primitive,
    minors2,
    minors_k,
    vec_add,
    vec_dot,
    vec_gcd,
    vec_scale,
    vec_sub,
    vec_sup_norm,
)
from .numbers import (
    ExactReal,
    QuadSurd,
    ex_abs,
    ex_add,
    ex_compare,
    ex_compatible,
    ex_div_int,
    ex_inv,
    ex_div,
    ex_enclosure,
    ex_floor,
    ex_mul,
    ex_nearest_int,
    ex_neg,
    ex_sign,
    ex_sub,
    ex_to_float,
    floor_mul_sqrt,
    squarefree_split,
)
from .targets import TargetCoordinate, TargetVector, parse_target, parse_target_vector

__all__ = [
    "CertifiedReal",
    "Ordering",
    "certified_compare",
    "precision_budget_bits",
    "IntVec",
    "PlaneLattice",
    "bezout3",
    "completed_volume_sq",
    "completed_volume_sq_k",
    "cross3",
    "det_int",
    "ext_gcd",
    "fundamental_volume_sq",
    "int_rank",
    "is_complete",
    "is_primitive",
    "minors2",
    "minors_k",
    "vec_add",
    "vec_dot",
    "vec_gcd",
    "vec_scale",
    "vec_sub",
    "vec_sup_norm",
    "ExactReal",
    "QuadSurd",
    "ex_abs",
    "ex_add",
    "ex_compare",
    "ex_compatible",
    "ex_div_int",
    "ex_inv",
    "ex_div",
    "ex_enclosure",
    "ex_floor",
    "ex_mul",
    "ex_nearest_int",
    "ex_neg",
    "ex_sign",
    "ex_sub",
    "ex_to_float",
    "floor_mul_sqrt",
    "squarefree_split",
    "TargetCoordinate",
    "TargetVector",
    "parse_target",
    "parse_target_vector",
]
