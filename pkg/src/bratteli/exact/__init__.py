"""Exact arithmetic: rationals, real algebraic numbers, number fields, and
finitely generated subgroups with decidable membership."""

from fractions import Fraction

from .algebraic import AlgebraicNumber, largest_real_root, poly_str
from .closure import (
    DEFAULT_CLOSURE_BOUND,
    NO,
    UNDETERMINED,
    YES,
    ClosurePreconditionError,
    ClosureResult,
    ScaleSearchResult,
    find_scale,
    lambda_closure_member,
    rational_closure_profile,
    scaled_group_equal,
)
from .field import QQ, FieldElement, NumberField, RationalField, TensorField, UnsupportedFieldError
from .subgroup import FinGenSubgroup, group_from_generators, group_member, hermite_normal_form

Rational = Fraction

__all__ = [
    "AlgebraicNumber",
    "ClosurePreconditionError",
    "ClosureResult",
    "DEFAULT_CLOSURE_BOUND",
    "FieldElement",
    "FinGenSubgroup",
    "NO",
    "NumberField",
    "QQ",
    "Rational",
    "RationalField",
    "ScaleSearchResult",
    "TensorField",
    "UNDETERMINED",
    "UnsupportedFieldError",
    "YES",
    "find_scale",
    "group_from_generators",
    "group_member",
    "hermite_normal_form",
    "lambda_closure_member",
    "largest_real_root",
    "poly_str",
    "rational_closure_profile",
    "scaled_group_equal",
]
