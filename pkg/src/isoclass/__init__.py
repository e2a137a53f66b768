"""Weighted sizes of ordinary isogeny classes of elliptic curves over F_q,
computed by curve enumeration, by class numbers, and by local densities."""

from .arith import FiniteField, Surd, ff_enumerate, kronecker_symbol, valuation
from .census import census, ordinary_traces, point_count, weierstrass_discriminant
from .classgroups import (
    L1_exact,
    L1_truncated,
    class_number,
    fundamental_discriminant,
    weighted_kronecker,
)
from .densities import count_charpoly_matrices, nu_ell, nu_infinity
from .measures import assemble_gekeler, assemble_lk, verify_class

__version__ = "0.1.0"

__all__ = [
    "FiniteField",
    "L1_exact",
    "L1_truncated",
    "Surd",
    "assemble_gekeler",
    "assemble_lk",
    "census",
    "class_number",
    "count_charpoly_matrices",
    "ff_enumerate",
    "fundamental_discriminant",
    "kronecker_symbol",
    "nu_ell",
    "nu_infinity",
    "ordinary_traces",
    "point_count",
    "valuation",
    "verify_class",
    "weierstrass_discriminant",
    "weighted_kronecker",
]
