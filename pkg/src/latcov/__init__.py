"""latcov: exact verification of lattice packing-covering claims for
centrally symmetric polytopes.

The library certifies, with exact rational / quadratic-field arithmetic (and
sound interval arithmetic where inputs are only known numerically):

* that a polytope plus a lattice packs, and that a dilate of it covers;
* two-sided brackets for the simultaneous packing-covering constant
  gamma(C, L) of a body and a lattice;
* the full case analysis showing the regular octahedron admits no lattice
  with gamma below 7/6, together with the lattice attaining 7/6;
* a catalog of named bodies and lattices with their claimed constants.
"""

from __future__ import annotations

from .arith import (
    INTERVAL,
    Interval,
    Quad,
    RATIONAL,
    Scalar,
    UndecidedComparison,
    Vec3,
    compare,
    format_scalar,
    parse_scalar,
    quadratic_field,
)

__all__ = [
    "INTERVAL",
    "Interval",
    "Quad",
    "RATIONAL",
    "Scalar",
    "UndecidedComparison",
    "Vec3",
    "compare",
    "format_scalar",
    "parse_scalar",
    "quadratic_field",
]

__version__ = "0.1.0"
