"""Cusp singularities, hyperbolic torus bundles and their contact structures.

Exact arithmetic for the cusp data (minus continued fractions, units in real
quadratic fields, SL(2, Z) monodromies) and sampled numerical certification
of the contact forms on T_A, on the link of the cusp and on Lutz tubes.
"""

from __future__ import annotations

from .errors import (
    BadArity,
    BadDegree,
    BadInput,
    ChartBoundary,
    CuspError,
    DivByZero,
    FieldMismatch,
    NilCase,
    NoSuchSingularity,
    NotHyperbolic,
    NotHyperbolicCusp,
    NotHyperbolicCycle,
    NotInLattice,
    NotInYPlus,
    RationalRadicand,
)
from .monodromy import (
    BCycle,
    CFData,
    Mat2Z,
    Triple,
    cf_sequence,
    cycle_to_matrix,
    cycles_equivalent,
    euler_characteristic,
    fundamental_unit,
    matrix_to_cycle,
    monodromy_from_pqr,
    mori_matrix,
)
from .quadfield import QuadElem, QuadField, parse_quad
from .report import Report, SamplePlan, emit_report

__version__ = "0.1.0"

__all__ = [
    "BCycle",
    "BadArity",
    "BadDegree",
    "BadInput",
    "CFData",
    "ChartBoundary",
    "CuspError",
    "DivByZero",
    "FieldMismatch",
    "Mat2Z",
    "NilCase",
    "NoSuchSingularity",
    "NotHyperbolic",
    "NotHyperbolicCusp",
    "NotHyperbolicCycle",
    "NotInLattice",
    "NotInYPlus",
    "QuadElem",
    "QuadField",
    "RationalRadicand",
    "Report",
    "SamplePlan",
    "Triple",
    "cf_sequence",
    "cycle_to_matrix",
    "cycles_equivalent",
    "emit_report",
    "euler_characteristic",
    "fundamental_unit",
    "matrix_to_cycle",
    "monodromy_from_pqr",
    "mori_matrix",
    "parse_quad",
]
