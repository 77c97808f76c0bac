"""Desk-scale toolkit for cones of real-rooted directions.

Exact rational polynomial arithmetic underneath, floating point with
certified fallbacks on top: eigenvalues of points, three-valued cone
membership, derivative relaxations, facial chains, and automorphism
certificates with re-verifiable witnesses.
"""

from .cones import (
    DerivedCone,
    HyperCone,
    contains,
    contains_by_inequalities,
    derivative_cone,
    in_interior,
    membership_exact,
    strict_containment_witness,
)
from .poly import HomoPoly, UniPoly, as_fraction, as_vector, polar_form, restrict_line
from .report import CheckReport, InconclusiveError, Membership, Verdict
from .spectrum import Spectrum, check_hyperbolic, eigenvalues, mult, rank

__all__ = [
    "CheckReport",
    "DerivedCone",
    "HomoPoly",
    "HyperCone",
    "InconclusiveError",
    "Membership",
    "Spectrum",
    "UniPoly",
    "Verdict",
    "as_fraction",
    "as_vector",
    "check_hyperbolic",
    "contains",
    "contains_by_inequalities",
    "derivative_cone",
    "eigenvalues",
    "in_interior",
    "membership_exact",
    "mult",
    "polar_form",
    "rank",
    "restrict_line",
    "strict_containment_witness",
]

__version__ = "0.1.0"
