"""Exact computations with Bohr sets, coset progressions and bilinear
difference-set structure in finite abelian groups, plus instance-level
verification of the theorems that drive them."""

from .errors import (
    BogolibError,
    DensityShortfallError,
    FeasibilityError,
    GroupMismatchError,
    GroupSpecSyntaxError,
    GroupTooLargeError,
    NoWeaklyRegularRadiusError,
    PreconditionError,
    TheoremViolationError,
)
from .groups import (
    Character,
    FiniteAbelianGroup,
    GroupElement,
    GroupSubset,
    bounded_span,
    char_eval,
    invariant_factors,
    is_basis,
    make_group,
    parse_group_spec,
    torus_dist,
)

__all__ = [
    "BogolibError",
    "Character",
    "DensityShortfallError",
    "FeasibilityError",
    "FiniteAbelianGroup",
    "GroupElement",
    "GroupMismatchError",
    "GroupSpecSyntaxError",
    "GroupSubset",
    "GroupTooLargeError",
    "NoWeaklyRegularRadiusError",
    "PreconditionError",
    "TheoremViolationError",
    "bounded_span",
    "char_eval",
    "invariant_factors",
    "is_basis",
    "make_group",
    "parse_group_spec",
    "torus_dist",
]

__version__ = "0.1.0"
