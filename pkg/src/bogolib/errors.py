"""Exception hierarchy shared across the library."""


class BogolibError(Exception):
    """Base class for all library errors."""


class GroupTooLargeError(BogolibError):
    """Group order exceeds the configured enumeration ceiling."""


class GroupMismatchError(BogolibError):
    """Operands belong to different groups (or group/dual confusion)."""


class FeasibilityError(BogolibError):
    """An enumeration would exceed its feasibility ceiling."""


class PreconditionError(BogolibError):
    """A documented operation precondition does not hold."""


class DensityShortfallError(PreconditionError):
    """A density hypothesis fails; carries the measured shortfall."""

    def __init__(self, message: str, required, actual):
        super().__init__(f"{message}: required {required}, got {actual}")
        self.required = required
        self.actual = actual


class NoWeaklyRegularRadiusError(BogolibError):
    """No weakly regular radius exists on the search grid."""


class GroupSpecSyntaxError(BogolibError):
    """Malformed group-spec string; carries the offending position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class TheoremViolationError(BogolibError):
    """An instance-checkable theorem failed; signals an implementation bug."""
