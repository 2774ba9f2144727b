"""Exception types shared across the package."""


class CohlatError(Exception):
    """Base class for all package errors."""


class ValidationError(CohlatError):
    """Bad user-supplied input (group tables, lattice files, config)."""


class NotAGroup(ValidationError):
    pass


class IdentityNotZero(ValidationError):
    """The table is a group but index 0 is not its identity."""


class NotA2Group(ValidationError):
    pass


class IncompatibleOperands(ValidationError):
    """Operands live over different groups, moduli or degrees."""


class DegreeOutOfRange(ValidationError):
    pass


class ModulusTooSmall(ValidationError):
    """Requested Bockstein/integral-image needs a deeper modulus than the resolution has."""


class NotRankOneKernel(ValidationError):
    """Sequence kernel is not Z with trivial action."""


class BudgetExceeded(CohlatError):
    """Input is structurally fine but outside the documented size budget."""


class LiftFailed(CohlatError):
    """A chain-map lifting system had no solution (always a bug upstream)."""


class InternalInvariant(CohlatError):
    """An internal consistency check failed (d*d != 0 and friends); always a bug."""


class CoflasquenessCheckFailed(InternalInvariant):
    """Constructed resolution kernel failed its H^1 vanishing verification."""
