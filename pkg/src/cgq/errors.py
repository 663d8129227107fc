"""Exception types raised by the library."""


class CGQError(Exception):
    """Base class for library errors."""


class DimensionError(CGQError, ValueError):
    """Operand shapes are incompatible with the requested operation."""


class NotHermitianError(CGQError, ValueError):
    """A matrix required to be Hermitian is not, within tolerance."""


class InvalidStateError(CGQError, ValueError):
    """Input is not a valid density matrix."""


class InfeasibleStateError(CGQError, ValueError):
    """No pure micro state is compatible with the requested macro state."""


class PurificationError(InfeasibleStateError):
    """The environment is too small to purify the given state."""
