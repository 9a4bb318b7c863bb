"""Exception hierarchy.

Three branches matter to callers: ``UsageError`` (bad operands or
configuration), ``NumericalError`` (a numerical routine could not meet its
accuracy contract), and ``InvariantViolationError`` (a computed object broke
a structural invariant such as positivity).  The command line maps the
branches to exit codes 2, 3 and 4.
"""


class DephaselabError(Exception):
    """Base class for every package-specific error."""


class UsageError(DephaselabError):
    """Caller handed in something malformed: operands, parameters, config."""


class ParseError(UsageError):
    """Configuration document could not be parsed."""


class ValidationError(UsageError):
    """Configuration parsed but violates the schema or value constraints."""


class DimensionMismatchError(UsageError):
    """Operand shapes or factor dimensions are inconsistent."""


class NormExceededError(UsageError):
    """A vector that must fit inside the unit ball does not."""


class BadUnitVectorError(UsageError):
    """A direction vector is not normalized."""


class CouplingMismatchError(UsageError):
    """Two models that must share a coupling strength do not."""


class OutOfDomainError(UsageError):
    """Parameter lies outside the admissible domain of a construction."""


class BadIntervalError(UsageError):
    """Time arguments do not form an ordered interval."""


class EmptyInputError(UsageError):
    """A collection that must be non-empty is empty."""


class UnsupportedDimensionError(UsageError):
    """Operation is only defined for specific factor dimensions."""


class UnsupportedModelError(UsageError):
    """Operation is only defined for a restricted model class."""


class CsvWriteError(UsageError):
    """Dataset could not be written (empty dataset or I/O failure)."""


class NumericalError(DephaselabError):
    """A numerical routine failed to meet its accuracy contract."""


class NotHermitianError(NumericalError):
    """Matrix expected to be Hermitian is not, beyond tolerance."""


class NoConvergenceError(NumericalError):
    """Iterative routine exhausted its iteration budget."""


class NonHermitianGeneratorError(NumericalError):
    """Sampled propagation generator is not Hermitian."""


class InvariantViolationError(DephaselabError):
    """A computed object violates one of its declared invariants."""
