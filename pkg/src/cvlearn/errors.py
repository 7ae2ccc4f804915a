"""Exception taxonomy shared across the toolkit.

CLI exit codes: ValidationError/ContractError -> 1, DataError -> 2.
"""


class ContractError(Exception):
    """A precondition of an operation was violated by the caller."""


class ShapeError(ContractError):
    """Operand dimensions are incompatible."""


class DataError(Exception):
    """Input data is malformed: bad files, non-finite values, mismatched headers."""


class ValidationError(Exception):
    """A config or CLI argument failed validation; message names the field."""
