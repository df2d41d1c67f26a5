"""Exception types shared across the package."""


class DimensionError(ValueError):
    """Matrix arguments have incompatible or non-square shapes."""


class CapacityError(ValueError):
    """A requested object exceeds a configured size cap."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class ConfigurationError(ValueError):
    """A numerical configuration would silently produce inexact results."""


class InternalConsistencyError(RuntimeError):
    """A mathematical identity the implementation relies on failed to hold."""


class PolynomialParseError(ValueError):
    """Raised when polynomial text does not match the input grammar.

    Carries the 0-based offset of the offending character in ``position``.
    """

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position
