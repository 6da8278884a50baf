"""Exception types raised across the package."""


class DomainError(ValueError):
    """An input lies outside the mathematical domain of an operation."""


class DepositConsistencyError(ValueError):
    """Deposited token amounts imply conflicting liquidity."""


class ChainDataError(ValueError):
    """Option quote data is missing or unusable."""


class ChainSchemaError(ChainDataError):
    """A snapshot record violates the file schema."""

    def __init__(self, message, index=None):
        self.index = index
        if index is not None:
            message = f"record {index}: {message}"
        super().__init__(message)


class EmptyChainError(ChainDataError):
    pass


class DimensionError(ValueError):
    pass


class ConfigError(ValueError):
    """Invalid position config; ``field`` names the offending key."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")
