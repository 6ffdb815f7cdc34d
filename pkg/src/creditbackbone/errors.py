"""Exception types raised across the package."""


class CreditBackboneError(Exception):
    """Base class for every error raised by this package."""


class NodeNotFound(CreditBackboneError, KeyError):
    """An entity code is not present where it was looked up."""

    def __str__(self) -> str:
        return Exception.__str__(self)


class DomainError(CreditBackboneError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class IngestError(CreditBackboneError, ValueError):
    """An input file violates its schema.

    ``path`` and ``line`` locate the offending record when known.
    """

    def __init__(self, message: str, path=None, line: int | None = None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        super().__init__(where + message)


class ConfigError(CreditBackboneError, ValueError):
    """A generator or run configuration cannot be satisfied."""
