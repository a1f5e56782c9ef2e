"""Exception hierarchy.

Every error raised deliberately by the package derives from ``TPCError`` so the
CLI can map it onto an exit code. ``UsageError`` subclasses map to exit code 2,
everything else to 1.
"""


class TPCError(Exception):
    """Base class for all package errors."""


class UsageError(TPCError):
    """Bad arguments or configuration (CLI exit code 2)."""


class ArgumentError(UsageError, ValueError):
    pass


class ConfigurationError(UsageError):
    pass


class EmptyModelError(UsageError):
    """No subtype survived the minimum-size filter, or a model has no subtypes."""


class ParseError(TPCError):
    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}"
        if line is not None:
            where = f"{where}:{line}" if where else f"line {line}"
        super().__init__(f"{where}: {message}" if where else message)


class RegistryError(TPCError):
    pass


class DuplicateCellError(TPCError):
    pass


class CohortValueError(TPCError, ValueError):
    pass


class EmptyCohortError(TPCError):
    pass


class DegenerateNetworkError(TPCError):
    pass


class UndefinedModularityError(TPCError):
    pass


class SizeLimitError(TPCError):
    pass


class ModelIncompatibilityError(TPCError):
    pass
