"""Exception hierarchy shared by the simulation and analysis layers."""


class AdhocNetError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(AdhocNetError, ValueError):
    pass


class InvalidPlanError(AdhocNetError, ValueError):
    pass


class InfeasibleError(AdhocNetError):
    """Too few realizations pass the connectivity filter."""

    def __init__(self, message, acceptance_rate):
        super().__init__(message)
        self.acceptance_rate = acceptance_rate


class MergeConflictError(AdhocNetError, ValueError):
    pass


class InsufficientSpanError(AdhocNetError, ValueError):
    pass


class FitError(AdhocNetError):
    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class NoOverlapError(AdhocNetError, ValueError):
    pass


class InsufficientDataError(AdhocNetError, ValueError):
    pass


class ConfigError(AdhocNetError, ValueError):
    """Invalid run configuration; ``line`` is 1-based when known."""

    def __init__(self, message, line=None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)
