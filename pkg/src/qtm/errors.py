"""Exception types shared across the package."""


class QtmError(Exception):
    """Base class for all package-specific errors."""


class DomainError(QtmError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class UnsupportedPairError(QtmError):
    """Closed-form collision map requested for a species pair it cannot describe."""


class UnstableCouplingError(QtmError):
    """Oscillator pair coupled beyond the normal-frequency stability bound."""


class NoContractionError(QtmError):
    """Steady cycle undefined: the collision maps do not contract."""


class ConvergenceError(QtmError):
    """A numerical search or truncation failed to converge; diagnostics attached."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class ResourceLimitError(QtmError):
    """A computation would exceed a configured resource cap."""


class RegimeError(QtmError):
    """Operation requested in a working regime where it is undefined."""


class ConfigError(QtmError):
    """Experiment configuration failed to parse or validate."""


class DatasetError(QtmError):
    """Dataset violates its own invariants (non-finite rows, bad schema)."""
