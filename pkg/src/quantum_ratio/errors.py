"""Exception hierarchy shared by all modules."""


class QuantumRatioError(Exception):
    """Base class for every error raised by this package."""


class DomainError(QuantumRatioError, ValueError):
    """An input lies outside the domain of an operation."""


class ConfigError(QuantumRatioError, ValueError):
    """A configuration is inconsistent (thresholds, missing parameters, ...)."""


class CatalogError(QuantumRatioError, ValueError):
    """A particle catalog could not be parsed or contains an invalid entry."""


class RegimeError(QuantumRatioError, RuntimeError):
    """A physical validity condition of a scenario is violated."""


class IntegrationError(QuantumRatioError, RuntimeError):
    """Numerical time integration failed."""


class AliasingError(QuantumRatioError, RuntimeError):
    """A propagated field leaks out of its transverse grid."""


class AboveBarrierError(DomainError):
    """The energy exceeds the barrier maximum, so no turning points exist."""
