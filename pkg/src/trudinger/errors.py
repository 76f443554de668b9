"""Exception types raised across the package."""


class DomainError(ValueError):
    """Argument outside the domain where a quantity is defined."""


class PreconditionError(ValueError):
    """Parameters violate a precondition of an estimate (e.g. lambda too small)."""


class UnsupportedOperation(NotImplementedError):
    """Operation not available for the given manifold/profile."""


class InsufficientData(ValueError):
    """Not enough snapshots or points to evaluate a statistic."""


class ConfigError(ValueError):
    """Invalid weight function or experiment configuration."""


class SolverError(RuntimeError):
    """The time integrator had to abort."""
