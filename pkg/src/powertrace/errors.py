"""Exception hierarchy shared across the package."""


class PowertraceError(Exception):
    """Base class for all package-specific errors."""


class ValidationError(PowertraceError):
    """Input violates a documented precondition or type invariant."""


class ResourceError(PowertraceError):
    """A construction would exceed the configured qubit cap."""


class NumericalError(PowertraceError):
    """A numerical routine failed to converge or lost accuracy."""


class ContractError(PowertraceError):
    """A polynomial handed to the eigenvalue transform violates its
    admissibility contract (parity or sup-norm)."""


class ConstructionError(PowertraceError):
    """A lower-bound or reduction instance cannot be built from the inputs."""


class UnreliableEstimateError(PowertraceError):
    """An estimate is too close to a singular regime to post-process
    (logarithm of a non-positive value, ratio with vanishing denominator)."""
