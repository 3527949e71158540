"""Error taxonomy shared across the package."""

__all__ = [
    "RatepointError",
    "SingularGradient",
    "AxiomViolated",
    "OutOfDomain",
    "OnLimitSurface",
    "ScenarioError",
]


class RatepointError(Exception):
    """Base class for all package-specific failures."""


class SingularGradient(RatepointError):
    """Yield-function gradient is undefined at the given stress (hydrostatic axis)."""


class AxiomViolated(RatepointError):
    """A state with f(T) > k was supplied or produced."""


class OutOfDomain(RatepointError):
    """Time lies outside the motion's domain of definition."""


class OnLimitSurface(RatepointError):
    """Operation requires mu(T) != 0 but T sits on the limit surface."""


class ScenarioError(RatepointError):
    """Scenario document failed validation; carries the offending key path."""

    def __init__(self, key_path, message):
        self.key_path = key_path
        self.message = message
        super().__init__(f"{key_path}: {message}")
