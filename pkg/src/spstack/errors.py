"""Exception types shared across the package."""


class SpstackError(Exception):
    """Base class for package-specific failures."""


class DegenerateConfigurationError(SpstackError):
    """A pose puts the mechanism in a geometrically degenerate state."""


class ConvergenceFailureError(SpstackError):
    """An iterative solve ran out of budget; carries the final residual."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class SingularConfigurationError(SpstackError):
    """The static equilibrium system of a platform is numerically singular."""

    def __init__(self, message, platform_index=None):
        super().__init__(message)
        self.platform_index = platform_index
