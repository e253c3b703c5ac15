"""Error types carrying a machine-readable category for the CLI."""


class VpmcfError(Exception):
    category = "error"


class ConfigError(VpmcfError, ValueError):
    category = "config"


class DomainError(VpmcfError, ValueError):
    category = "domain"


class NonFiniteError(VpmcfError, FloatingPointError):
    category = "non_finite"


class MaxPrincipleError(VpmcfError, RuntimeError):
    """Raised when |phi| leaves [-1, 1] beyond roundoff."""

    category = "max_principle"

    def __init__(self, message, step=None, location=None, value=None):
        super().__init__(message)
        self.step = step
        self.location = location
        self.value = value


class ValidationError(VpmcfError):
    """Initial data failed the well-preparedness checks."""

    category = "validation"


class ConfigWarning(UserWarning):
    pass


class DegenerateWarning(UserWarning):
    pass
