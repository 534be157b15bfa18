"""Exception hierarchy shared by the library and the command-line front end."""


class CTAPError(Exception):
    """Base class for all package errors."""


class ConfigurationError(CTAPError, ValueError):
    """Invalid or inconsistent input parameters."""


class DomainError(CTAPError, ValueError):
    """Argument outside the validated domain of a numerical routine."""


class DegenerateInputError(ConfigurationError):
    pass


class NumericalError(CTAPError, ArithmeticError):
    """A numerical procedure failed (eigensolver, integrator, ...)."""


class IntegrationError(NumericalError):
    """Norm drift exceeded the allowed bound; the time step is too large."""
