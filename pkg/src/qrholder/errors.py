"""Exception types shared by the numerical modules."""


class DomainError(ValueError):
    """An argument lies outside the set where a formula is defined."""


class SingularityError(DomainError):
    """A formula was evaluated at one of its poles."""


class DegenerateError(DomainError):
    """Input is valid but degenerate (vanishing derivative, zero energy, ...)."""


class AliasingError(DomainError):
    """Too few circle samples to resolve the requested Fourier modes."""


class OutOfIntervalWarning(UserWarning):
    """A parameter was used outside the interval where the estimates are proved."""
