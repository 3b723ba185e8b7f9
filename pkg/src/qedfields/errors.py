"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class SingularityError(DomainError):
    """Evaluation requested at a pole (source centre, forward scattering, ...)."""


class ResolutionError(ValueError):
    """A lattice or quadrature is too coarse for the requested operation."""


class PrecisionError(ArithmeticError):
    """A numerical result could not be brought within the requested tolerance.

    ``achieved`` holds the error estimate that was actually reached.
    """

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved
