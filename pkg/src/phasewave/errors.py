"""Exception types raised by phasewave."""


class PhasewaveError(Exception):
    """Base class for all phasewave errors."""


class DomainError(PhasewaveError, ValueError):
    """Argument outside the domain of a function."""


class AccuracyError(PhasewaveError):
    """Requested accuracy not reached; ``estimate`` holds the best value."""

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class BlowUpError(PhasewaveError):
    """Integrated state left the representable range."""

    def __init__(self, message, last_time=None):
        super().__init__(message)
        self.last_time = last_time


class UnsupportedBranchError(PhasewaveError):
    """A branch outside the supported set was requested (e.g. complex roots)."""

    def __init__(self, message, discriminant=None):
        super().__init__(message)
        self.discriminant = discriminant


class BranchUnavailableError(UnsupportedBranchError):
    """The root configuration does not admit the requested branch."""


class PoleError(DomainError):
    """Evaluation at a pole of a singular solution."""


class PositivityError(PhasewaveError, ValueError):
    """A quantity required to be positive (a(x), W, U, R) is not."""


class InconsistencyError(PhasewaveError):
    """Inputs that should agree (family/potential, roots/family) do not."""


class IncompatibleCouplingError(PhasewaveError):
    """The coupling matrix violates the compatibility condition."""


class RealSolutionImpossibleError(PhasewaveError):
    """The parameters only admit complex proportionality constants."""


class PhaseSingularityError(PhasewaveError):
    """An amplitude vanishes on an integration path of the phase."""


class BoundaryError(PhasewaveError):
    """Field does not decay at the window edges; spectral propagation refused."""
