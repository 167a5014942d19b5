"""Exception types raised across the package."""


class DomainBreach(ValueError):
    """A value left the range where the competitive kernel is invertible."""


class BoundUndefined(ValueError):
    """A speed bound needs a finite, positive slope constant and did not get one."""


class NoCertificate(RuntimeError):
    """No subsolution certificate was found below the configured speed cap."""


class IntegrationFailure(RuntimeError):
    """The ODE integrator stopped before reaching the end of the interval.

    ``reached`` holds the last abscissa the integrator got to.
    """

    def __init__(self, message, reached=None):
        super().__init__(message)
        self.reached = reached


class BracketFailure(RuntimeError):
    """The speed bracket could not be made to straddle the critical speed."""


class BlowUp(FloatingPointError):
    """The explicit PDE scheme produced a non-finite value."""

    def __init__(self, message, step_index):
        super().__init__(message)
        self.step_index = step_index


class BoundaryContamination(RuntimeError):
    """The tracked front came too close to the edge of the computational box.

    The snapshots and front track gathered so far are attached so callers can
    still inspect them.
    """

    def __init__(self, message, snapshots, track):
        super().__init__(message)
        self.snapshots = snapshots
        self.track = track
