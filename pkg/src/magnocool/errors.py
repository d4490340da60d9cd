"""Exception hierarchy.

Every error raised for a physical reason derives from :class:`PhysicsError`
so the command line can map it to a single exit status.
"""


class PhysicsError(Exception):
    """Base class for errors with a physical meaning."""


class DomainError(PhysicsError, ValueError):
    """An argument lies outside the domain where the model is defined."""


class SingularDriveError(PhysicsError):
    """The steady-state amplitude denominator vanishes."""


class PoleError(PhysicsError):
    """A response function is evaluated at (or within round-off of) a pole."""

    def __init__(self, mode, omega=None):
        self.mode = mode
        self.omega = omega
        where = "" if omega is None else f" at omega = {omega!r} rad/s"
        super().__init__(f"pole of the {mode} response{where}")


class DegenerateFrequencyError(PhysicsError):
    """Supermode analysis requires omega_a == omega_m."""


class NetHeatingError(PhysicsError):
    """A_- <= A_+: the magnomechanical interaction heats, no cooling limit."""


class UnstableCoolingError(PhysicsError):
    """Gamma + gamma_b <= 0: no steady phonon occupancy."""


class TruncationError(PhysicsError):
    """The Fock-space truncation leaves too much probability in the tail."""

    def __init__(self, message, suggested_n_trunc=None):
        self.suggested_n_trunc = suggested_n_trunc
        super().__init__(message)


class InstabilityError(PhysicsError):
    """The linearised dynamics diverge (drift matrix has Re(lambda) >= 0).

    ``report`` holds the :class:`~magnocool.dynamics.StabilityReport` and
    ``states`` the covariance samples accepted before the divergence.
    """

    def __init__(self, message, report=None, states=None):
        self.report = report
        self.states = list(states or [])
        super().__init__(message)


class ConfigError(Exception):
    """Malformed configuration file or override."""

    def __init__(self, message, line=None, source=None):
        self.line = line
        self.source = source
        prefix = ""
        if source is not None:
            prefix += f"{source}:"
        if line is not None:
            prefix += f"{line}:"
        super().__init__(f"{prefix} {message}" if prefix else message)
