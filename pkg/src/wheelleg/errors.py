"""Exception hierarchy shared by every module.

Each family maps to one CLI exit code (see ``wheelleg.cli``).
"""


class WheelLegError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(WheelLegError, ValueError):
    """Invalid user-facing configuration or parameter values."""


class GeometryError(WheelLegError, ValueError):
    """A mechanism configuration has no valid solution."""


class NoSolution(GeometryError):
    """Hinge and push-rod circles do not meet in the lower half-plane."""


class OutOfStroke(GeometryError):
    """Push-rod length outside the actuator stroke."""


class OutOfRange(GeometryError):
    """Requested opening angle is not reachable within the stroke."""


class DomainError(GeometryError):
    """An arccos argument left [-1, 1] while evaluating the spoke chain.

    ``step`` names the chain angle being computed (``alpha1``, ``alpha3``
    or ``alpha5``) and ``value`` the offending argument.
    """

    def __init__(self, step, value, x):
        self.step = step
        self.value = value
        self.x = x
        super().__init__(
            f"arccos argument for {step} is {value:.9g} (outside [-1, 1]) at x={x:.9g} mm"
        )


class Unreachable(GeometryError):
    """Target spoke span lies outside what the stroke can produce."""

    def __init__(self, target, span_min, span_max):
        self.target = target
        self.span_min = span_min
        self.span_max = span_max
        super().__init__(
            f"target span {target:.6f} mm outside achievable range "
            f"[{span_min:.6f}, {span_max:.6f}] mm"
        )


class RolloutError(WheelLegError):
    """Base class for rollout failures."""


class Stuck(RolloutError):
    """No contact-preserving advance exists; ``last_pose`` holds the final sample."""

    def __init__(self, message, last_pose=None):
        self.last_pose = last_pose
        super().__init__(message)


class AllStuck(RolloutError):
    """Every wheelbase candidate in a sweep failed."""


class TooShort(WheelLegError, ValueError):
    """Series too short for the requested periodic analysis."""


class EmptyWindow(WheelLegError, ValueError):
    """Analysis window contains no samples."""


class BadInput(WheelLegError, ValueError):
    """Physically meaningless metric input (e.g. nonpositive mass)."""


class BadParams(ConfigError):
    """Gait parameters violate the trajectory's validity constraints."""


class UnknownGait(ConfigError):
    """Gait name is not in the phase table."""


class StraightLine(WheelLegError, ArithmeticError):
    """Zero yaw rate: the turning radius is infinite."""


class ParseError(WheelLegError, ValueError):
    """Malformed telemetry file; ``line`` is the 1-based line number."""

    def __init__(self, message, line=None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


class NonMonotonicTime(ParseError):
    """Timestamps do not strictly increase."""


class OverloadedWarning(UserWarning):
    """Payload capacity is negative: actuators cannot carry the robot itself."""
