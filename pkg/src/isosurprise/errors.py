"""Exception types shared across the package."""


class ParseError(ValueError):
    """A map or waypoint file could not be parsed."""


class ValidationError(ValueError):
    """A floor plan violates one or more invariants.

    ``problems`` holds one message per violation.
    """

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class ParamError(ValueError):
    """Invalid generator or run parameters."""


class NoHitError(RuntimeError):
    """A ray left the map without hitting anything (map not watertight)."""

    def __init__(self, angle, origin=None):
        self.angle = angle
        self.origin = origin
        super().__init__(f"no hit for ray at angle {angle!r} from {origin!r}")


class EmptyGridError(RuntimeError):
    pass


class NoPathError(RuntimeError):
    pass


class OffGridError(ValueError):
    """A query point is outside the grid or on a blocked cell."""


class EmptyDataError(ValueError):
    pass


class DimensionMismatch(ValueError):
    pass
