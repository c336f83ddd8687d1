"""
Error Hierarchy

Every failure the toolkit reports on purpose derives from RelaxationError so
callers (and the CLI exit-code mapping) can catch the family at once.
"""

from typing import Optional


class RelaxationError(Exception):
    """Base class for all domain errors"""


# ----------------------------------------------------------------------------
# geometry
# ----------------------------------------------------------------------------

class InvalidGeometry(RelaxationError):
    """Input violates a geometric invariant (too few vertices, unsorted angles, ...)"""


class PointOnBoundary(RelaxationError):
    """Winding number requested at a point lying on (or too close to) the loop"""


class AmbiguousDegree(RelaxationError):
    """Consecutive angular increment too large to lift the angle unambiguously"""


class OriginHit(RelaxationError):
    """A circle-map sample coincides with the degree origin"""


class NonFiniteIntegrand(RelaxationError):
    """Integrand returned NaN or infinity"""


# ----------------------------------------------------------------------------
# scene
# ----------------------------------------------------------------------------

class InvalidScene(RelaxationError):
    """Scene fails network validation"""

    def __init__(self, message: str, violations: Optional[list] = None):
        super().__init__(message)
        self.violations = list(violations or [])


class SceneFormatError(RelaxationError):
    """Scene or loop file cannot be parsed against the schema"""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class UnsupportedSchema(SceneFormatError):
    """File declares a schema version this release does not read"""


class BallTooLarge(RelaxationError):
    """Junction ball meets a curve that is not incident to the junction"""


# ----------------------------------------------------------------------------
# plateau
# ----------------------------------------------------------------------------

class DegenerateTriangle(RelaxationError):
    """Source mesh triangle with (numerically) zero area"""


class NonConvergence(RelaxationError):
    """Optimizer stopped at max iterations with objective still decreasing"""


# ----------------------------------------------------------------------------
# recovery
# ----------------------------------------------------------------------------

class WindowOverlap(RelaxationError):
    """Mollification window is not smaller than the shortest arc"""


class BoundaryMismatch(RelaxationError):
    """Plateau competitor boundary does not match the mollified circle data"""
