"""Exception types shared across the toolkit."""


class SketchmineError(Exception):
    """Base class for all toolkit errors."""


class DegenerateSketch(SketchmineError):
    """Sketch geometry has no usable extent (zero bounding box in both axes)."""


class InvalidSketch(SketchmineError):
    """Operation requires a sketch that passes validation."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class ParseError(SketchmineError):
    """Malformed corpus record. Carries the file/record location."""

    def __init__(self, message, location=None):
        self.location = location
        super().__init__(f"{message}" + (f" (at {location})" if location else ""))


class UnknownConceptType(SketchmineError):
    """Instance refers to a type id not present in the library."""


class ShapeMismatch(SketchmineError):
    """Matrix dimensions do not agree with the declared slot/argument counts."""


class InfeasibleMatch(SketchmineError):
    """Fewer generated slots than target elements; no injection exists."""


class UnmatchedTarget(SketchmineError):
    """A loss needs the generation matched to a target element, but none is."""


class DimensionMismatch(SketchmineError):
    """Query vector dimension differs from the codebook dimension."""


class EmptyCorpus(SketchmineError):
    """Library induction was asked to run on zero sketches."""
