"""Exception types shared across the package."""


class ClassmatchError(Exception):
    """Base class for all package errors."""


class InstanceFormatError(ClassmatchError):
    """Raised when an instance / matching / formula file cannot be parsed."""


class InvalidInstanceError(ClassmatchError):
    """Raised by solvers when validation diagnostics are non-empty."""

    def __init__(self, diagnostics):
        super().__init__("; ".join(diagnostics))
        self.diagnostics = list(diagnostics)


class NonLaminarError(ClassmatchError):
    """Raised when a vertex's classes are not nested-or-disjoint."""


class NotManyToOneError(ClassmatchError):
    """Raised by many-to-one-only operations (popularity, CPM solver)."""


class TooLargeError(ClassmatchError):
    """Raised by brute-force oracles when the instance exceeds their cap."""


class DuplicateArcError(ClassmatchError):
    """Raised when a preference arc would duplicate an existing arc."""


class FlowNotMaximalError(ClassmatchError):
    """Raised by the decomposition when the source still reaches the sink."""
