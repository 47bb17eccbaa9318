"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Malformed or inconsistent input (bad parameters, mixed contexts, shape errors)."""


class PreconditionError(ValidationError):
    """A documented operation precondition does not hold."""


class ResourceLimitError(RuntimeError):
    """An enumeration or search guard was exceeded."""

    def __init__(self, message: str, required: int | None = None):
        super().__init__(message)
        self.required = required


class DegenerateSimplexError(ValueError):
    """Vertex set is affinely dependent where independence is required."""


class CertificationError(RuntimeError):
    """A construction stage failed its exact certification."""

    def __init__(self, message: str, stage: str | None = None):
        super().__init__(message)
        self.stage = stage
