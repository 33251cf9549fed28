"""Exception types shared across the package."""


class NumericalConsistencyError(RuntimeError):
    """An internal numerical identity failed beyond round-off tolerance."""


class TruncationError(ValueError):
    """A Fock-space truncation is too small for the requested trace tolerance."""

    def __init__(self, message, suggested_dims=None):
        super().__init__(message)
        self.suggested_dims = suggested_dims
