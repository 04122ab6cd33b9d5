"""Exception types shared across the package."""


class GerminetError(Exception):
    """Base class for errors raised by this package."""


class DataError(GerminetError):
    """Malformed or unusable input data (files, edge lists, labels)."""


class SolverError(GerminetError):
    """A linear solve or fixed-point iteration failed to converge."""


class SingularSystemError(SolverError):
    """Right-hand side is incompatible with the Laplacian's range."""
