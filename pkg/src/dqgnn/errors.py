"""Exception hierarchy shared across the package.

The CLI maps these onto its exit-code contract: usage/config errors exit 1,
data errors exit 2, anything else exits 3.
"""


class DqgnnError(Exception):
    """Base class for all package-specific errors."""


class UsageError(DqgnnError, ValueError):
    """Invalid arguments or configuration."""


class CapacityError(UsageError):
    """An operation would exceed the configured qubit ceiling."""


class DataError(DqgnnError, ValueError):
    """Dataset or checkpoint contents are invalid."""


class ParseError(DataError):
    """A dataset file failed to parse; names the file and line."""

    def __init__(self, path, line: int | None, message: str):
        self.path = str(path)
        self.line = line
        location = f"{self.path}:{line}" if line is not None else self.path
        super().__init__(f"{location}: {message}")


class TrainingError(DqgnnError):
    """Optimization aborted; carries the best parameters found so far."""

    def __init__(self, message: str, best_params=None,
                 evaluations_used: int = 0):
        super().__init__(message)
        self.best_params = best_params
        self.evaluations_used = evaluations_used
