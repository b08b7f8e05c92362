"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class NullspaceError(Exception):
    """Base class for every error raised by this package."""


class InputError(NullspaceError, ValueError):
    """Malformed or inconsistent input (shape, finiteness, ranges)."""


class NumericalError(NullspaceError, ArithmeticError):
    """A numerical routine failed (e.g. SVD did not converge)."""


class DegenerateColumnError(InputError):
    def __init__(self, column: int, std: float, floor: float):
        self.column = column
        self.std = std
        self.floor = floor
        super().__init__(
            f"column {column} has std {std:.3g} <= floor {floor:.3g}; cannot z-score"
        )


class EarlyTerminationError(NumericalError):
    """PLS recursion produced a vanishing score before reaching M components."""

    def __init__(self, requested: int, achieved: int):
        self.requested = requested
        self.achieved = achieved
        super().__init__(
            f"PLS stopped after {achieved} of {requested} components (score vector vanished)"
        )


class NotConvergedError(NumericalError):
    """Iterative solver hit its iteration cap; carries the best iterate."""

    def __init__(self, message: str, best=None, report=None):
        self.best = best
        self.report = report
        super().__init__(message)


class ProvenanceError(NullspaceError):
    """Coefficients and data were produced under different preprocessing."""


class ConfigError(NullspaceError, ValueError):
    pass


class CsvParseError(InputError):
    def __init__(self, message: str, path=None, row: int | None = None, column: int | None = None):
        self.path = path
        self.row = row
        self.column = column
        where = []
        if path is not None:
            where.append(str(path))
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column}")
        prefix = ", ".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)
