"""Exception types raised by the simulator.

Every error derives from ``QwaError`` and from the builtin it specialises, so
callers can catch either ``QwaError`` or e.g. ``ValueError``.
"""


class QwaError(Exception):
    """Base class for simulator errors."""


class InvalidSizeError(QwaError, ValueError):
    """A size parameter (spin count, grid side, degree) is out of range."""


class InvalidInstanceError(QwaError, ValueError):
    """A GraphInstance violates one of its structural invariants."""


class GraphConstructionError(QwaError, RuntimeError):
    """A random graph could not be constructed with the requested parameters."""


class DimensionError(QwaError, ValueError):
    """Operands have mismatching sizes."""


class ScheduleRangeError(QwaError, ValueError):
    """An annealing parameter s lies outside [0, 1]."""


class CutIndexError(QwaError, IndexError):
    """A bipartition cut lies outside 1..n-1."""


class InvalidInputError(QwaError, ValueError):
    """An argument is empty or otherwise unusable."""


class CapacityError(QwaError, ValueError):
    """The problem is too large for an exact method."""


class ConfigError(QwaError, ValueError):
    """An experiment configuration is malformed."""


class NumericalFailure(QwaError, ArithmeticError):
    """A non-finite number appeared during a computation.

    Args:
        message: Human readable description.
        diagnostics: Where it happened (sweep, site, bond dims, ...).
    """

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})

    def __str__(self) -> str:
        base = super().__str__()
        if not self.diagnostics:
            return base
        details = ", ".join(f"{k}={v}" for k, v in self.diagnostics.items())
        return f"{base} ({details})"
