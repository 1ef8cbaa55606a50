"""
Exception hierarchy for prodnet.

Every error raised by the library derives from ``ProdnetError`` so that callers
(and the CLI) can separate analysis failures from programming errors. Errors
carry the offending entity id when there is one.
"""

from typing import Optional


class ProdnetError(Exception):
    """Root of all prodnet errors."""

    def __init__(self, message: str, entity: Optional[str] = None, detail: Optional[str] = None):
        super().__init__(message)
        self.entity = entity
        self.detail = detail

    @property
    def name(self) -> str:
        return type(self).__name__


# Input and file-format errors

class InputError(ProdnetError):
    """Base class for problems with supplied economy or flow data."""


class ParseError(InputError):
    """The file is not valid JSON."""


class SchemaError(InputError):
    """A required field is missing or has the wrong type."""


class InvariantError(InputError):
    """A value violates a model invariant (e.g. non-positive labor input)."""


class UnknownEntityError(InputError):
    """A flow or shock references a technology or country that does not exist."""


class NegativeFlowError(InputError):
    """A flow, output, price or wage is negative or not finite."""


# Accounting errors

class MissingPriceError(ProdnetError):
    pass


class NoProducerError(ProdnetError):
    pass


class InactiveTechError(ProdnetError):
    pass


class NotEquilibriumError(ProdnetError):
    """The supplied flow state fails equilibrium validation."""

    def __init__(self, message: str, violations: Optional[list] = None):
        super().__init__(message)
        self.violations = violations or []


class PreconditionError(ProdnetError):
    pass


# Solver errors

class UnsupportedEconomyError(ProdnetError):
    """The economy lies outside the class a solver handles."""


class InfeasibleError(ProdnetError):
    pass


class NonConvergenceError(ProdnetError):
    def __init__(self, message: str, residual: float = float("nan")):
        super().__init__(message)
        self.residual = residual


class TooLargeError(ProdnetError):
    """A desk-scale routine was asked to handle a problem beyond its configured limit."""


class SolverError(ProdnetError):
    pass


# Graph-shape and disruption errors

class CyclicError(ProdnetError):
    """A between-network required to be well ordered contains a directed cycle."""

    def __init__(self, message: str, cycle: Optional[list] = None):
        super().__init__(message)
        self.cycle = cycle or []


class CyclicNetworkError(CyclicError):
    """The supply network has a directed cycle where an acyclic one is required."""


class UndirectedCycleError(ProdnetError):
    def __init__(self, message: str, cycle: Optional[list] = None):
        super().__init__(message)
        self.cycle = cycle or []


class NotPartialError(ProdnetError):
    """A disruption would drive a flow to (or below) zero."""


class ForeignTechError(ProdnetError):
    """The disrupted technology does not belong to the aggressor."""


class NoLeverageError(ProdnetError):
    """The aggressor cannot affect the target at all."""
