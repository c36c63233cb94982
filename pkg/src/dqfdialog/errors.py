"""Exception hierarchy for dqfdialog.

Validation problems subclass ValueError, contract and runtime problems
subclass RuntimeError, so callers can catch either the builtin or the
package type.
"""

from typing import Optional


class DQfDError(Exception):
    """Base class for all dqfdialog errors."""


class OntologyError(DQfDError, ValueError):
    """
    Invalid ontology text or structure.

    Args:
        message: Human readable description
        line: 1-based line number in the source text, if known
        column: 1-based column number in the source text, if known
    """

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.line = line
        self.column = column
        if line is not None:
            location = f"line {line}" + (f", column {column}" if column is not None else "")
            message = f"{message} ({location})"
        super().__init__(message)


class DuplicateDomain(OntologyError):
    """A domain name appears twice."""


class DuplicateSlot(OntologyError):
    """A slot name appears twice within one domain."""


class EmptyValueList(OntologyError):
    """An informable or booking slot declares no values."""


class UnknownDomain(DQfDError, ValueError):
    """Domain is not part of the ontology or not database-backed."""


class UnknownSlot(DQfDError, ValueError):
    """Slot is not declared for the domain."""


class UnknownValue(DQfDError, ValueError):
    """Value is not in the slot's declared value list."""


class ConfigError(DQfDError, ValueError):
    """Invalid run configuration."""


class ContractViolation(DQfDError, RuntimeError):
    """An operation was called outside its precondition."""


class GoalSamplingError(DQfDError, RuntimeError):
    """Rejection sampling could not find a satisfiable goal."""


class EmptyDemoSet(DQfDError, ValueError):
    """A demonstration collection produced no transitions."""


class MissingDemos(DQfDError, ValueError):
    """Training in a demonstration mode without a demonstration file."""


class FormatError(DQfDError, ValueError):
    """A demonstration or checkpoint file is malformed or mismatched."""


class NonFiniteError(DQfDError, RuntimeError):
    """A loss, target or gradient became NaN or infinite."""


class RunDirectoryExists(DQfDError, RuntimeError):
    """Run directories are append-only and may not be reused."""


class ActSyntaxError(DQfDError, ValueError):
    """A dialog-act line could not be parsed."""

    def __init__(self, message: str, column: Optional[int] = None):
        self.column = column
        if column is not None:
            message = f"{message} (column {column})"
        super().__init__(message)
