"""Error types shared across the workbench.

Evaluation errors carry no source position (they are raised against values);
model errors carry the SourceSpan of the offending token(s).
"""

from __future__ import annotations

from dataclasses import dataclass


class EbenchError(Exception):
    """Base class for all workbench errors."""


# ---------------------------------------------------------------------------
# evaluation errors


class EvalError(EbenchError):
    """Base class for errors raised while evaluating expressions/predicates."""


class UnboundSymbol(EvalError):
    pass


class OutOfDomain(EvalError):
    """Function applied outside its domain."""


class NotAFunction(EvalError):
    """A value used as a function has two pairs sharing a left component."""


class DomainTooLarge(EvalError):
    """An enumeration exceeded the configured cap."""


class UndefinedOperation(EvalError):
    """Operation undefined on its argument, e.g. min of the empty set."""


class NatBoundExceeded(EvalError):
    """Natural arithmetic exceeded the configured maximum."""


class EvalTypeError(EvalError):
    """Operand of the wrong shape, e.g. min over a set containing atoms."""


# ---------------------------------------------------------------------------
# model / source errors


@dataclass(frozen=True)
class SourceSpan:
    """1-based position of a token range inside a source file."""

    file: str
    line: int
    column: int
    length: int = 1

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


class ModelError(EbenchError):
    """A problem in a model source text, with a position."""

    def __init__(self, span: SourceSpan, message: str):
        super().__init__(f"{span}: {message}")
        self.span = span
        self.message = message


class EbSyntaxError(ModelError):
    def __init__(self, span: SourceSpan, expected: str, found: str = ""):
        detail = f"expected {expected}" + (f", found {found}" if found else "")
        super().__init__(span, detail)
        self.expected = expected


class UnresolvedSymbol(ModelError):
    pass


class DuplicateLabel(ModelError):
    pass


class DuplicateAssignment(ModelError):
    pass


class IllFormedModel(ModelError):
    """Well-formedness violation that is not one of the named cases."""


# ---------------------------------------------------------------------------
# catalog / checking / animation


class UnknownModel(EbenchError):
    pass


class EmptyInit(EbenchError):
    """The initialisation admits no state."""


class TruncatedSystem(EbenchError):
    """A whole-system check was asked to run on a truncated exploration."""


class UnknownSession(EbenchError):
    pass


class NotEnabled(EbenchError):
    pass


class BadChoice(EbenchError):
    pass


class TooFar(EbenchError):
    """Backtrack request beyond the start of the session history."""
