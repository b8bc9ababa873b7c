"""Exception hierarchy.

Every input problem raises a subclass of :class:`ValidationError`; the CLI
maps those to exit code 1 and :class:`InvariantViolation` to exit code 2.
"""


class KolmoError(Exception):
    """Base class for all package errors."""


class ValidationError(KolmoError, ValueError):
    """Input data failed validation."""


class TableError(ValidationError):
    """An outcome table is not a probability distribution.

    ``context`` is filled in with ``(i, j)`` when the table belongs to a
    context family.
    """

    def __init__(self, message, context=None):
        super().__init__(message)
        self.message = message
        self.context = context

    def __str__(self):
        if self.context is None:
            return self.message
        i, j = self.context
        return f"context ({i},{j}): {self.message}"


class NonFiniteEntry(TableError):
    def __init__(self, outcome, value, context=None):
        self.outcome = outcome
        self.value = value
        super().__init__(f"entry {_fmt_outcome(outcome)} is not finite ({value!r})", context)


class NegativeEntry(TableError):
    def __init__(self, outcome, value, context=None):
        self.outcome = outcome
        self.value = value
        super().__init__(f"entry {_fmt_outcome(outcome)} is negative ({value!r})", context)


class EntryAboveOne(TableError):
    def __init__(self, outcome, value, context=None):
        self.outcome = outcome
        self.value = value
        super().__init__(f"entry {_fmt_outcome(outcome)} exceeds 1 ({value!r})", context)


class SumNotOne(TableError):
    def __init__(self, total, context=None):
        self.total = total
        super().__init__(f"entries sum to {total!r}, not 1", context)


class MissingContext(ValidationError):
    def __init__(self, i, j):
        self.context = (i, j)
        super().__init__(f"no outcome table for context ({i},{j})")


class DimensionMismatch(ValidationError):
    pass


class IndexOutOfRange(ValidationError, IndexError):
    pass


class InvalidWeights(ValidationError):
    pass


class NotTwoByTwo(ValidationError):
    def __init__(self, m, n):
        self.shape = (m, n)
        super().__init__(f"CHSH needs a 2x2 family, got {m}x{n}")


class BadSignPattern(ValidationError):
    pass


class RecordError(ValidationError):
    """A trial record is malformed; ``row`` is the 1-based data row."""

    def __init__(self, message, row=None):
        self.row = row
        prefix = f"row {row}: " if row is not None else ""
        super().__init__(prefix + message)


class ConditionHasZeroProbability(KolmoError, ValueError):
    pass


class EmptyContext(KolmoError, ValueError):
    def __init__(self, i, j):
        self.context = (i, j)
        super().__init__(f"context ({i},{j}) has no trials")


class InvariantViolation(KolmoError, RuntimeError):
    """Two independent computations of the same quantity disagree."""


def _fmt_outcome(outcome):
    e, f = outcome
    return "(" + ("+" if e > 0 else "-") + "," + ("+" if f > 0 else "-") + ")"
