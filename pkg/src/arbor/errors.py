"""Exception types shared across the package."""


class ArborError(Exception):
    """Base class for all errors raised by this package."""


class DepthExceeded(ArborError):
    """A vertex or truncation level lies below the depth of a portrait."""


class SymbolOutOfRange(ArborError):
    """A vertex word contains a symbol outside 1..d."""


class DegreeMismatch(ArborError):
    """Two objects built over trees of different degree were combined."""


class SchemaError(ArborError):
    """A JSON document does not match the expected schema."""


class UnknownGenerator(ArborError):
    """A word references a generator that was never declared."""


class BadPermutation(ArborError):
    """A permutation entry is not a bijection of 1..d."""


class BudgetExceeded(ArborError):
    """A computation was stopped before completion; the result is undecided.

    Never coerced to a boolean answer.  `partial` may carry whatever was
    computed before the budget ran out.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class SourceNotUniform(ArborError):
    """A sampling request would not produce Haar-uniform elements."""


class NotCritical(ArborError):
    """A claimed critical point has nonzero derivative."""


class IncompleteCriticalData(ArborError):
    """The ramification count over the affine line does not reach d - 1."""

    def __init__(self, message, deficit):
        super().__init__(message)
        self.deficit = deficit


class NotPCF(ArborError):
    """An operation requiring a finite post-critical set was given an
    orbit that escaped its iteration bound."""


class PreconditionNotChebyshevLike(ArborError):
    """Twisted-Chebyshev detection needs a (2,2,infinity) verdict first."""


class ValidationFailure(ArborError):
    """A wreath recursion is inconsistent with its paired polynomial."""

    def __init__(self, clause, message):
        super().__init__(f"clause ({clause}): {message}")
        self.clause = clause


class InternalInconsistency(ArborError):
    """Two routes that must agree by theory disagreed; this is a bug."""


class UnknownEntry(ArborError):
    """No catalog entry under the requested name."""
