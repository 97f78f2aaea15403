"""Exception hierarchy shared by every module of the package."""


class LatticeAcoError(Exception):
    """Base class for all errors raised by lattice_aco."""


class DomainError(LatticeAcoError, ValueError):
    """A point lies outside a function's box domain, or a domain is malformed."""


class UnknownFunctionError(LatticeAcoError, LookupError):
    def __init__(self, name, choices):
        self.name = name
        self.choices = tuple(choices)
        super().__init__(
            f"unknown built-in function {name!r}; valid choices: {', '.join(self.choices)}"
        )


class ExprSyntaxError(LatticeAcoError, ValueError):
    """Malformed expression text.

    ``offset`` is the byte offset of the offending token in the source and
    ``expected`` the set of token kinds that would have been accepted there
    (empty for errors that are not about a missing token).
    """

    def __init__(self, message, source, offset, expected=()):
        self.source = source
        self.offset = offset
        self.expected = frozenset(expected)
        detail = f"{message} at offset {offset}"
        if self.expected:
            detail += f" (expected one of: {', '.join(sorted(self.expected))})"
        super().__init__(detail)


class ExprEvaluationError(LatticeAcoError, ArithmeticError):
    """A subexpression produced a non-finite value."""

    def __init__(self, subexpr, message="non-finite value"):
        self.subexpr = subexpr
        super().__init__(f"{message} in subexpression {subexpr}")


class EmptyOccupancyError(LatticeAcoError, RuntimeError):
    """Subdivision was requested with no occupied cells (ants never vanish, so this is a bug)."""


class InternalError(LatticeAcoError, RuntimeError):
    """An internal invariant was violated."""


class OracleRefusal(LatticeAcoError, ValueError):
    """The brute-force oracle declined an instance that is too large."""
