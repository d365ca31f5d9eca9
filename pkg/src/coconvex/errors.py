"""Exception hierarchy shared by all modules."""


class CoconvexError(Exception):
    """Base class for every error raised by the toolkit."""


class IdenticallyZero(CoconvexError, ValueError):
    """Root isolation was asked for the zero polynomial."""


class NotPolynomial(CoconvexError, ValueError):
    """An expression could not be converted to a polynomial."""


class ParseError(CoconvexError, ValueError):
    def __init__(self, message, offset, expected=()):
        self.offset = offset
        self.expected = tuple(sorted(expected))
        detail = f"{message} at byte offset {offset}"
        if self.expected:
            detail += f" (expected one of: {', '.join(self.expected)})"
        super().__init__(detail)


class OutOfDomain(CoconvexError, ValueError):
    pass


class DivisionByZero(CoconvexError, ZeroDivisionError):
    """A divide node met a zero denominator (a singularity of the function)."""

    def __init__(self, x):
        self.x = x
        super().__init__(f"division by zero at x = {x!r}")


class PieceBoundaryCrossed(CoconvexError, ValueError):
    pass


class Infeasible(CoconvexError):
    pass


class Unbounded(CoconvexError):
    pass


class InconsistentDegenerate(CoconvexError, ValueError):
    """The modulus vanishes but the deviation does not: no constant can work."""


class NotInteriorPoint(CoconvexError, ValueError):
    pass


class WitnessOutsideDomain(CoconvexError, ValueError):
    pass


class PointInsideDomain(CoconvexError, ValueError):
    pass


class UnknownExample(CoconvexError, KeyError):
    pass
