"""Exception hierarchy shared by every module of the package."""


class ContourOdesError(Exception):
    """Base class for all package errors."""


class NonConvergence(ContourOdesError, ArithmeticError):
    """A quadrature rule exhausted its budget before meeting tolerances."""


class InvalidContour(ContourOdesError, ValueError):
    """A contour violates connectedness or finiteness requirements."""


class DegenerateExponent(ContourOdesError, ValueError):
    """The decay term of an integrand does not dominate its growth terms."""


class OutOfSector(ContourOdesError, ValueError):
    """A direction lies outside the sector a construction requires."""


class BadIndex(ContourOdesError, ValueError):
    pass


class DuplicateIndex(ContourOdesError, ValueError):
    pass


class UnknownName(ContourOdesError, ValueError):
    pass


class UnknownProperty(ContourOdesError, KeyError):
    pass


class CertFailure(ContourOdesError):
    """A numerically computed certificate violated its defining bound.

    This signals an implementation defect, not a mathematical one.
    """


class SeedLengthMismatch(ContourOdesError, ValueError):
    pass


class TooFewCoefficients(ContourOdesError, ValueError):
    pass


class NonPositiveModulus(ContourOdesError, ArithmeticError):
    pass
