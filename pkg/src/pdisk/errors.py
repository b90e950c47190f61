"""Exception hierarchy shared by every pdisk module."""


class PdiskError(Exception):
    """Base class for all library errors."""


class IncompatibleParams(PdiskError, ValueError):
    """Operands disagree on cyclotomic order, ramification or t-truncation."""


class IncompatibleCyclotomy(PdiskError):
    """A root of unity of the requested order is not in Q(zeta_m)."""


class NotAUnit(PdiskError, ZeroDivisionError):
    """Series whose t^0 part vanishes on the window; it has no inverse."""


class NotInvertible(PdiskError):
    """Matrix (or scalar) that is singular modulo t on the working window."""


class BadSupport(PdiskError, ValueError):
    """Series with terms outside the exponent range an operation accepts."""


class DoesNotSplit(PdiskError):
    """Characteristic polynomial has a nonlinear irreducible factor."""

    def __init__(self, message, factor=None):
        super().__init__(message)
        self.factor = factor


class InsufficientPrecision(PdiskError):
    """The precision window is too small to certify the requested result."""


class DuplicateCharacter(PdiskError):
    """Two TLJ blocks represent the same character class."""


class TurningPoint(PdiskError):
    """A leading difference of characters is not a unit (splitting obstructed)."""

    def __init__(self, message, order=None):
        super().__init__(message)
        self.order = order


class SeedMismatch(PdiskError):
    """Supplied characters are inconsistent with the connection matrix."""


class NoTLJForm(PdiskError):
    """No basis with a 0/1 lower bidiagonal nilpotent part exists over R_L."""


class NeedsShearing(PdiskError):
    """Reduction would require shearing/ramification (Moser reduction), unsupported."""


class CharPolyMismatch(PdiskError):
    """Characteristic polynomial differs from the asserted eigenvalue product."""


class UndecidableAtPrecision(PdiskError):
    """A semi-decision procedure could not conclude on the given window."""


class LambdaViolation(PdiskError):
    """A levelwise decomposition fails to commute with the t-shift action."""


class ParseError(PdiskError):
    """Malformed spec file or series literal."""

    def __init__(self, message, line=None, col=None):
        where = ""
        if line is not None:
            where = f"line {line}" + (f", col {col}" if col is not None else "") + ": "
        super().__init__(where + message)
        self.line = line
        self.col = col


class ParamError(PdiskError):
    """Header values violate parameter constraints."""
