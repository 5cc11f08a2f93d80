"""Exception types raised by the engine."""


class UdcohomError(Exception):
    """Base class for every error raised by this package."""


class ShapeMismatch(UdcohomError, ValueError):
    pass


class CompositionNonzero(UdcohomError, ValueError):
    pass


class GcdNotOne(UdcohomError, ValueError):
    pass


class BadPrime(UdcohomError, ValueError):
    pass


class BadModulus(UdcohomError, ValueError):
    pass


class IndexOutOfRange(UdcohomError, IndexError):
    pass


class ModulusMismatch(UdcohomError, ValueError):
    pass


class LevelMismatch(UdcohomError, ValueError):
    pass


class NotAnIdeal(UdcohomError, ValueError):
    pass


class SplitMismatch(UdcohomError, AssertionError):
    """d != d1 + d2: almost always a Frobenius lift or sign bug."""


class NotACocycle(UdcohomError, ValueError):
    pass


class LiftFailed(UdcohomError, RuntimeError):
    pass


class BadIndex(UdcohomError, ValueError):
    pass


class ParseError(UdcohomError, ValueError):
    def __init__(self, message, line=None, position=None):
        self.line = line
        self.position = position
        where = ""
        if line is not None:
            where = f" (line {line}" + (f", col {position}" if position is not None else "") + ")"
        super().__init__(message + where)


class ValidationError(UdcohomError, ValueError):
    pass
