"""
Exception hierarchy for the C-function toolkit
"""


class CFunctionError(Exception):
    """Base class for every error raised by the toolkit"""


class ContextMismatchError(CFunctionError, ValueError):
    """Operands live on different cyclic groups"""


class NotAUnitError(CFunctionError, ValueError):
    """A parameter that must be invertible mod d is not"""


class NotPrimeError(CFunctionError, ValueError):
    """An operation that needs a prime field got a composite modulus"""


class PrincipalCharacterError(CFunctionError, ValueError):
    """A non-principal character was required"""


class ConductorMismatchError(CFunctionError, ArithmeticError):
    """Cyclotomic integers of different conductors were combined"""


class OutOfRangeError(CFunctionError, ValueError):
    """An integer parameter is outside its admissible range"""


class SubspaceError(CFunctionError, ValueError):
    """A function does not belong to the subspace an operation works on"""


class OffTorusError(CFunctionError, ValueError):
    """A point is not on the Clifford torus it is claimed to lie on"""


class DegenerateKernelError(CFunctionError, ArithmeticError):
    """A restriction map has a kernel of unexpected dimension"""


class ZeroFunctionError(CFunctionError, ValueError):
    """The zero function was passed where a nonzero one is required"""


class SizeMismatchError(CFunctionError, ValueError):
    """Index sets of a square minor have different sizes"""


class PathTrackingError(CFunctionError, RuntimeError):
    """Continuation could not complete after all retries"""
