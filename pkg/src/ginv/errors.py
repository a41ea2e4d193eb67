"""Exception hierarchy shared by all ginv modules."""


class GinvError(Exception):
    """Base class for all errors raised by this package."""


class InputError(GinvError):
    """Malformed or out-of-contract input (bad values, foreign arrows, ...)."""


class ShapeMismatchError(InputError):
    """Operands live in algebras of different shapes."""


class PreconditionError(GinvError):
    """A documented precondition does not hold (e.g. base-membership failure)."""


class CompositionError(GinvError):
    """Two arrows are not composable; carries the source/target mismatch."""

    def __init__(self, mismatch: float, message: str = ""):
        self.mismatch = float(mismatch)
        super().__init__(message or f"arrows not composable, ||s(g1) - t(g2)|| = {mismatch:.3e}")


class ConvergenceError(GinvError):
    """An iteration hit its step budget; carries the last relative residual."""

    def __init__(self, residual: float, iterations: int):
        self.residual = float(residual)
        self.iterations = int(iterations)
        super().__init__(f"no convergence after {iterations} iterations (residual {residual:.3e})")


class EvaluationError(GinvError):
    """A sampled function returned a non-finite value; carries the coordinate."""

    def __init__(self, coordinate: int, message: str = ""):
        self.coordinate = int(coordinate)
        super().__init__(message or f"non-finite value while perturbing coordinate {coordinate}")


class OrbitError(GinvError):
    """The requested endpoints lie in different orbit classes."""


class DegenerateInterpolationError(GinvError):
    """Spectral retraction hit an eigenvalue inside the forbidden band around 1/2."""


class ConsistencyError(GinvError):
    """An identity that must hold by construction failed numerically."""


class WireFormatError(InputError):
    """A serialized element could not be parsed; carries location context."""

    def __init__(self, message: str, context: str = ""):
        self.context = context
        super().__init__(f"{message}" + (f" ({context})" if context else ""))
