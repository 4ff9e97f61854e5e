"""Exception hierarchy shared by every conespec module."""


class ConeSpecError(Exception):
    """Base class for all errors raised by conespec."""


class DimensionMismatch(ConeSpecError, ValueError):
    """Operands have incompatible shapes."""


class NonConvergence(ConeSpecError):
    """An iterative procedure did not converge within its cap."""


class FlowOverflow(ConeSpecError, OverflowError):
    """The semigroup action exceeds the representable floating point range."""


class SplitOnSpectrum(ConeSpecError):
    """The requested split circle passes through the spectrum."""


class NotAnEigenvalue(ConeSpecError):
    """The given scalar is not close to any computed eigenvalue."""


class NotSolid(ConeSpecError):
    """An interior query was made on a cone without facet description."""


class RepresentationMissing(ConeSpecError):
    """The cone lacks the generator or facet form an operation needs."""


class InvalidCone(ConeSpecError, ValueError):
    """The cone data violates a structural invariant (pointedness, consistency)."""


class NumericalFailure(ConeSpecError):
    """A numerical kernel (LP, factorization) broke down."""


class ProofMismatch(ConeSpecError):
    """A constructive step produced a result the underlying argument rules out."""


class NotInCone(ConeSpecError):
    """A vector required to lie in the cone does not."""


class NotPositive(ConeSpecError):
    """The operator is not positive with respect to the cone."""


class ExpansionFailure(ConeSpecError):
    """A vector could not be expanded in the generalized eigenbasis."""


class InsufficientData(ConeSpecError):
    """Not enough trajectory samples for a regression."""


class NotEigenvectors(ConeSpecError):
    """Vectors supplied as eigenvectors fail the residual test."""


class UnknownFamily(ConeSpecError, ValueError):
    """Unknown instance family name."""
