"""Exception types shared across the package."""


class GaussgateError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(GaussgateError):
    """Operands have incompatible mode counts or matrix shapes."""


class UncertaintyViolation(GaussgateError):
    """A covariance matrix violates the uncertainty relation V + i*Omega >= 0."""


class NegativeParameter(GaussgateError):
    """A parameter that must be nonnegative (or positive) is out of range."""


class OutOfRange(GaussgateError):
    """A parameter lies outside its documented domain."""


class NumericalBreakdown(GaussgateError):
    """An intermediate matrix became singular or indefinite beyond tolerance."""


class TruncationTooSmall(GaussgateError):
    """A Fock-space cutoff is too small for the requested operation."""


class QuadratureFailure(GaussgateError):
    """Adaptive quadrature failed to reach the requested tolerance."""


class SolverStall(GaussgateError):
    """The SDP solver exhausted its iteration budget before closing the gap."""


class InfeasibleInput(GaussgateError):
    """SDP input data is malformed (e.g. a non-Hermitian objective matrix)."""


class EigenFailure(GaussgateError):
    """An eigendecomposition did not converge."""


class UnknownQuery(GaussgateError):
    """A CLI metric query does not name an exposed operation."""


class IoError(GaussgateError):
    """A figure or report file could not be written."""
